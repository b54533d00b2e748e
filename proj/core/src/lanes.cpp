#include "erw/lanes.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "step_rule.hpp"

namespace erw {
namespace {

constexpr std::size_t L = kLaneWidth;
constexpr std::uint64_t kBlock = 512;

struct alignas(64) Lanes {
  std::uint64_t s0[L], s1[L], s2[L], s3[L];
  double n[L], s[L];
  double hit[L];  // first n with s == 0, or 0
  double low[L];  // running minimum of s
};

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// The inner loop is the xoshiro256++ update plus detail::step_up, written out
// per lane so the compiler can vectorize across lanes.
template <bool kTrackHit, bool kTrackLow>
void step_block(Lanes& st, double half_drift, std::uint64_t steps) {
  alignas(64) std::uint64_t a[L], b[L], c[L], d[L];
  alignas(64) double n[L], s[L], hit[L], low[L];
  for (std::size_t l = 0; l < L; ++l) {
    a[l] = st.s0[l];
    b[l] = st.s1[l];
    c[l] = st.s2[l];
    d[l] = st.s3[l];
    n[l] = st.n[l];
    s[l] = st.s[l];
    hit[l] = st.hit[l];
    low[l] = st.low[l];
  }
  for (std::uint64_t i = 0; i < steps; ++i) {
    for (std::size_t l = 0; l < L; ++l) {
      const std::uint64_t r = rotl(a[l] + d[l], 23) + a[l];
      const std::uint64_t t = b[l] << 17;
      c[l] ^= a[l];
      d[l] ^= b[l];
      b[l] ^= c[l];
      a[l] ^= d[l];
      c[l] ^= t;
      d[l] = rotl(d[l], 45);

      const double u = Xoshiro256pp::to_unit(r);
      const double up = detail::step_up(u, n[l], s[l], half_drift) ? 1.0 : -1.0;
      s[l] += up;
      n[l] += 1.0;
      if constexpr (kTrackHit) {
        hit[l] = ((s[l] == 0.0) & (hit[l] == 0.0)) ? n[l] : hit[l];
      }
      if constexpr (kTrackLow) {
        low[l] = s[l] < low[l] ? s[l] : low[l];
      }
    }
  }
  for (std::size_t l = 0; l < L; ++l) {
    st.s0[l] = a[l];
    st.s1[l] = b[l];
    st.s2[l] = c[l];
    st.s3[l] = d[l];
    st.n[l] = n[l];
    st.s[l] = s[l];
    st.hit[l] = hit[l];
    st.low[l] = low[l];
  }
}

void load_stream(Lanes& st, std::size_t l, const Xoshiro256pp& rng) {
  const auto& words = rng.state();
  st.s0[l] = words[0];
  st.s1[l] = words[1];
  st.s2[l] = words[2];
  st.s3[l] = words[3];
}

void park_lane(Lanes& st, std::size_t l) {
  st.s0[l] = 1;
  st.s1[l] = st.s2[l] = st.s3[l] = 0;
  st.n[l] = 1.0;
  st.s[l] = 1.0;
  st.hit[l] = 0.0;
  st.low[l] = 1.0;
}

bool aborted(const std::atomic<bool>* abort) {
  return abort != nullptr && abort->load(std::memory_order_relaxed);
}

}  // namespace

bool lane_return_times(const ReturnTimeTask& task, const StreamFactory& streams,
                       const ReplicaSource& source, const ReturnTimeSink& sink,
                       const std::atomic<bool>* abort) {
  const std::uint64_t k = task.prefix.length();
  if (task.cap <= k) throw std::invalid_argument("cap must exceed the training length");
  if (task.cap > kMaxSteps) throw std::invalid_argument("cap exceeds the step limit");

  const double cap = static_cast<double>(task.cap);
  const double half_drift = task.p.half_drift();

  Lanes st{};
  std::array<std::uint64_t, L> replica{};
  std::array<bool, L> active{};
  bool exhausted = false;

  auto refill = [&](std::size_t l) {
    while (!exhausted) {
      const auto next = source();
      if (!next) {
        exhausted = true;
        break;
      }
      Xoshiro256pp rng = streams(*next);
      WalkState state = init_trained(task.prefix, task.p);
      if (state.position == 0) {
        sink(*next, ReturnTimeSample{k, false, task.cap, k, task.p, 0});
        continue;
      }
      state = ensure_history(state, rng);
      load_stream(st, l, rng);
      st.n[l] = static_cast<double>(state.n);
      st.s[l] = static_cast<double>(state.position);
      st.hit[l] = 0.0;
      st.low[l] = st.s[l];
      replica[l] = *next;
      active[l] = true;
      return;
    }
    park_lane(st, l);
    active[l] = false;
  };

  for (std::size_t l = 0; l < L; ++l) refill(l);

  while (std::any_of(active.begin(), active.end(), [](bool a) { return a; })) {
    if (aborted(abort)) return false;

    double room = static_cast<double>(kBlock);
    for (std::size_t l = 0; l < L; ++l) {
      if (active[l]) room = std::min(room, cap - st.n[l]);
    }
    step_block<true, false>(st, half_drift, static_cast<std::uint64_t>(room));

    for (std::size_t l = 0; l < L; ++l) {
      if (!active[l]) continue;
      if (st.hit[l] != 0.0) {
        const auto t = static_cast<std::uint64_t>(st.hit[l]);
        sink(replica[l], ReturnTimeSample{t, false, task.cap, k, task.p, t - k});
      } else if (st.n[l] >= cap) {
        sink(replica[l],
             ReturnTimeSample{task.cap, true, task.cap, k, task.p, task.cap - k});
      } else {
        continue;
      }
      refill(l);
    }
  }
  return true;
}

bool lane_paths(const PathTask& task, const StreamFactory& streams,
                const ReplicaSource& source, const PathSink& sink,
                const std::atomic<bool>* abort) {
  const std::uint64_t k = task.prefix.length();
  for (std::size_t i = 0; i < task.times.size(); ++i) {
    if (task.times[i] < k) throw std::invalid_argument("checkpoint precedes training");
    if (i > 0 && task.times[i] <= task.times[i - 1]) {
      throw std::invalid_argument("checkpoint times must be strictly increasing");
    }
  }
  if (!task.times.empty() && task.times.back() > kMaxSteps) {
    throw std::invalid_argument("checkpoint exceeds the step limit");
  }

  const double half_drift = task.p.half_drift();
  const WalkState start = init_trained(task.prefix, task.p);
  const std::size_t m = task.times.size();

  for (;;) {
    std::array<std::uint64_t, L> replica{};
    std::vector<Xoshiro256pp> rngs;
    rngs.reserve(L);
    std::size_t used = 0;
    while (used < L) {
      const auto next = source();
      if (!next) break;
      replica[used] = *next;
      rngs.push_back(streams(*next));
      ++used;
    }
    if (used == 0) return true;

    Lanes st{};
    for (std::size_t l = 0; l < L; ++l) {
      if (l < used) {
        load_stream(st, l, rngs[l]);
        st.n[l] = static_cast<double>(start.n);
        st.s[l] = static_cast<double>(start.position);
        st.low[l] = st.s[l];
      } else {
        park_lane(st, l);
        st.n[l] = static_cast<double>(start.n);
      }
    }

    std::vector<PathRecord> records(used);
    for (auto& r : records) {
      r.positions.reserve(m);
      r.running_min.reserve(m);
      r.steps = m == 0 ? 0 : task.times.back() - k;
    }

    std::uint64_t now = start.n;
    for (const auto t : task.times) {
      if (now < t && now == 0) {
        for (std::size_t l = 0; l < used; ++l) {
          const WalkState first =
              ensure_history(WalkState{0, 0, task.p}, rngs[l]);
          load_stream(st, l, rngs[l]);
          st.s[l] = static_cast<double>(first.position);
          st.low[l] = std::min(st.low[l], st.s[l]);
        }
        for (std::size_t l = 0; l < L; ++l) st.n[l] = 1.0;
        now = 1;
      }
      while (now < t) {
        if (aborted(abort)) return false;
        const std::uint64_t chunk = std::min(kBlock, t - now);
        step_block<false, true>(st, half_drift, chunk);
        now += chunk;
      }
      for (std::size_t l = 0; l < used; ++l) {
        records[l].positions.push_back(static_cast<std::int64_t>(st.s[l]));
        records[l].running_min.push_back(static_cast<std::int64_t>(st.low[l]));
      }
    }
    for (std::size_t l = 0; l < used; ++l) sink(replica[l], records[l]);
  }
}

}  // namespace erw
