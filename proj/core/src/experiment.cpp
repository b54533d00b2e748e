#include "erw/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "erw/gamma_weights.hpp"
#include "erw/lanes.hpp"
#include "erw/limit_laws.hpp"
#include "erw/persist.hpp"
#include "erw/rng.hpp"

#ifndef ERWLAB_VERSION
#define ERWLAB_VERSION "0.0.0"
#endif

namespace erw::harness {
namespace {

constexpr std::size_t kConditionalBins = 8;

bool is_return_kind(ExperimentKind kind) {
  return kind == ExperimentKind::ReturnTimeDiffusive ||
         kind == ExperimentKind::ReturnTimeCritical;
}

// Simpson's rule on [a, b] with an even number of panels.
template <class F>
double simpson(F f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Steps after k at which the kind samples the path.
std::vector<std::uint64_t> probe_horizons(const ExperimentConfig& c) {
  std::vector<std::uint64_t> out;
  for (const double eps : effective_times(c)) {
    out.push_back(static_cast<std::uint64_t>(std::floor(eps * static_cast<double>(*c.n))));
  }
  return out;
}

std::vector<std::uint64_t> diagnostic_lengths(const ExperimentConfig& c) {
  const bool critical = MemoryParam(*c.p).regime() == Regime::Critical;
  const double n = static_cast<double>(*c.n);
  std::vector<std::uint64_t> out;
  for (const double t : effective_times(c)) {
    const double len = critical ? std::pow(n, t) : t * n;
    out.push_back(std::max<std::uint64_t>(static_cast<std::uint64_t>(std::floor(len)), 1));
  }
  return out;
}

// Absolute step counts recorded by a fixed-horizon kind, strictly increasing.
std::vector<std::uint64_t> path_times(const ExperimentConfig& c, std::uint64_t k) {
  switch (c.kind) {
    case ExperimentKind::ScalingMarginals:
    case ExperimentKind::ScalingMarginalsCritical: {
      const stats::MarginalSpec spec{MemoryParam(*c.p), static_cast<double>(*c.n),
                                     effective_times(c), k > 0, 1e-3};
      return stats::marginal_steps(spec);
    }
    case ExperimentKind::OvertrainedClt:
    case ExperimentKind::OvertrainedCltCritical:
      return {*c.n};
    case ExperimentKind::EarlyReturnProbe: {
      std::vector<std::uint64_t> out;
      for (const auto h : probe_horizons(c)) out.push_back(k + h);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    default:
      return {};
  }
}

struct CltScaling {
  double center = 0.0;
  double scale = 1.0;
  double variance = 1.0;
};

CltScaling clt_scaling(const ExperimentConfig& c, std::uint64_t k) {
  const MemoryParam p(*c.p);
  const double n = static_cast<double>(*c.n);
  const double kd = static_cast<double>(k);
  if (c.kind == ExperimentKind::OvertrainedCltCritical) {
    return {laws::overtrained_center_critical(n, kd), std::sqrt(n * std::log(n)), 1.0};
  }
  return {laws::overtrained_center(p, n, kd), std::sqrt(n), 1.0 / (3.0 - 4.0 * p.value())};
}

// Everything a worker needs, built once per run.
struct Setup {
  ExperimentConfig config;
  MemoryParam p{0.5};
  std::uint64_t k = 0;
  TrainingPrefix prefix;
  std::uint64_t stream = 0;
  std::vector<std::uint64_t> times;
  CltScaling clt;
  std::vector<std::uint64_t> diag_lengths;
  std::optional<GammaWeightTable> weights;

  Xoshiro256pp rng(std::uint64_t replica) const {
    return replica_rng(config.seed, stream, replica);
  }
};

Setup make_setup(const ExperimentConfig& c) {
  Setup s;
  s.config = c;
  s.p = MemoryParam(*c.p);
  s.k = resolved_k(c);
  s.prefix = TrainingPrefix::canonical(s.k);
  s.stream = experiment_stream(c.kind);
  s.times = path_times(c, s.k);
  if (c.kind == ExperimentKind::OvertrainedClt ||
      c.kind == ExperimentKind::OvertrainedCltCritical) {
    s.clt = clt_scaling(c, s.k);
  }
  if (c.kind == ExperimentKind::MartingaleDiagnostics) {
    s.diag_lengths = diagnostic_lengths(c);
    const auto longest = *std::max_element(s.diag_lengths.begin(), s.diag_lengths.end());
    s.weights.emplace(s.p, s.k, s.k + longest + 1);
  }
  return s;
}

// Scalar martingale pass over one replica. Layout of `extra`:
// qv per checkpoint, M per checkpoint, max |dM|/(2 a_m), violations,
// increments, then (count, sum, sum of squares) per conditional bin.
ReplicaRecord diagnose_replica(const Setup& s, std::uint64_t replica) {
  const auto& a = *s.weights;
  const bool critical = s.p.regime() == Regime::Critical;
  const std::size_t nt = s.diag_lengths.size();
  std::vector<std::pair<std::uint64_t, std::size_t>> marks;
  for (std::size_t i = 0; i < nt; ++i) marks.emplace_back(s.k + s.diag_lengths[i], i);
  std::sort(marks.begin(), marks.end());
  const std::uint64_t end = marks.back().first;
  const std::uint64_t origin = critical ? s.k + 1 : s.k;

  ReplicaRecord rec;
  rec.replica = replica;
  rec.extra.assign(2 * nt + 3 + 3 * kConditionalBins, 0.0);
  double* qv_at = rec.extra.data();
  double* m_at = qv_at + nt;
  double& max_ratio = rec.extra[2 * nt];
  double& violations = rec.extra[2 * nt + 1];
  double& increments = rec.extra[2 * nt + 2];
  double* bins = rec.extra.data() + 2 * nt + 3;

  auto rng = s.rng(replica);
  WalkState st = init_trained(s.prefix, s.p);
  double base = 0.0;
  double prev = 0.0;
  double qv = 0.0;
  std::size_t next_mark = 0;
  if (st.n == origin) base = prev = a[origin] * static_cast<double>(st.position);
  while (st.n < end) {
    const double m_prev = static_cast<double>(st.n);
    const double s_prev = static_cast<double>(st.position);
    st = advance(st, rng);
    const double am = a[st.n];
    const double x = am * static_cast<double>(st.position);
    if (st.n == origin) {
      base = prev = x;
    } else if (st.n > origin) {
      const double inc = x - prev;
      qv += inc * inc;
      const double ratio = std::abs(inc) / (2.0 * am);
      max_ratio = std::max(max_ratio, ratio);
      if (ratio > 1.0 + 1e-12) violations += 1.0;
      increments += 1.0;
      const double frac = s_prev / m_prev;
      auto bin = static_cast<std::size_t>((frac + 1.0) * 0.5 * kConditionalBins);
      bin = std::min(bin, kConditionalBins - 1);
      const double y = inc / (2.0 * am);
      bins[3 * bin] += 1.0;
      bins[3 * bin + 1] += y;
      bins[3 * bin + 2] += y * y;
      prev = x;
    }
    while (next_mark < marks.size() && marks[next_mark].first == st.n) {
      qv_at[marks[next_mark].second] = qv;
      m_at[marks[next_mark].second] = x - base;
      ++next_mark;
    }
  }
  rec.steps = end - s.k;
  return rec;
}

ReplicaRecord trajectory_replica(const Setup& s, std::uint64_t replica) {
  const std::uint64_t n = *s.config.n;
  ReplicaRecord rec;
  rec.replica = replica;
  rec.positions.reserve(n);
  std::int64_t pos = 0;
  for (const auto step : s.prefix.steps()) {
    if (rec.positions.size() == n) break;
    pos += step;
    rec.positions.push_back(pos);
  }
  if (n > s.k) {
    auto rng = s.rng(replica);
    WalkState st = ensure_history(init_trained(s.prefix, s.p), rng);
    if (s.k == 0) rec.positions.push_back(st.position);
    while (st.n < n) {
      st = advance(st, rng);
      rec.positions.push_back(st.position);
    }
    rec.steps = n - s.k;
  }
  rec.value = rec.positions.empty() ? 0.0 : static_cast<double>(rec.positions.back());
  return rec;
}

// Runs replicas from `source` into `out`; false if aborted.
bool work(const Setup& s, const ReplicaSource& source, std::vector<ReplicaRecord>& out,
          std::atomic<std::uint64_t>& done, const std::atomic<bool>* abort) {
  const auto streams = [&s](std::uint64_t r) { return s.rng(r); };
  const ExperimentKind kind = s.config.kind;

  if (is_return_kind(kind)) {
    const ReturnTimeTask task{s.prefix, s.p, *s.config.cap};
    return lane_return_times(
        task, streams, source,
        [&](std::uint64_t r, const ReturnTimeSample& t) {
          out.push_back({r, static_cast<double>(t.value), t.censored, t.steps, {}, {}, {}});
          done.fetch_add(1, std::memory_order_relaxed);
        },
        abort);
  }

  if (kind == ExperimentKind::MartingaleDiagnostics ||
      kind == ExperimentKind::TrajectoryFigure) {
    while (const auto r = source()) {
      if (abort && abort->load(std::memory_order_relaxed)) return false;
      auto rec = kind == ExperimentKind::TrajectoryFigure ? trajectory_replica(s, *r)
                                                          : diagnose_replica(s, *r);
      if (kind == ExperimentKind::MartingaleDiagnostics) {
        const std::size_t nt = s.diag_lengths.size();
        rec.value = rec.extra[nt - 1];
      }
      out.push_back(std::move(rec));
      done.fetch_add(1, std::memory_order_relaxed);
    }
    return true;
  }

  const PathTask task{s.prefix, s.p, s.times};
  const bool clt = kind == ExperimentKind::OvertrainedClt ||
                   kind == ExperimentKind::OvertrainedCltCritical;
  const bool probe = kind == ExperimentKind::EarlyReturnProbe;
  return lane_paths(
      task, streams, source,
      [&](std::uint64_t r, const PathRecord& path) {
        ReplicaRecord rec;
        rec.replica = r;
        rec.steps = path.steps;
        if (clt) {
          rec.value = (static_cast<double>(path.positions.back()) - s.clt.center) / s.clt.scale;
        } else if (probe) {
          rec.value = static_cast<double>(path.running_min.back());
          rec.running_min = path.running_min;
        } else {
          rec.value = static_cast<double>(path.positions.back());
        }
        rec.positions = path.positions;
        out.push_back(std::move(rec));
        done.fetch_add(1, std::memory_order_relaxed);
      },
      abort);
}

void log_line(std::ostream* log, const std::string& msg) {
  if (log) *log << "[erwlab] " << msg << '\n' << std::flush;
}

ReturnTimeResult return_time_result(const PartialResult& m, std::uint64_t k) {
  const auto& c = m.config;
  const MemoryParam p(*c.p);
  const bool critical = c.kind == ExperimentKind::ReturnTimeCritical;
  ReturnTimeResult out;
  out.k = k;
  const double kd = static_cast<double>(k);
  const double cap = static_cast<double>(*c.cap);

  std::unique_ptr<laws::ContinuousLaw> law;
  std::function<double(double)> scale;
  if (critical) {
    law = std::make_unique<laws::CriticalReturnLaw>();
    out.scale_exponent = 0.0;
    scale = [kd](double t) { return std::log(t) / kd; };
  } else {
    law = std::make_unique<laws::DiffusiveReturnLaw>(p);
    out.scale_exponent = laws::return_exponent(p);
    const double factor = std::pow(kd, -out.scale_exponent);
    scale = [factor](double t) { return t * factor; };
  }
  out.law = law->name();
  out.censor_point = scale(cap);
  out.law_median = law->quantile(0.5);

  std::vector<double> xs;
  std::size_t censored = 0;
  for (const auto& r : m.records) {
    if (r.censored) {
      ++censored;
    } else {
      xs.push_back(std::min(scale(r.value), out.censor_point));
    }
  }
  out.n_uncensored = xs.size();
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = m.records.size() / 2;
  out.empirical_median =
      mid < sorted.size() ? sorted[mid] : std::numeric_limits<double>::infinity();
  const auto emp = stats::ecdf(std::move(xs), censored, out.censor_point);
  out.gof = stats::ks_test(emp, *law, c.window);
  const laws::FiniteKReturnLaw finite(p, k);
  out.finite_k_law = finite.name();
  out.finite_k_gof = stats::ks_test(emp, finite, c.window);
  return out;
}

DiagnosticsResult diagnostics_result(const PartialResult& m, std::uint64_t k) {
  const auto& c = m.config;
  const MemoryParam p(*c.p);
  const bool critical = p.regime() == Regime::Critical;
  const double n = static_cast<double>(*c.n);
  DiagnosticsResult out;
  out.k = k;
  out.martingale = critical ? MartingaleKind::Critical : MartingaleKind::Diffusive;
  out.times = effective_times(c);
  out.steps = diagnostic_lengths(c);
  const std::size_t nt = out.times.size();

  std::vector<double> proxy(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double len = static_cast<double>(out.steps[i]);
    const double e = 3.0 - 4.0 * p.value();
    proxy[i] = critical ? out.times[i] * std::log(n) : std::pow(len, e) / e;
  }

  std::vector<double> bin_count(kConditionalBins), bin_sum(kConditionalBins),
      bin_sq(kConditionalBins);
  for (std::size_t i = 0; i < nt; ++i) {
    std::vector<double> ratio, norm;
    for (const auto& r : m.records) {
      ratio.push_back(r.extra[i] / proxy[i]);
      norm.push_back(r.extra[nt + i] / std::sqrt(proxy[i]));
    }
    out.qv_ratio.push_back(stats::describe(ratio));
    out.normalized.push_back(stats::describe(norm));
  }
  for (const auto& r : m.records) {
    out.max_bound_ratio = std::max(out.max_bound_ratio, r.extra[2 * nt]);
    out.bound_violations += static_cast<std::uint64_t>(r.extra[2 * nt + 1]);
    out.increments_checked += static_cast<std::uint64_t>(r.extra[2 * nt + 2]);
    const double* bins = r.extra.data() + 2 * nt + 3;
    for (std::size_t b = 0; b < kConditionalBins; ++b) {
      bin_count[b] += bins[3 * b];
      bin_sum[b] += bins[3 * b + 1];
      bin_sq[b] += bins[3 * b + 2];
    }
  }
  for (std::size_t b = 0; b < kConditionalBins; ++b) {
    ConditionalMeanBin bin;
    bin.lo = -1.0 + 2.0 * static_cast<double>(b) / kConditionalBins;
    bin.hi = -1.0 + 2.0 * static_cast<double>(b + 1) / kConditionalBins;
    bin.count = static_cast<std::uint64_t>(bin_count[b]);
    if (bin.count > 0) {
      bin.mean = bin_sum[b] / bin_count[b];
      const double var = std::max(0.0, bin_sq[b] / bin_count[b] - bin.mean * bin.mean);
      bin.standard_error = std::sqrt(var / bin_count[b]);
    }
    out.conditional_mean.push_back(bin);
  }

  // a_{m+1} (1 + (2p-1)/m) = a_m on log-spaced m.
  const double top = std::max(2.0, static_cast<double>(k + *c.n));
  for (int i = 0; i <= 200; ++i) {
    const auto mm = static_cast<std::uint64_t>(std::llround(std::pow(top, i / 200.0)));
    const double lhs =
        weight(p, mm + 1) * (1.0 + (2.0 * p.value() - 1.0) / static_cast<double>(mm));
    const double rhs = weight(p, mm);
    const double err = rhs != 0.0 ? std::abs(lhs / rhs - 1.0) : std::abs(lhs);
    out.identity_max_rel_error = std::max(out.identity_max_rel_error, err);
  }
  return out;
}

ProbeResult probe_result(const PartialResult& m, std::uint64_t k) {
  const auto& c = m.config;
  const auto eps = effective_times(c);
  const auto horizons = probe_horizons(c);
  const auto times = path_times(c, k);
  ProbeResult out;
  out.k = k;
  const double reps = static_cast<double>(m.records.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto idx = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), k + horizons[i]) - times.begin());
    std::uint64_t hits = 0;
    for (const auto& r : m.records) hits += r.running_min[idx] <= 0 ? 1 : 0;
    ProbePoint pt;
    pt.eps = eps[i];
    pt.horizon = horizons[i];
    pt.replicas = m.records.size();
    pt.probability = static_cast<double>(hits) / reps;
    pt.standard_error = std::sqrt(pt.probability * (1.0 - pt.probability) / reps);
    out.points.push_back(pt);
  }
  auto by_eps = out.points;
  std::sort(by_eps.begin(), by_eps.end(),
            [](const ProbePoint& a, const ProbePoint& b) { return a.eps > b.eps; });
  for (std::size_t i = 1; i < by_eps.size(); ++i) {
    const double tol = 2.0 * std::max(by_eps[i].standard_error, by_eps[i - 1].standard_error);
    if (by_eps[i].probability > by_eps[i - 1].probability + tol) out.monotone = false;
  }
  return out;
}

}  // namespace

std::string_view version() noexcept { return ERWLAB_VERSION; }

std::uint64_t experiment_stream(ExperimentKind kind) {
  return experiment_id(to_string(kind));
}

bool integer_valued(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::OvertrainedClt:
    case ExperimentKind::OvertrainedCltCritical:
    case ExperimentKind::MartingaleDiagnostics:
      return false;
    default:
      return true;
  }
}

double expected_return_steps(const ExperimentConfig& c) {
  const MemoryParam p(*c.p);
  const std::uint64_t k = resolved_k(c);
  const double kd = static_cast<double>(k);
  const double cap = static_cast<double>(*c.cap);
  double mean_min = 0.0;
  if (p.regime() == Regime::Critical) {
    // E min(T, cap) = int_0^cap P(T > u) du with log T / k ~ Stable(1/2).
    const double top = std::log(cap);
    mean_min = 1.0 + simpson([&](double y) { return laws::stable_half_sf(y / kd) * std::exp(y); },
                             0.0, top, 4000);
  } else {
    const double scale = std::pow(kd, laws::return_exponent(p));
    const double top = std::log(cap / scale);
    const double e = 3.0 - 4.0 * p.value();
    const auto sf = [&](double x) {
      return laws::stable_half_sf(std::pow(x, e) / e);
    };
    mean_min = scale * simpson([&](double y) { return sf(std::exp(y)) * std::exp(y); },
                               top - 40.0, top, 4000);
  }
  return std::max(0.0, std::min(mean_min, cap) - kd);
}

RunPlan plan(const ExperimentConfig& c) {
  validate(c);
  RunPlan out;
  out.k = resolved_k(c);
  const MemoryParam p(*c.p);
  const double reps = static_cast<double>(c.replicas);
  switch (c.kind) {
    case ExperimentKind::ReturnTimeDiffusive:
    case ExperimentKind::ReturnTimeCritical: {
      out.estimated_steps = reps * expected_return_steps(c);
      const double kd = static_cast<double>(out.k);
      const double cap = static_cast<double>(*c.cap);
      double censor_mass = 0.0;
      if (c.kind == ExperimentKind::ReturnTimeCritical) {
        censor_mass = laws::stable_half_sf(std::log(cap) / kd);
        if (out.k >= 12) {
          std::ostringstream os;
          os << "critical return times grow like exp(2.2 k): median near "
             << std::exp(2.198 * kd) << " steps per replica at k = " << out.k;
          out.warnings.push_back(os.str());
        }
      } else {
        const double x = cap * std::pow(kd, -laws::return_exponent(p));
        censor_mass = 1.0 - laws::diffusive_return_cdf(p, x);
      }
      if (censor_mass > 0.5) {
        std::ostringstream os;
        os << "expected censored fraction " << censor_mass << " exceeds 50%";
        out.warnings.push_back(os.str());
      }
      break;
    }
    case ExperimentKind::MartingaleDiagnostics: {
      const auto lens = diagnostic_lengths(c);
      out.estimated_steps = reps * static_cast<double>(*std::max_element(lens.begin(), lens.end()));
      break;
    }
    case ExperimentKind::EarlyReturnProbe: {
      const auto h = probe_horizons(c);
      out.estimated_steps = reps * static_cast<double>(*std::max_element(h.begin(), h.end()));
      break;
    }
    case ExperimentKind::TrajectoryFigure:
      out.estimated_steps = static_cast<double>(*c.n > out.k ? *c.n - out.k : 0);
      break;
    default: {
      const auto times = path_times(c, out.k);
      out.estimated_steps = reps * static_cast<double>(times.back() - out.k);
      break;
    }
  }
  if (c.kind == ExperimentKind::OvertrainedClt || c.kind == ExperimentKind::OvertrainedCltCritical) {
    for (auto& w : laws::overtrained_regime_warnings(p, static_cast<double>(*c.n),
                                                     static_cast<double>(out.k))) {
      out.warnings.push_back(std::move(w));
    }
  }
  return out;
}

PartialResult run_partial(const ExperimentConfig& config, std::uint64_t begin,
                          std::uint64_t end, const RunOptions& options) {
  validate(config);
  if (end > config.replicas || begin > end) {
    throw std::invalid_argument("replica range outside the config");
  }
  const Setup setup = make_setup(config);
  PartialResult out;
  out.config = config;
  if (begin == end) return out;

  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(options.workers, 1, end - begin));
  std::atomic<std::uint64_t> next{begin};
  std::atomic<std::uint64_t> done{0};
  std::atomic<unsigned> finished{0};
  std::vector<std::vector<ReplicaRecord>> buckets(workers);
  std::vector<char> completed(workers, 0);
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          const ReplicaSource source = [&]() -> std::optional<std::uint64_t> {
            const auto i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= end) return std::nullopt;
            return i;
          };
          completed[w] = work(setup, source, buckets[w], done, options.abort) ? 1 : 0;
        } catch (...) {
          errors[w] = std::current_exception();
        }
        finished.fetch_add(1);
      });
    }
    const auto start = std::chrono::steady_clock::now();
    auto last_report = start;
    while (finished.load() < workers) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      const auto now = std::chrono::steady_clock::now();
      if (options.log && now - last_report > std::chrono::seconds(30)) {
        last_report = now;
        std::ostringstream os;
        os << done.load() << "/" << (end - begin) << " replicas after "
           << std::chrono::duration<double>(now - start).count() << " s";
        log_line(options.log, os.str());
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (unsigned w = 0; w < workers; ++w) {
    if (!completed[w]) out.aborted = true;
    for (auto& r : buckets[w]) out.records.push_back(std::move(r));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const ReplicaRecord& a, const ReplicaRecord& b) { return a.replica < b.replica; });
  return out;
}

ExperimentSummary summarize(PartialResult merged) {
  const RunPlan pl = plan(merged.config);
  ExperimentSummary s;
  s.config = merged.config;
  s.version = std::string(version());
  s.aborted = merged.aborted;
  s.estimated_steps = pl.estimated_steps;
  s.warnings = pl.warnings;
  s.replicas_completed = merged.records.size();
  std::uint64_t censored = 0;
  for (const auto& r : merged.records) {
    s.total_steps += r.steps;
    censored += r.censored ? 1 : 0;
  }
  if (s.replicas_completed > 0) {
    s.censoring_fraction =
        static_cast<double>(censored) / static_cast<double>(s.replicas_completed);
  }
  s.over_censored = s.censoring_fraction > 0.5;
  if (s.aborted) {
    s.warnings.push_back("run aborted after " + std::to_string(s.replicas_completed) +
                         " of " + std::to_string(merged.config.replicas) + " replicas");
  }

  const auto& c = merged.config;
  const std::uint64_t k = pl.k;
  try {
    if (merged.records.empty()) {
      // nothing to summarize
    } else if (is_return_kind(c.kind)) {
      s.result = return_time_result(merged, k);
    } else if (c.kind == ExperimentKind::ScalingMarginals ||
               c.kind == ExperimentKind::ScalingMarginalsCritical) {
      std::vector<std::vector<std::int64_t>> rows;
      rows.reserve(merged.records.size());
      for (const auto& r : merged.records) rows.push_back(r.positions);
      const stats::MarginalSpec spec{MemoryParam(*c.p), static_cast<double>(*c.n),
                                     effective_times(c), k > 0, 1e-3};
      ScalingResult res{k, stats::marginal_report(rows, spec)};
      for (const auto& w : res.marginals.warnings) s.warnings.push_back(w);
      s.result = std::move(res);
    } else if (c.kind == ExperimentKind::OvertrainedClt ||
               c.kind == ExperimentKind::OvertrainedCltCritical) {
      const auto sc = clt_scaling(c, k);
      std::vector<double> xs;
      xs.reserve(merged.records.size());
      for (const auto& r : merged.records) xs.push_back(r.value);
      CltResult res;
      res.k = k;
      res.center = sc.center;
      res.scale = sc.scale;
      res.normality = stats::normality_report(xs, sc.variance);
      res.warnings = laws::overtrained_regime_warnings(MemoryParam(*c.p),
                                                       static_cast<double>(*c.n),
                                                       static_cast<double>(k));
      s.result = std::move(res);
    } else if (c.kind == ExperimentKind::MartingaleDiagnostics) {
      s.result = diagnostics_result(merged, k);
    } else if (c.kind == ExperimentKind::EarlyReturnProbe) {
      s.result = probe_result(merged, k);
    } else if (c.kind == ExperimentKind::TrajectoryFigure) {
      TrajectoryResult res;
      res.k = k;
      const auto& path = merged.records.front().positions;
      if (!path.empty()) res.final_position = path.back();
      for (std::size_t i = k; i < path.size(); ++i) {
        if (path[i] == 0) {
          res.first_return = i + 1;
          break;
        }
      }
      s.result = res;
    }
  } catch (const std::invalid_argument& e) {
    s.warnings.push_back(std::string("statistics unavailable: ") + e.what());
  }
  s.records = std::move(merged.records);
  return s;
}

ExperimentSummary merge(std::span<const PartialResult> partials) {
  if (partials.empty()) throw std::invalid_argument("nothing to merge");
  PartialResult all;
  all.config = partials.front().config;
  for (const auto& part : partials) {
    if (!(part.config == all.config)) {
      throw std::invalid_argument("cannot merge partials of different configs");
    }
    all.aborted = all.aborted || part.aborted;
    all.records.insert(all.records.end(), part.records.begin(), part.records.end());
  }
  std::sort(all.records.begin(), all.records.end(),
            [](const ReplicaRecord& a, const ReplicaRecord& b) { return a.replica < b.replica; });
  for (std::size_t i = 1; i < all.records.size(); ++i) {
    if (all.records[i].replica == all.records[i - 1].replica) {
      throw std::invalid_argument("partials overlap at replica " +
                                  std::to_string(all.records[i].replica));
    }
  }
  return summarize(std::move(all));
}

ExperimentSummary run(const ExperimentConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const RunPlan pl = plan(config);
  {
    std::ostringstream os;
    os << to_string(config.kind) << ": p=" << *config.p << " k=" << pl.k
       << " replicas=" << config.replicas << " estimated steps " << pl.estimated_steps;
    log_line(options.log, os.str());
  }
  for (const auto& w : pl.warnings) log_line(options.log, "warning: " + w);

  auto partial = run_partial(config, 0, config.replicas, options);
  auto summary = summarize(std::move(partial));
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (summary.over_censored) {
    log_line(options.log, "over-censored: more than half of the replicas hit the cap");
  }
  if (options.write_files) {
    summary.summary_path = write_outputs(summary, config.output_dir);
    log_line(options.log, "wrote " + summary.summary_path);
  }
  return summary;
}

}  // namespace erw::harness
