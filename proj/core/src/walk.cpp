#include "erw/walk.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "step_rule.hpp"

namespace erw {

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Diffusive:
      return "diffusive";
    case Regime::Critical:
      return "critical";
    case Regime::Superdiffusive:
      return "superdiffusive";
  }
  return "unknown";
}

MemoryParam::MemoryParam(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("memory parameter must lie in [0, 1], got " +
                                std::to_string(p));
  }
}

Regime MemoryParam::regime() const noexcept {
  if (p_ < 0.75) return Regime::Diffusive;
  if (p_ == 0.75) return Regime::Critical;
  return Regime::Superdiffusive;
}

TrainingPrefix::TrainingPrefix(std::vector<std::int8_t> steps)
    : steps_(std::move(steps)) {
  for (const auto x : steps_) {
    if (x != 1 && x != -1) {
      throw std::invalid_argument("training steps must be +1 or -1");
    }
    end_ += x;
  }
}

TrainingPrefix TrainingPrefix::canonical(std::uint64_t k) {
  if (k > kMaxSteps) throw std::invalid_argument("training length too large");
  TrainingPrefix prefix;
  prefix.steps_.assign(k, std::int8_t{1});
  prefix.end_ = static_cast<std::int64_t>(k);
  return prefix;
}

double step_prob_up(const WalkState& state) {
  if (state.n == 0) throw std::domain_error("no history");
  return 0.5 + state.param.half_drift() * static_cast<double>(state.position) /
                   static_cast<double>(state.n);
}

WalkState advance(WalkState state, Xoshiro256pp& rng) {
  if (state.n == 0) throw std::domain_error("no history");
  if (state.n >= kMaxSteps) throw std::overflow_error("step counter overflow");
  const bool up = detail::step_up(rng.uniform(), static_cast<double>(state.n),
                                  static_cast<double>(state.position),
                                  state.param.half_drift());
  state.position += up ? 1 : -1;
  ++state.n;
  return state;
}

WalkState init_trained(const TrainingPrefix& prefix, MemoryParam p) {
  return WalkState{prefix.length(), prefix.end_position(), p};
}

WalkState ensure_history(WalkState state, Xoshiro256pp& rng) {
  if (state.n > 0) return state;
  state.position = detail::first_step_up(rng.uniform()) ? 1 : -1;
  state.n = 1;
  return state;
}

ReturnTimeSample first_return_time(const TrainingPrefix& prefix, MemoryParam p,
                                   std::uint64_t cap, Xoshiro256pp& rng) {
  const std::uint64_t k = prefix.length();
  if (cap <= k) throw std::invalid_argument("cap must exceed the training length");
  if (cap > kMaxSteps) throw std::invalid_argument("cap exceeds the step limit");

  ReturnTimeSample out{k, false, cap, k, p, 0};
  WalkState state = init_trained(prefix, p);
  if (state.position == 0) return out;

  state = ensure_history(state, rng);
  while (state.position != 0 && state.n < cap) {
    state = advance(state, rng);
  }
  out.steps = state.n - k;
  if (state.position == 0) {
    out.value = state.n;
  } else {
    out.value = cap;
    out.censored = true;
  }
  return out;
}

CheckpointSeries simulate_checkpoints(const TrainingPrefix& prefix,
                                      MemoryParam p,
                                      std::span<const std::uint64_t> times,
                                      Xoshiro256pp& rng) {
  const std::uint64_t k = prefix.length();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < k) throw std::invalid_argument("checkpoint precedes training");
    if (i > 0 && times[i] <= times[i - 1]) {
      throw std::invalid_argument("checkpoint times must be strictly increasing");
    }
  }
  if (!times.empty() && times.back() > kMaxSteps) {
    throw std::invalid_argument("checkpoint exceeds the step limit");
  }

  CheckpointSeries series{{}, {}, k, p};
  series.times.assign(times.begin(), times.end());
  series.positions.reserve(times.size());

  WalkState state = init_trained(prefix, p);
  for (const auto t : times) {
    if (state.n < t) state = ensure_history(state, rng);
    while (state.n < t) state = advance(state, rng);
    series.positions.push_back(state.position);
  }
  return series;
}

CheckpointSeries simulate_path(const TrainingPrefix& prefix, MemoryParam p,
                               std::uint64_t steps, Xoshiro256pp& rng) {
  const std::uint64_t k = prefix.length();
  if (steps > kMaxSteps - k) throw std::invalid_argument("path exceeds the step limit");
  CheckpointSeries series{{}, {}, k, p};
  series.times.reserve(steps + 1);
  series.positions.reserve(steps + 1);

  WalkState state = init_trained(prefix, p);
  series.times.push_back(state.n);
  series.positions.push_back(state.position);
  for (std::uint64_t i = 0; i < steps; ++i) {
    state = state.n == 0 ? ensure_history(state, rng) : advance(state, rng);
    series.times.push_back(state.n);
    series.positions.push_back(state.position);
  }
  return series;
}

bool early_return_indicator(const TrainingPrefix& prefix, MemoryParam p,
                            std::uint64_t horizon, Xoshiro256pp& rng) {
  const std::uint64_t k = prefix.length();
  if (horizon < k) throw std::invalid_argument("horizon precedes training");
  if (horizon > kMaxSteps) throw std::invalid_argument("horizon exceeds the step limit");

  WalkState state = init_trained(prefix, p);
  if (state.position <= 0) return true;
  if (state.n < horizon) state = ensure_history(state, rng);
  while (state.n < horizon) {
    state = advance(state, rng);
    if (state.position <= 0) return true;
  }
  return state.position <= 0;
}

}  // namespace erw
