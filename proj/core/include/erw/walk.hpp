#ifndef ERW_WALK_HPP_
#define ERW_WALK_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

enum class Regime { Diffusive, Critical, Superdiffusive };

std::string_view to_string(Regime regime) noexcept;

/// Memory parameter p in [0, 1]: probability of repeating a remembered step.
class MemoryParam {
 public:
  /// Throws std::invalid_argument outside [0, 1].
  explicit MemoryParam(double p);

  double value() const noexcept { return p_; }

  /// p - 1/2, the coefficient of S/n in the up-step probability.
  double half_drift() const noexcept { return p_ - 0.5; }

  /// p < 3/4 diffusive, p = 3/4 critical, p > 3/4 superdiffusive.
  Regime regime() const noexcept;

  friend bool operator==(MemoryParam, MemoryParam) = default;

 private:
  double p_;
};

/// Largest step count the walk may reach; counts are carried exactly in
/// double arithmetic inside the stepping rule.
inline constexpr std::uint64_t kMaxSteps = std::uint64_t{1} << 53;

/// Fixed first k steps of a trained walk.
class TrainingPrefix {
 public:
  TrainingPrefix() = default;

  /// Throws std::invalid_argument if any entry is not +1 or -1.
  explicit TrainingPrefix(std::vector<std::int8_t> steps);

  /// k copies of +1.
  static TrainingPrefix canonical(std::uint64_t k);

  std::uint64_t length() const noexcept { return steps_.size(); }
  std::int64_t end_position() const noexcept { return end_; }
  bool is_canonical() const noexcept {
    return end_ == static_cast<std::int64_t>(steps_.size());
  }
  std::span<const std::int8_t> steps() const noexcept { return steps_; }

 private:
  std::vector<std::int8_t> steps_;
  std::int64_t end_ = 0;
};

/// Sufficient statistic of the memory dynamics: the step count and position.
struct WalkState {
  std::uint64_t n = 0;
  std::int64_t position = 0;
  MemoryParam param{0.5};

  friend bool operator==(const WalkState&, const WalkState&) = default;
};

struct ReturnTimeSample {
  std::uint64_t value = 0;  // T, or the cap when censored
  bool censored = false;
  std::uint64_t cap = 0;
  std::uint64_t k = 0;
  MemoryParam p{0.5};
  std::uint64_t steps = 0;  // steps simulated after the prefix

  friend bool operator==(const ReturnTimeSample&,
                         const ReturnTimeSample&) = default;
};

/// Positions of one trajectory at increasing step counts.
struct CheckpointSeries {
  std::vector<std::uint64_t> times;
  std::vector<std::int64_t> positions;
  std::uint64_t k = 0;
  MemoryParam p{0.5};
};

/// P(X_{n+1} = +1 | past) = 1/2 + (2p - 1) S(n) / (2n).
/// Throws std::domain_error ("no history") when n = 0.
double step_prob_up(const WalkState& state);

/// One memory step. Throws std::domain_error when n = 0 and
/// std::overflow_error when n would exceed kMaxSteps.
WalkState advance(WalkState state, Xoshiro256pp& rng);

/// State after the fixed prefix; the empty prefix gives the untrained
/// start (n = 0, S = 0).
WalkState init_trained(const TrainingPrefix& prefix, MemoryParam p);

/// Draws the fair-coin first step of an untrained walk (n = 0 -> n = 1).
/// States with n >= 1 are returned unchanged.
WalkState ensure_history(WalkState state, Xoshiro256pp& rng);

/// T = inf{n >= k : S(n) = 0}, censored at `cap`. Throws
/// std::invalid_argument when cap <= k.
ReturnTimeSample first_return_time(const TrainingPrefix& prefix, MemoryParam p,
                                   std::uint64_t cap, Xoshiro256pp& rng);

/// Records S at the requested step counts of one trajectory. `times` must be
/// strictly increasing with first entry >= k.
CheckpointSeries simulate_checkpoints(const TrainingPrefix& prefix,
                                      MemoryParam p,
                                      std::span<const std::uint64_t> times,
                                      Xoshiro256pp& rng);

/// Every step count from k to k + steps inclusive.
CheckpointSeries simulate_path(const TrainingPrefix& prefix, MemoryParam p,
                               std::uint64_t steps, Xoshiro256pp& rng);

/// True iff min_{k <= n <= horizon} S(n) <= 0.
bool early_return_indicator(const TrainingPrefix& prefix, MemoryParam p,
                            std::uint64_t horizon, Xoshiro256pp& rng);

}  // namespace erw

#endif  // ERW_WALK_HPP_
