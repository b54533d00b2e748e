#ifndef ERW_EXPERIMENT_HPP_
#define ERW_EXPERIMENT_HPP_

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "erw/config.hpp"
#include "erw/gamma_weights.hpp"
#include "erw/stats.hpp"

namespace erw::harness {

/// Per-replica outcome. `value` is T for return-time kinds, the last
/// checkpoint position for path kinds, the running minimum for the probe,
/// the standardized statistic for the CLT kinds and the last qv ratio for
/// diagnostics. A trajectory record holds S(1..n) in `positions`.
struct ReplicaRecord {
  std::uint64_t replica = 0;
  double value = 0.0;
  bool censored = false;
  std::uint64_t steps = 0;
  std::vector<std::int64_t> positions;    // at the kind's checkpoints
  std::vector<std::int64_t> running_min;  // early-return probe only
  std::vector<double> extra;              // martingale diagnostics only

  friend bool operator==(const ReplicaRecord&, const ReplicaRecord&) = default;
};

/// Replicas of one config, possibly a subset.
struct PartialResult {
  ExperimentConfig config;
  std::vector<ReplicaRecord> records;
  bool aborted = false;
};

struct ReturnTimeResult {
  std::string law;
  std::uint64_t k = 0;
  double scale_exponent = 0.0;  // T k^{-e} (diffusive); log T / k (critical)
  double censor_point = 0.0;    // cap on the scaled axis
  std::optional<stats::GofReport> gof;
  std::string finite_k_law;
  std::optional<stats::GofReport> finite_k_gof;  // same window, FiniteKReturnLaw
  double empirical_median = 0.0;  // scaled; +inf if censoring reaches it
  double law_median = 0.0;
  std::uint64_t n_uncensored = 0;
};

struct ScalingResult {
  std::uint64_t k = 0;
  stats::MarginalReport marginals;
};

struct CltResult {
  std::uint64_t k = 0;
  double center = 0.0;
  double scale = 0.0;
  stats::NormalityReport normality;
  std::vector<std::string> warnings;
};

/// Mean of dM / (2 a_m) over steps whose S(m-1)/(m-1) falls in [lo, hi).
struct ConditionalMeanBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double standard_error = 0.0;
};

/// qv ratios: qv (3-4p) / L^{3-4p} with L = floor(t n) steps after k
/// (diffusive), qv / (t log n) with L = floor(n^t) (critical). The
/// normalized martingale divides M by the square root of the same proxy.
struct DiagnosticsResult {
  std::uint64_t k = 0;
  MartingaleKind martingale = MartingaleKind::Diffusive;
  std::vector<double> times;                // checkpoint times t
  std::vector<std::uint64_t> steps;         // steps after k
  std::vector<stats::Moments> qv_ratio;     // qv over its deterministic proxy
  std::vector<stats::Moments> normalized;   // normalized martingale
  std::uint64_t bound_violations = 0;       // |dM| > 2 a_m
  double max_bound_ratio = 0.0;             // max |dM| / (2 a_m)
  std::uint64_t increments_checked = 0;
  double identity_max_rel_error = 0.0;      // a_{m+1}(1+(2p-1)/m) vs a_m
  std::vector<ConditionalMeanBin> conditional_mean;
};

struct ProbePoint {
  double eps = 0.0;
  std::uint64_t horizon = 0;  // steps after k
  double probability = 0.0;
  double standard_error = 0.0;
  std::uint64_t replicas = 0;
};

struct ProbeResult {
  std::uint64_t k = 0;
  std::vector<ProbePoint> points;  // in the configured eps order
  bool monotone = true;            // nonincreasing as eps shrinks, up to 2 SE
};

struct TrajectoryResult {
  std::uint64_t k = 0;
  std::int64_t final_position = 0;
  std::uint64_t first_return = 0;  // 0 if none within the path
};

using KindResult = std::variant<std::monostate, ReturnTimeResult, ScalingResult, CltResult,
                                DiagnosticsResult, ProbeResult, TrajectoryResult>;

struct ExperimentSummary {
  ExperimentConfig config;
  KindResult result;
  std::uint64_t replicas_completed = 0;
  double censoring_fraction = 0.0;
  bool over_censored = false;
  bool aborted = false;
  std::uint64_t total_steps = 0;
  double estimated_steps = 0.0;
  double wall_seconds = 0.0;
  std::string version;
  std::vector<std::string> warnings;
  std::vector<ReplicaRecord> records;  // sorted by replica
  std::string summary_path;            // set once written
};

struct RunOptions {
  unsigned workers = 1;
  const std::atomic<bool>* abort = nullptr;
  std::ostream* log = nullptr;  // progress and warnings
  bool write_files = true;
};

/// Launch-time checks: resolved k, warnings and the step-budget estimate.
struct RunPlan {
  std::uint64_t k = 0;
  double estimated_steps = 0.0;
  std::vector<std::string> warnings;
};

/// Validates the config and estimates its cost. Throws ConfigError.
RunPlan plan(const ExperimentConfig& config);

/// Expected steps per replica of a censored return-time run, from the
/// limiting tail mass.
double expected_return_steps(const ExperimentConfig& config);

/// Simulates replicas [begin, end) of a config on `workers` threads.
PartialResult run_partial(const ExperimentConfig& config, std::uint64_t begin,
                          std::uint64_t end, const RunOptions& options = {});

/// Concatenates partials of one config, sorts by replica and summarizes.
/// Throws std::invalid_argument for mismatched configs or overlapping
/// replica sets.
ExperimentSummary merge(std::span<const PartialResult> partials);

/// Summary statistics for a complete, sorted record set.
ExperimentSummary summarize(PartialResult merged);

/// Validates, simulates every replica, summarizes and, if requested, writes
/// samples.csv, summary.json and kind-specific tables under output_dir.
ExperimentSummary run(const ExperimentConfig& config, const RunOptions& options = {});

/// Master stream identifier of a kind.
std::uint64_t experiment_stream(ExperimentKind kind);

/// Whether sample values of a kind are integers (times or positions).
bool integer_valued(ExperimentKind kind);

std::string_view version() noexcept;

}  // namespace erw::harness

#endif  // ERW_EXPERIMENT_HPP_
