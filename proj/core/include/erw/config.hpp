#ifndef ERW_CONFIG_HPP_
#define ERW_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "erw/stats.hpp"
#include "erw/walk.hpp"

namespace erw::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind {
  ReturnTimeDiffusive,
  ReturnTimeCritical,
  ScalingMarginals,
  ScalingMarginalsCritical,
  OvertrainedClt,
  OvertrainedCltCritical,
  MartingaleDiagnostics,
  EarlyReturnProbe,
  TrajectoryFigure,
};

std::string_view to_string(ExperimentKind kind) noexcept;
/// Throws ConfigError for an unknown name.
ExperimentKind parse_kind(std::string_view name);

/// Training length, either fixed or derived from (p, n).
struct TrainingRule {
  enum class Type { Fixed, CriticalPhase, PowerRule, LogRule };
  Type type = Type::Fixed;
  std::uint64_t fixed = 0;
  double exponent = 0.0;  // PowerRule: floor(n^exponent)

  static TrainingRule of(std::uint64_t k) { return {Type::Fixed, k, 0.0}; }
  /// Accepts an integer, "CriticalPhase", "PowerRule(x)" or "LogRule".
  static TrainingRule parse(std::string_view text);
  std::string to_string() const;

  /// Fixed: k. CriticalPhase: floor of the critical training phase
  /// (diffusive) or ceil(log n) (p = 3/4). PowerRule: floor(n^x).
  /// LogRule: ceil(log n).
  std::uint64_t resolve(MemoryParam p, std::optional<std::uint64_t> n) const;

  friend bool operator==(const TrainingRule&, const TrainingRule&) = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ReturnTimeDiffusive;
  std::optional<double> p;
  std::optional<TrainingRule> k;
  std::optional<std::uint64_t> n;
  std::uint64_t replicas = 1000;
  std::optional<std::uint64_t> cap;
  std::uint64_t seed = 1;
  std::vector<double> checkpoint_times;  // empty: per-kind default
  stats::Window window;
  std::string output_dir = ".";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

/// Ordered key -> value text, as read from a config file or flags.
using ConfigMap = std::map<std::string, std::string>;

inline constexpr std::string_view kConfigKeys[] = {
    "kind", "p",    "k",                "n",      "replicas",
    "cap",  "seed", "checkpoint_times", "window", "output_dir"};

/// Parses flat `key=value` lines. Blank lines and lines starting with '#'
/// are skipped. Unknown or repeated keys throw ConfigError.
ConfigMap parse_config_text(std::string_view text);

/// Reads a config file; throws std::runtime_error on I/O failure.
ConfigMap read_config_file(const std::string& path);

/// Converts parsed text into a config. Counts accept scientific notation
/// and are floored; each floor is appended to `notices` when given.
ExperimentConfig config_from_map(const ConfigMap& map,
                                 std::vector<std::string>* notices = nullptr);

ConfigMap config_to_map(const ExperimentConfig& config);
std::string to_config_text(const ExperimentConfig& config);

/// Parses "1e7", "10000000", "2.5e3" to a floored nonnegative integer.
std::uint64_t parse_count(std::string_view text, bool* floored = nullptr);
std::vector<double> parse_real_list(std::string_view text);

/// Checks kind-specific completeness and regime compatibility. Throws
/// ConfigError describing the first problem found.
void validate(const ExperimentConfig& config);

/// Checkpoint times after applying the per-kind default.
std::vector<double> effective_times(const ExperimentConfig& config);

/// Resolved training length of a validated config.
std::uint64_t resolved_k(const ExperimentConfig& config);

}  // namespace erw::harness

#endif  // ERW_CONFIG_HPP_
