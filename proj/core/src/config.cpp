#include "erw/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "erw/limit_laws.hpp"

namespace erw::harness {
namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::ReturnTimeDiffusive, "ReturnTimeDiffusive"},
    {ExperimentKind::ReturnTimeCritical, "ReturnTimeCritical"},
    {ExperimentKind::ScalingMarginals, "ScalingMarginals"},
    {ExperimentKind::ScalingMarginalsCritical, "ScalingMarginalsCritical"},
    {ExperimentKind::OvertrainedClt, "OvertrainedClt"},
    {ExperimentKind::OvertrainedCltCritical, "OvertrainedCltCritical"},
    {ExperimentKind::MartingaleDiagnostics, "MartingaleDiagnostics"},
    {ExperimentKind::EarlyReturnProbe, "EarlyReturnProbe"},
    {ExperimentKind::TrajectoryFigure, "TrajectoryFigure"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view text, std::string_view what) {
  const auto s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("invalid number for " + std::string(what) + ": '" +
                      std::string(text) + "'");
  }
  return v;
}

bool is_known_key(std::string_view key) {
  return std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) !=
         std::end(kConfigKeys);
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool is_critical_kind(ExperimentKind kind) {
  return kind == ExperimentKind::ReturnTimeCritical ||
         kind == ExperimentKind::ScalingMarginalsCritical ||
         kind == ExperimentKind::OvertrainedCltCritical;
}

bool needs_cap(ExperimentKind kind) {
  return kind == ExperimentKind::ReturnTimeDiffusive ||
         kind == ExperimentKind::ReturnTimeCritical;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "Unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == trim(name)) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

TrainingRule TrainingRule::parse(std::string_view text) {
  const auto s = trim(text);
  if (s == "CriticalPhase") return {Type::CriticalPhase, 0, 0.0};
  if (s == "LogRule") return {Type::LogRule, 0, 0.0};
  constexpr std::string_view power = "PowerRule(";
  if (s.starts_with(power) && s.ends_with(")")) {
    const auto inner = s.substr(power.size(), s.size() - power.size() - 1);
    const double x = parse_real(inner, "PowerRule exponent");
    if (!(x > 0.0 && x < 1.0)) throw ConfigError("PowerRule exponent must lie in (0, 1)");
    return {Type::PowerRule, 0, x};
  }
  return of(parse_count(s));
}

std::string TrainingRule::to_string() const {
  switch (type) {
    case Type::Fixed:
      return std::to_string(fixed);
    case Type::CriticalPhase:
      return "CriticalPhase";
    case Type::LogRule:
      return "LogRule";
    case Type::PowerRule:
      return "PowerRule(" + format_real(exponent) + ")";
  }
  return {};
}

std::uint64_t TrainingRule::resolve(MemoryParam p,
                                    std::optional<std::uint64_t> n) const {
  if (type == Type::Fixed) return fixed;
  if (!n || *n < 2) throw ConfigError("training rule " + to_string() + " needs n >= 2");
  const double nd = static_cast<double>(*n);
  switch (type) {
    case Type::CriticalPhase:
      if (p.regime() == Regime::Diffusive) {
        return static_cast<std::uint64_t>(std::floor(laws::critical_training_k(p, nd)));
      }
      if (p.regime() == Regime::Critical) {
        return static_cast<std::uint64_t>(
            std::ceil(laws::critical_training_k_critical(nd)));
      }
      throw ConfigError("no critical training phase for p > 3/4");
    case Type::LogRule:
      return static_cast<std::uint64_t>(std::ceil(std::log(nd)));
    case Type::PowerRule:
      return static_cast<std::uint64_t>(std::floor(std::pow(nd, exponent)));
    case Type::Fixed:
      break;
  }
  return fixed;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.kind == b.kind && a.p == b.p && a.k == b.k && a.n == b.n &&
         a.replicas == b.replicas && a.cap == b.cap && a.seed == b.seed &&
         a.checkpoint_times == b.checkpoint_times && a.window.q_lo == b.window.q_lo &&
         a.window.q_hi == b.window.q_hi && a.output_dir == b.output_dir;
}

std::uint64_t parse_count(std::string_view text, bool* floored) {
  const auto s = trim(text);
  std::uint64_t exact = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), exact);
  if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) {
    if (floored) *floored = false;
    return exact;
  }
  const double v = parse_real(s, "count");
  if (!(v >= 0.0) || v >= 0x1p64) throw ConfigError("count out of range: '" + std::string(s) + "'");
  const double f = std::floor(v);
  if (floored) *floored = f != v;
  return static_cast<std::uint64_t>(f);
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::string_view rest = trim(text);
  if (rest.empty()) return out;
  while (true) {
    const auto comma = rest.find(',');
    out.push_back(parse_real(rest.substr(0, comma), "list entry"));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap map;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!is_known_key(key)) throw ConfigError("unknown config key '" + key + "'");
    if (map.contains(key)) throw ConfigError("duplicate config key '" + key + "'");
    map.emplace(key, std::string(trim(line.substr(eq + 1))));
  }
  return map;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ExperimentConfig config_from_map(const ConfigMap& map, std::vector<std::string>* notices) {
  for (const auto& [key, value] : map) {
    if (!is_known_key(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  auto count = [&](const std::string& key) {
    bool floored = false;
    const auto v = parse_count(map.at(key), &floored);
    if (floored && notices) {
      notices->push_back(key + "=" + map.at(key) + " floored to " + std::to_string(v));
    }
    return v;
  };

  ExperimentConfig c;
  if (!map.contains("kind")) throw ConfigError("missing required key 'kind'");
  c.kind = parse_kind(map.at("kind"));
  if (map.contains("p")) c.p = parse_real(map.at("p"), "p");
  if (map.contains("k")) c.k = TrainingRule::parse(map.at("k"));
  if (map.contains("n")) c.n = count("n");
  if (map.contains("replicas")) c.replicas = count("replicas");
  if (map.contains("cap")) c.cap = count("cap");
  if (map.contains("seed")) c.seed = count("seed");
  if (map.contains("checkpoint_times")) {
    c.checkpoint_times = parse_real_list(map.at("checkpoint_times"));
  }
  if (map.contains("window")) {
    const auto w = parse_real_list(map.at("window"));
    if (w.size() != 2) throw ConfigError("window needs two entries q_lo,q_hi");
    c.window = {w[0], w[1]};
  }
  if (map.contains("output_dir")) c.output_dir = map.at("output_dir");
  return c;
}

ConfigMap config_to_map(const ExperimentConfig& c) {
  ConfigMap map;
  map["kind"] = std::string(to_string(c.kind));
  if (c.p) map["p"] = format_real(*c.p);
  if (c.k) map["k"] = c.k->to_string();
  if (c.n) map["n"] = std::to_string(*c.n);
  map["replicas"] = std::to_string(c.replicas);
  if (c.cap) map["cap"] = std::to_string(*c.cap);
  map["seed"] = std::to_string(c.seed);
  if (!c.checkpoint_times.empty()) {
    std::string s;
    for (std::size_t i = 0; i < c.checkpoint_times.size(); ++i) {
      if (i) s += ',';
      s += format_real(c.checkpoint_times[i]);
    }
    map["checkpoint_times"] = s;
  }
  map["window"] = format_real(c.window.q_lo) + "," + format_real(c.window.q_hi);
  map["output_dir"] = c.output_dir;
  return map;
}

std::string to_config_text(const ExperimentConfig& config) {
  const auto map = config_to_map(config);
  std::string out;
  for (const auto key : kConfigKeys) {
    const auto it = map.find(std::string(key));
    if (it != map.end()) out += it->first + "=" + it->second + "\n";
  }
  return out;
}

std::vector<double> effective_times(const ExperimentConfig& c) {
  if (!c.checkpoint_times.empty()) return c.checkpoint_times;
  switch (c.kind) {
    case ExperimentKind::ScalingMarginals:
      return {0.25, 0.5, 1.0};
    case ExperimentKind::ScalingMarginalsCritical:
      return {0.5, 0.75, 1.0};
    case ExperimentKind::MartingaleDiagnostics:
      return {0.25, 0.5, 1.0};
    case ExperimentKind::EarlyReturnProbe:
      return {0.4, 0.2, 0.1, 0.05};
    default:
      return {};
  }
}

void validate(const ExperimentConfig& c) {
  const auto kind_name = std::string(to_string(c.kind));
  if (!c.p) throw ConfigError(kind_name + " requires p");
  if (!(*c.p >= 0.0 && *c.p <= 1.0)) throw ConfigError("p must lie in [0, 1]");
  const MemoryParam p(*c.p);
  if (!c.k) throw ConfigError(kind_name + " requires k");
  if (c.replicas < 1) throw ConfigError("replicas must be >= 1");

  if (is_critical_kind(c.kind)) {
    if (p.regime() != Regime::Critical) throw ConfigError(kind_name + " requires p = 0.75");
  } else if (c.kind == ExperimentKind::MartingaleDiagnostics) {
    if (p.regime() == Regime::Superdiffusive) {
      throw ConfigError("MartingaleDiagnostics requires p <= 0.75");
    }
  } else if (c.kind != ExperimentKind::TrajectoryFigure) {
    if (p.regime() != Regime::Diffusive) throw ConfigError(kind_name + " requires p < 0.75");
  }

  if (needs_cap(c.kind)) {
    if (!c.cap) throw ConfigError(kind_name + " requires cap");
  } else if (!c.n) {
    throw ConfigError(kind_name + " requires n");
  }
  if (c.n && *c.n < 1 && c.kind != ExperimentKind::TrajectoryFigure) {
    throw ConfigError("n must be >= 1");
  }

  const std::uint64_t k = c.k->resolve(p, c.n);
  if (needs_cap(c.kind)) {
    if (k < 1) throw ConfigError("return-time experiments need a training length k >= 1");
    if (*c.cap <= k) throw ConfigError("cap must exceed k");
    if (*c.cap > kMaxSteps) throw ConfigError("cap exceeds the step limit");
    if (!(c.window.q_lo >= 0.0 && c.window.q_lo < c.window.q_hi && c.window.q_hi < 1.0)) {
      throw ConfigError("window must satisfy 0 <= q_lo < q_hi < 1");
    }
  }
  if (c.n && *c.n > kMaxSteps / 2) throw ConfigError("n exceeds the step limit");

  const auto times = effective_times(c);
  switch (c.kind) {
    case ExperimentKind::ScalingMarginals:
    case ExperimentKind::ScalingMarginalsCritical: {
      if (times.empty()) throw ConfigError("checkpoint_times must be nonempty");
      for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] > 0.0)) throw ConfigError("checkpoint times must be positive");
        if (i > 0 && !(times[i] > times[i - 1])) {
          throw ConfigError("checkpoint times must be strictly increasing");
        }
      }
      stats::MarginalSpec spec{p, static_cast<double>(*c.n), times, k > 0, 1e-3};
      const auto steps = stats::marginal_steps(spec);
      if (steps.front() < k) throw ConfigError("first checkpoint precedes the training");
      for (std::size_t i = 1; i < steps.size(); ++i) {
        if (steps[i] <= steps[i - 1]) {
          throw ConfigError("checkpoint times collapse onto the same step");
        }
      }
      break;
    }
    case ExperimentKind::OvertrainedClt:
    case ExperimentKind::OvertrainedCltCritical:
      if (*c.n <= k) throw ConfigError("n must exceed k");
      break;
    case ExperimentKind::MartingaleDiagnostics:
      if (k < 1) throw ConfigError("MartingaleDiagnostics needs k >= 1");
      for (const double t : times) {
        if (!(t > 0.0 && t <= 1.0)) throw ConfigError("diagnostic times must lie in (0, 1]");
      }
      break;
    case ExperimentKind::EarlyReturnProbe:
      if (k < 1) throw ConfigError("EarlyReturnProbe needs k >= 1");
      if (times.empty()) throw ConfigError("eps grid must be nonempty");
      for (const double e : times) {
        if (!(e > 0.0)) throw ConfigError("eps values must be positive");
      }
      break;
    case ExperimentKind::TrajectoryFigure:
      if (c.replicas != 1) throw ConfigError("TrajectoryFigure runs exactly one replica");
      break;
    default:
      break;
  }
}

std::uint64_t resolved_k(const ExperimentConfig& c) {
  return c.k->resolve(MemoryParam(*c.p), c.n);
}

}  // namespace erw::harness
