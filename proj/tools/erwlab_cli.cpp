#include "erwlab_cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "erw/config.hpp"
#include "erw/experiment.hpp"
#include "erw/limit_laws.hpp"
#include "erw/persist.hpp"
#include "erw/stats.hpp"
#include "json.hpp"

namespace erw::cli {
namespace {

namespace fs = std::filesystem;
using harness::ConfigMap;
using harness::ExperimentKind;

enum class Family { Trajectory, ReturnTimes, Scaling, Clt, Diagnose, Probe };

// Flags of one experiment subcommand, keyed by config field.
struct ExperimentCommand {
  Family family;
  CLI::App* app = nullptr;
  std::string config_path;
  ConfigMap flags;
  std::vector<std::pair<std::string, std::string>> flag_names;  // key, flag
  ConfigMap defaults;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());

  void add(const std::string& key, const std::string& flag, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { flags[key] = v; }, help);
    flag_names.emplace_back(key, flag);
  }

  std::string flag_for(const std::string& key) const {
    for (const auto& [k, f] : flag_names) {
      if (k == key) return f;
    }
    return key;
  }
};

bool is_critical_p(const ConfigMap& map) {
  const auto it = map.find("p");
  if (it == map.end()) return false;
  try {
    return std::stod(it->second) == 0.75;
  } catch (const std::exception&) {
    return false;
  }
}

ExperimentKind kind_for(Family family, const ConfigMap& map) {
  const bool critical = is_critical_p(map);
  switch (family) {
    case Family::Trajectory:
      return ExperimentKind::TrajectoryFigure;
    case Family::ReturnTimes:
      return critical ? ExperimentKind::ReturnTimeCritical : ExperimentKind::ReturnTimeDiffusive;
    case Family::Scaling:
      return critical ? ExperimentKind::ScalingMarginalsCritical
                      : ExperimentKind::ScalingMarginals;
    case Family::Clt:
      return critical ? ExperimentKind::OvertrainedCltCritical : ExperimentKind::OvertrainedClt;
    case Family::Diagnose:
      return ExperimentKind::MartingaleDiagnostics;
    case Family::Probe:
      return ExperimentKind::EarlyReturnProbe;
  }
  return ExperimentKind::TrajectoryFigure;
}

harness::ExperimentConfig resolve_config(const ExperimentCommand& cmd, std::ostream& err) {
  ConfigMap map;
  if (!cmd.config_path.empty()) map = harness::read_config_file(cmd.config_path);
  for (const auto& [key, value] : cmd.flags) {
    const auto it = map.find(key);
    if (it != map.end() && it->second != value) {
      err << "[erwlab] notice: " << cmd.flag_for(key) << " " << value
          << " overrides config value " << key << "=" << it->second << '\n';
    }
    map[key] = value;
  }
  for (const auto& [key, value] : cmd.defaults) map.try_emplace(key, value);

  const auto kind = std::string(harness::to_string(kind_for(cmd.family, map)));
  const auto it = map.find("kind");
  if (it != map.end() && it->second != kind) {
    err << "[erwlab] notice: subcommand " << cmd.app->get_name() << " runs " << kind
        << "; config kind=" << it->second << " ignored\n";
  }
  map["kind"] = kind;

  std::vector<std::string> notices;
  auto config = harness::config_from_map(map, &notices);
  for (const auto& n : notices) err << "[erwlab] notice: " << n << '\n';
  return config;
}

int run_experiment(const ExperimentCommand& cmd, std::ostream& out, std::ostream& err,
                   const std::atomic<bool>* abort) {
  const auto config = resolve_config(cmd, err);
  harness::RunOptions options;
  options.workers = cmd.workers;
  options.abort = abort;
  options.log = &err;
  const auto summary = harness::run(config, options);
  out << summary.summary_path << '\n';
  if (summary.aborted) {
    err << "[erwlab] aborted; partial summary written\n";
    return kError;
  }
  return summary.over_censored ? kOverCensored : kOk;
}

// "a,b,c", "(a,b)", "lo..hi" or "lo..hi:count".
std::vector<double> parse_grid(std::string text) {
  text.erase(std::remove_if(text.begin(), text.end(),
                            [](char c) { return c == '(' || c == ')' || c == ' '; }),
             text.end());
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    auto grid = harness::parse_real_list(text);
    if (grid.empty()) throw std::invalid_argument("empty grid");
    return grid;
  }
  std::size_t count = 100;
  std::string hi_text = text.substr(dots + 2);
  if (const auto colon = hi_text.find(':'); colon != std::string::npos) {
    count = harness::parse_count(hi_text.substr(colon + 1));
    hi_text = hi_text.substr(0, colon);
  }
  const double lo = std::stod(text.substr(0, dots));
  const double hi = std::stod(hi_text);
  if (count < 2 || !(hi > lo)) throw std::invalid_argument("grid needs lo < hi and count >= 2");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

fs::path prepare_out(const std::string& dir) {
  const fs::path root(dir.empty() ? "." : dir);
  fs::create_directories(root);
  return root;
}

struct LawsCommand {
  std::string law;
  std::optional<double> p;
  std::string grid = "0.1..10";
  std::string out = ".";
};

int run_laws(const LawsCommand& cmd, std::ostream& out) {
  const auto grid = parse_grid(cmd.grid);
  std::ostringstream table;
  using harness::format_real;
  if (cmd.law == "nrbm-cov") {
    if (!cmd.p) throw std::invalid_argument("nrbm-cov requires --p");
    const MemoryParam p(*cmd.p);
    table << "s,t,cov\n";
    for (const double s : grid) {
      for (const double t : grid) {
        table << format_real(s) << ',' << format_real(t) << ','
              << format_real(laws::nrbm_cov(p, s, t)) << '\n';
      }
    }
  } else {
    std::unique_ptr<laws::DiffusiveReturnLaw> diffusive;
    if (cmd.law == "diffusive-return") {
      if (!cmd.p) throw std::invalid_argument("diffusive-return requires --p");
      diffusive = std::make_unique<laws::DiffusiveReturnLaw>(MemoryParam(*cmd.p));
    }
    table << "x,pdf,cdf\n";
    for (const double x : grid) {
      const double pdf = diffusive ? diffusive->pdf(x) : laws::stable_half_pdf(x);
      const double cdf = diffusive ? diffusive->cdf(x) : laws::stable_half_cdf(x);
      table << format_real(x) << ',' << format_real(pdf) << ',' << format_real(cdf) << '\n';
    }
  }
  const auto path = prepare_out(cmd.out) / ("laws_" + cmd.law + ".csv");
  std::ofstream file(path, std::ios::binary);
  if (!(file << table.str())) throw std::runtime_error("cannot write " + path.string());
  out << path.string() << '\n';
  return kOk;
}

struct KsCommand {
  std::string samples;
  std::string law;
  std::optional<double> p;
  std::optional<double> k;
  double variance = 1.0;
  std::string window = "0.05,0.80";
  std::string out = ".";
};

int run_ks(const KsCommand& cmd, std::ostream& out) {
  std::ifstream in(cmd.samples, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + cmd.samples);
  std::string line;
  if (!std::getline(in, line) || line != "replica,value,censored,steps") {
    throw std::runtime_error("unexpected sample header in " + cmd.samples);
  }

  std::unique_ptr<laws::ContinuousLaw> law;
  std::function<double(double)> transform = [](double x) { return x; };
  const auto need_k = [&] {
    if (!cmd.k || !(*cmd.k >= 1.0)) throw std::invalid_argument(cmd.law + " requires --k >= 1");
    return *cmd.k;
  };
  if (cmd.law == "stable-half") {
    law = std::make_unique<laws::StableHalfLaw>();
    const double k = need_k();
    transform = [k](double t) { return t / (k * k); };
  } else if (cmd.law == "diffusive-return") {
    if (!cmd.p) throw std::invalid_argument("diffusive-return requires --p");
    const MemoryParam p(*cmd.p);
    law = std::make_unique<laws::DiffusiveReturnLaw>(p);
    const double f = std::pow(need_k(), -laws::return_exponent(p));
    transform = [f](double t) { return t * f; };
  } else if (cmd.law == "critical-return") {
    law = std::make_unique<laws::CriticalReturnLaw>();
    const double k = need_k();
    transform = [k](double t) { return std::log(t) / k; };
  } else {
    law = std::make_unique<laws::GaussianLimit>(0.0, std::sqrt(cmd.variance));
  }

  std::vector<double> xs;
  std::size_t censored = 0;
  std::optional<double> censor_point;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string replica, value, cens;
    if (!std::getline(row, replica, ',') || !std::getline(row, value, ',') ||
        !std::getline(row, cens, ',')) {
      throw std::runtime_error("malformed sample row: " + line);
    }
    const double x = transform(std::stod(value));
    if (cens == "1") {
      ++censored;
      censor_point = censor_point ? std::min(*censor_point, x) : x;
    } else {
      xs.push_back(x);
    }
  }
  const auto w = harness::parse_real_list(cmd.window);
  if (w.size() != 2) throw std::invalid_argument("--window needs q_lo,q_hi");
  const auto emp = stats::ecdf(std::move(xs), censored, censor_point);
  const auto gof = stats::ks_test(emp, *law, {w[0], w[1]});

  nlohmann::ordered_json j{{"law", law->name()},
                           {"samples", cmd.samples},
                           {"replicas", emp.n_total()},
                           {"censored", emp.n_censored()},
                           {"ks_distance", gof.ks_distance},
                           {"ks_pvalue", gof.ks_pvalue},
                           {"window", {gof.window.q_lo, gof.window.q_hi}},
                           {"clipped", gof.clipped},
                           {"points_in_window", gof.points}};
  const auto path = prepare_out(cmd.out) / "ks.json";
  std::ofstream file(path, std::ios::binary);
  if (!(file << j.dump(2) << '\n')) throw std::runtime_error("cannot write " + path.string());
  out << path.string() << '\n';
  return kOk;
}

ExperimentCommand& experiment(std::vector<std::unique_ptr<ExperimentCommand>>& cmds,
                              CLI::App& app, Family family, const std::string& name,
                              const std::string& help) {
  auto cmd = std::make_unique<ExperimentCommand>();
  cmd->family = family;
  cmd->app = app.add_subcommand(name, help);
  cmd->app->add_option("--config", cmd->config_path,
                       "key=value config file; flags override its entries")
      ->check(CLI::ExistingFile);
  cmd->add("p", "--p", "memory parameter in [0, 1]");
  cmd->add("seed", "--seed", "master seed");
  cmd->add("output_dir", "--out", "output directory");
  cmds.push_back(std::move(cmd));
  return *cmds.back();
}

void add_run_flags(ExperimentCommand& cmd) {
  cmd.add("k", "--k", "training length: integer, CriticalPhase, PowerRule(x) or LogRule");
  cmd.add("replicas", "--replicas", "number of replicas (scientific notation accepted)");
  cmd.app->add_option("--workers", cmd.workers, "worker threads")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const std::atomic<bool>* abort) {
  CLI::App app{"Monte Carlo laboratory for trained elephant random walks", "erwlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(harness::version()));

  std::vector<std::unique_ptr<ExperimentCommand>> cmds;

  auto& simulate = experiment(cmds, app, Family::Trajectory, "simulate",
                              "write (n, S(n)) for one trajectory");
  simulate.add("k", "--k", "training length (all +1 steps)");
  simulate.add("n", "--steps", "total trajectory length");
  simulate.defaults = {{"k", "0"}, {"n", "50000"}, {"replicas", "1"}};

  auto& returns = experiment(cmds, app, Family::ReturnTimes, "return-times",
                             "first return times against the limit law");
  add_run_flags(returns);
  returns.add("cap", "--cap", "censoring cap on the return time");
  returns.add("window", "--window", "KS window as quantile levels q_lo,q_hi");
  returns.defaults = {{"cap", "10000000"}};

  auto& scaling = experiment(cmds, app, Family::Scaling, "scaling",
                             "marginals of the rescaled walk");
  add_run_flags(scaling);
  scaling.add("n", "--n", "horizon n");
  scaling.add("checkpoint_times", "--times", "comma-separated times t");
  scaling.defaults = {{"k", "CriticalPhase"}, {"n", "1000000"}};

  auto& clt = experiment(cmds, app, Family::Clt, "clt", "overtrained central limit theorem");
  add_run_flags(clt);
  clt.add("n", "--n", "horizon n");
  clt.defaults = {{"k", "PowerRule(0.55)"}, {"n", "1000000"}};

  auto& diagnose = experiment(cmds, app, Family::Diagnose, "diagnose",
                              "martingale, increment-bound and quadratic-variation checks");
  add_run_flags(diagnose);
  diagnose.add("n", "--n", "steps after training");
  diagnose.add("checkpoint_times", "--times", "comma-separated times t in (0, 1]");
  diagnose.defaults = {{"k", "CriticalPhase"}, {"n", "1000000"}, {"replicas", "200"}};

  auto& probe = experiment(cmds, app, Family::Probe, "probe", "early-return probabilities");
  add_run_flags(probe);
  probe.add("n", "--n", "horizon scale n");
  probe.add("checkpoint_times", "--eps", "comma-separated eps grid");
  probe.defaults = {{"k", "CriticalPhase"}, {"n", "1000000"}};

  LawsCommand laws_cmd;
  auto* laws_app = app.add_subcommand("laws", "tabulate a limit law for plotting");
  laws_app
      ->add_option("--law", laws_cmd.law, "stable-half, diffusive-return, critical-return, nrbm-cov")
      ->required()
      ->check(CLI::IsMember({"stable-half", "diffusive-return", "critical-return", "nrbm-cov"}));
  laws_app->add_option("--p", laws_cmd.p, "memory parameter");
  laws_app->add_option("--grid", laws_cmd.grid, "a,b,c or lo..hi[:count]")
      ->capture_default_str();
  laws_app->add_option("--out", laws_cmd.out, "output directory")->capture_default_str();

  KsCommand ks_cmd;
  auto* ks_app = app.add_subcommand("ks", "KS distance of a sample file against a law");
  ks_app->add_option("--samples", ks_cmd.samples, "samples.csv from an experiment")
      ->required()
      ->check(CLI::ExistingFile);
  ks_app
      ->add_option("--law", ks_cmd.law, "stable-half, diffusive-return, critical-return, normal")
      ->required()
      ->check(CLI::IsMember({"stable-half", "diffusive-return", "critical-return", "normal"}));
  ks_app->add_option("--p", ks_cmd.p, "memory parameter");
  ks_app->add_option("--k", ks_cmd.k, "training length used to rescale times");
  ks_app->add_option("--variance", ks_cmd.variance, "variance of the normal law")
      ->capture_default_str();
  ks_app->add_option("--window", ks_cmd.window, "quantile window q_lo,q_hi")
      ->capture_default_str();
  ks_app->add_option("--out", ks_cmd.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (laws_app->parsed()) return run_laws(laws_cmd, out);
    if (ks_app->parsed()) return run_ks(ks_cmd, out);
    for (const auto& cmd : cmds) {
      if (cmd->app->parsed()) return run_experiment(*cmd, out, err, abort);
    }
  } catch (const std::exception& e) {
    err << "erwlab: error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace erw::cli
