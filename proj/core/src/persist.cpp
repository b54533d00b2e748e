#include "erw/persist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "erw/limit_laws.hpp"
#include "json.hpp"

namespace erw::harness {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

ordered_json real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["kind"] = std::string(to_string(c.kind));
  j["p"] = c.p ? real(*c.p) : ordered_json();
  if (!c.k) {
    j["k"] = nullptr;
  } else if (c.k->type == TrainingRule::Type::Fixed) {
    j["k"] = c.k->fixed;
  } else {
    j["k"] = c.k->to_string();
  }
  j["n"] = c.n ? ordered_json(*c.n) : ordered_json();
  j["replicas"] = c.replicas;
  j["cap"] = c.cap ? ordered_json(*c.cap) : ordered_json();
  j["seed"] = c.seed;
  j["checkpoint_times"] = effective_times(c);
  j["window"] = {c.window.q_lo, c.window.q_hi};
  j["output_dir"] = c.output_dir;
  return j;
}

ordered_json moments_json(const stats::Moments& m) {
  return {{"count", m.count},
          {"mean", real(m.mean)},
          {"mean_se", real(m.mean_se)},
          {"variance", real(m.variance)},
          {"variance_se", real(m.variance_se)},
          {"skewness", real(m.skewness)},
          {"excess_kurtosis", real(m.excess_kurtosis)}};
}

ordered_json gof_json(const stats::GofReport& g) {
  return {{"ks_distance", real(g.ks_distance)},
          {"ks_pvalue", real(g.ks_pvalue)},
          {"window", {g.window.q_lo, g.window.q_hi}},
          {"t_lo", real(g.t_lo)},
          {"t_hi", real(g.t_hi)},
          {"clipped", g.clipped},
          {"replicas", g.n_effective},
          {"points_in_window", g.points}};
}

ordered_json matrix_json(const std::vector<std::vector<double>>& m) {
  ordered_json out = ordered_json::array();
  for (const auto& row : m) {
    ordered_json r = ordered_json::array();
    for (const double x : row) r.push_back(real(x));
    out.push_back(std::move(r));
  }
  return out;
}

struct ResultJson {
  std::uint64_t replicas;

  ordered_json operator()(std::monostate) const { return ordered_json::object(); }

  ordered_json operator()(const ReturnTimeResult& r) const {
    ordered_json j{{"law", r.law},
                   {"k", r.k},
                   {"replicas", replicas},
                   {"uncensored", r.n_uncensored},
                   {"scale_exponent", real(r.scale_exponent)},
                   {"censor_point", real(r.censor_point)},
                   {"empirical_median", real(r.empirical_median)},
                   {"law_median", real(r.law_median)}};
    j["gof"] = r.gof ? gof_json(*r.gof) : ordered_json();
    j["finite_k_law"] = r.finite_k_law;
    j["finite_k_gof"] = r.finite_k_gof ? gof_json(*r.finite_k_gof) : ordered_json();
    return j;
  }

  ordered_json operator()(const ScalingResult& r) const {
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.marginals.points) {
      pts.push_back({{"t", p.t},
                     {"step", p.step},
                     {"moments", moments_json(p.moments)},
                     {"theory_mean", real(p.theory_mean)},
                     {"theory_variance", real(p.theory_variance)}});
    }
    return {{"k", r.k},
            {"replicas", replicas},
            {"marginals", pts},
            {"covariance", matrix_json(r.marginals.covariance)},
            {"covariance_se", matrix_json(r.marginals.covariance_se)},
            {"theory_covariance", matrix_json(r.marginals.theory_covariance)}};
  }

  ordered_json operator()(const CltResult& r) const {
    return {{"k", r.k},
            {"replicas", replicas},
            {"center", real(r.center)},
            {"scale", real(r.scale)},
            {"target_variance", real(r.normality.target_variance)},
            {"moments", moments_json(r.normality.moments)},
            {"gof", gof_json(r.normality.gof)},
            {"regime_warnings", r.warnings}};
  }

  ordered_json operator()(const DiagnosticsResult& r) const {
    ordered_json cps = ordered_json::array();
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      cps.push_back({{"t", r.times[i]},
                     {"steps_after_k", r.steps[i]},
                     {"qv_ratio", moments_json(r.qv_ratio[i])},
                     {"normalized_martingale", moments_json(r.normalized[i])}});
    }
    ordered_json bins = ordered_json::array();
    for (const auto& b : r.conditional_mean) {
      bins.push_back({{"lo", b.lo},
                      {"hi", b.hi},
                      {"count", b.count},
                      {"mean", real(b.mean)},
                      {"standard_error", real(b.standard_error)}});
    }
    return {{"k", r.k},
            {"replicas", replicas},
            {"martingale", r.martingale == MartingaleKind::Critical ? "critical" : "diffusive"},
            {"checkpoints", cps},
            {"increment_bound",
             {{"violations", r.bound_violations},
              {"max_ratio", real(r.max_bound_ratio)},
              {"increments", r.increments_checked}}},
            {"identity_max_rel_error", real(r.identity_max_rel_error)},
            {"conditional_mean", bins}};
  }

  ordered_json operator()(const ProbeResult& r) const {
    ordered_json pts = ordered_json::array();
    for (const auto& p : r.points) {
      pts.push_back({{"eps", p.eps},
                     {"horizon", p.horizon},
                     {"probability", real(p.probability)},
                     {"standard_error", real(p.standard_error)},
                     {"replicas", p.replicas}});
    }
    return {{"k", r.k}, {"replicas", replicas}, {"points", pts}, {"monotone", r.monotone}};
  }

  ordered_json operator()(const TrajectoryResult& r) const {
    return {{"k", r.k},
            {"final_position", r.final_position},
            {"first_return", r.first_return ? ordered_json(r.first_return) : ordered_json()}};
  }
};

template <class Writer>
void write_file(const fs::path& path, Writer&& write) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    write(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
}

// Kind-specific table for plotting, or an empty name when there is none.
std::pair<std::string, std::string> plot_table(const ExperimentSummary& s) {
  const auto& c = s.config;
  std::ostringstream os;
  switch (c.kind) {
    case ExperimentKind::TrajectoryFigure: {
      os << "n,position\n";
      if (!s.records.empty()) {
        const auto& path = s.records.front().positions;
        for (std::size_t i = 0; i < path.size(); ++i) os << i + 1 << ',' << path[i] << '\n';
      }
      return {"trajectory.csv", os.str()};
    }
    case ExperimentKind::ReturnTimeDiffusive:
    case ExperimentKind::ReturnTimeCritical: {
      const auto* r = std::get_if<ReturnTimeResult>(&s.result);
      if (!r) return {};
      std::vector<double> xs;
      for (const auto& rec : s.records) {
        if (rec.censored) continue;
        const double t = rec.value;
        xs.push_back(r->scale_exponent > 0.0
                         ? t * std::pow(static_cast<double>(r->k), -r->scale_exponent)
                         : std::log(t) / static_cast<double>(r->k));
      }
      std::sort(xs.begin(), xs.end());
      os << "x,ecdf,law_cdf\n";
      const double total = static_cast<double>(s.records.size());
      const MemoryParam p(*c.p);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double law = c.kind == ExperimentKind::ReturnTimeCritical
                               ? laws::critical_return_cdf(xs[i])
                               : laws::diffusive_return_cdf(p, xs[i]);
        os << format_real(xs[i]) << ',' << format_real(static_cast<double>(i + 1) / total)
           << ',' << format_real(law) << '\n';
      }
      return {"ecdf.csv", os.str()};
    }
    case ExperimentKind::ScalingMarginals:
    case ExperimentKind::ScalingMarginalsCritical:
    case ExperimentKind::EarlyReturnProbe: {
      os << "replica,checkpoint,position,running_min\n";
      for (const auto& rec : s.records) {
        for (std::size_t i = 0; i < rec.positions.size(); ++i) {
          os << rec.replica << ',' << i << ',' << rec.positions[i] << ',';
          if (i < rec.running_min.size()) os << rec.running_min[i];
          os << '\n';
        }
      }
      return {"checkpoints.csv", os.str()};
    }
    default:
      return {};
  }
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_samples_csv(std::ostream& out, const ExperimentSummary& summary) {
  const bool integral = integer_valued(summary.config.kind);
  out << "replica,value,censored,steps\n";
  for (const auto& r : summary.records) {
    out << r.replica << ',';
    if (integral) {
      out << static_cast<std::int64_t>(r.value);
    } else {
      out << format_real(r.value);
    }
    out << ',' << (r.censored ? 1 : 0) << ',' << r.steps << '\n';
  }
}

std::string summary_json(const ExperimentSummary& s) {
  ordered_json j;
  j["config"] = config_json(s.config);
  j["results"] = std::visit(ResultJson{s.replicas_completed}, s.result);
  j["censoring_fraction"] = real(s.censoring_fraction);
  j["seed"] = s.config.seed;
  j["version"] = s.version;
  j["wall_seconds"] = real(s.wall_seconds);
  j["aborted"] = s.aborted;
  j["over_censored"] = s.over_censored;
  j["replicas_completed"] = s.replicas_completed;
  j["total_steps"] = s.total_steps;
  j["estimated_steps"] = real(s.estimated_steps);
  j["warnings"] = s.warnings;
  return j.dump(2) + "\n";
}

std::string write_outputs(const ExperimentSummary& summary, const std::string& dir) {
  const fs::path root(dir.empty() ? "." : dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create " + root.string() + ": " + ec.message());

  write_file(root / "samples.csv", [&](std::ostream& out) { write_samples_csv(out, summary); });
  const auto [name, table] = plot_table(summary);
  if (!name.empty()) write_file(root / name, [&](std::ostream& out) { out << table; });
  const fs::path path = root / "summary.json";
  write_file(path, [&](std::ostream& out) { out << summary_json(summary); });
  return path.string();
}

}  // namespace erw::harness
