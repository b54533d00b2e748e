#include "erw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace erw::stats {

double EmpiricalDistribution::operator()(double x) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(n_total_);
}

double EmpiricalDistribution::left_limit(double x) const noexcept {
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(n_total_);
}

EmpiricalDistribution ecdf(std::vector<double> uncensored, std::size_t n_censored,
                           std::optional<double> censor_point) {
  if (uncensored.empty() && n_censored == 0) {
    throw std::invalid_argument("empirical distribution needs at least one sample");
  }
  if (n_censored > 0 && !censor_point) {
    throw std::invalid_argument("censored samples require a censor point");
  }
  for (const double x : uncensored) {
    if (std::isnan(x)) throw std::invalid_argument("NaN sample");
  }
  std::sort(uncensored.begin(), uncensored.end());
  if (censor_point && !uncensored.empty() && uncensored.back() > *censor_point) {
    throw std::invalid_argument("retained sample above the censor point");
  }
  EmpiricalDistribution out;
  out.n_total_ = uncensored.size() + n_censored;
  out.n_censored_ = n_censored;
  out.censor_point_ = censor_point;
  out.sorted_ = std::move(uncensored);
  return out;
}

double kolmogorov_pvalue(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.0) {
    // P(K <= lambda) = sqrt(2 pi)/lambda * sum exp(-(2j-1)^2 pi^2 / (8 lambda^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double sum = 0.0;
    for (int j = 1; j < 100; ++j) {
      const double odd = 2.0 * j - 1.0;
      const double term = std::exp(-odd * odd * c);
      sum += term;
      if (term < 1e-17) break;
    }
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-10) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

GofReport ks_test(const EmpiricalDistribution& emp, const laws::ContinuousLaw& law,
                  Window window) {
  if (!(window.q_lo >= 0.0 && window.q_lo < window.q_hi && window.q_hi <= 1.0)) {
    throw std::invalid_argument("window must satisfy 0 <= q_lo < q_hi <= 1");
  }
  GofReport report;
  report.window = window;
  report.n_effective = emp.n_total();
  report.t_lo = window.q_lo > 0.0 ? law.quantile(window.q_lo)
                                  : -std::numeric_limits<double>::infinity();
  report.t_hi = window.q_hi < 1.0 ? law.quantile(window.q_hi)
                                  : std::numeric_limits<double>::infinity();
  bool exclusive_hi = false;
  if (emp.n_censored() > 0 && report.t_hi >= *emp.censor_point()) {
    report.t_hi = *emp.censor_point();
    report.clipped = true;
    exclusive_hi = true;
  }

  const auto xs = emp.sorted_samples();
  const auto first = std::lower_bound(xs.begin(), xs.end(), report.t_lo);
  const auto last = exclusive_hi ? std::lower_bound(first, xs.end(), report.t_hi)
                                 : std::upper_bound(first, xs.end(), report.t_hi);
  if (first == last) throw std::invalid_argument("window excludes all samples");

  const double total = static_cast<double>(emp.n_total());
  double d = 0.0;
  for (auto it = first; it != last;) {
    const double x = *it;
    const auto below = static_cast<double>(it - xs.begin());
    const auto tie_end = std::upper_bound(it, xs.end(), x);
    const auto upto = static_cast<double>(tie_end - xs.begin());
    const double f = law.cdf(x);
    d = std::max({d, std::abs(upto / total - f), std::abs(below / total - f)});
    report.points += static_cast<std::size_t>(tie_end - it);
    it = std::min(tie_end, last);
  }
  report.ks_distance = d;
  report.ks_pvalue = kolmogorov_pvalue(std::sqrt(total) * d);
  return report;
}

Moments describe(std::span<const double> xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (const double x : xs) sum += x;
  m.mean = sum / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (const double x : xs) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (xs.size() > 1) {
    m.variance = m2 * n / (n - 1.0);
    m.mean_se = std::sqrt(m.variance / n);
    m.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  }
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

std::vector<std::uint64_t> marginal_steps(const MarginalSpec& spec) {
  std::vector<std::uint64_t> steps;
  steps.reserve(spec.t.size());
  const bool critical = spec.p.regime() == Regime::Critical;
  for (const double t : spec.t) {
    const double x = critical ? std::pow(spec.n, t) : spec.n * t;
    steps.push_back(static_cast<std::uint64_t>(std::floor(x)));
  }
  return steps;
}

MarginalReport marginal_report(const std::vector<std::vector<std::int64_t>>& positions,
                               const MarginalSpec& spec) {
  const Regime regime = spec.p.regime();
  if (regime == Regime::Superdiffusive) {
    throw std::invalid_argument("no Gaussian scaling limit for p > 3/4");
  }
  if (!(spec.n > 1.0)) throw std::invalid_argument("n must exceed 1");
  for (const double t : spec.t) {
    if (!(t >= spec.epsilon)) {
      throw std::invalid_argument("marginal time below the configured epsilon");
    }
  }
  const std::size_t m = spec.t.size();
  const std::size_t reps = positions.size();
  if (reps < 2) throw std::invalid_argument("need at least two replicas");
  for (const auto& row : positions) {
    if (row.size() != m) throw std::invalid_argument("replica row has wrong length");
  }

  MarginalReport report;
  if (reps < 1000) report.warnings.emplace_back("fewer than 1000 replicas");

  const bool critical = regime == Regime::Critical;
  const auto steps = marginal_steps(spec);
  std::vector<double> scale(m);
  for (std::size_t i = 0; i < m; ++i) {
    scale[i] = critical ? std::sqrt(std::pow(spec.n, spec.t[i]) * std::log(spec.n))
                        : std::sqrt(spec.n);
  }

  std::vector<std::vector<double>> cols(m, std::vector<double>(reps));
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < m; ++i) {
      cols[i][r] = static_cast<double>(positions[r][i]) / scale[i];
    }
  }

  auto theory_cov = [&](double s, double t) {
    return critical ? std::min(s, t) : laws::nrbm_cov(spec.p, s, t);
  };

  for (std::size_t i = 0; i < m; ++i) {
    MarginalPoint pt;
    pt.t = spec.t[i];
    pt.step = steps[i];
    pt.moments = describe(cols[i]);
    pt.theory_mean = !spec.trained ? 0.0
                     : critical    ? 1.0
                                   : laws::trained_limit_mean(spec.p, spec.t[i]);
    pt.theory_variance = theory_cov(spec.t[i], spec.t[i]);
    report.points.push_back(pt);
  }

  const double n = static_cast<double>(reps);
  report.covariance.assign(m, std::vector<double>(m));
  report.covariance_se.assign(m, std::vector<double>(m));
  report.theory_covariance.assign(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double mi = report.points[i].moments.mean;
      const double mj = report.points[j].moments.mean;
      double s1 = 0.0;
      double s2 = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double prod = (cols[i][r] - mi) * (cols[j][r] - mj);
        s1 += prod;
        s2 += prod * prod;
      }
      const double mean_prod = s1 / n;
      report.covariance[i][j] = s1 / (n - 1.0);
      report.covariance_se[i][j] =
          std::sqrt(std::max(0.0, s2 / n - mean_prod * mean_prod) / n);
      report.theory_covariance[i][j] = theory_cov(spec.t[i], spec.t[j]);
    }
  }
  return report;
}

NormalityReport normality_report(std::span<const double> standardized,
                                 double target_variance) {
  if (standardized.empty()) throw std::invalid_argument("no samples");
  NormalityReport out;
  out.target_variance = target_variance;
  out.moments = describe(standardized);
  const laws::GaussianLimit law(0.0, std::sqrt(target_variance));
  const auto emp = ecdf({standardized.begin(), standardized.end()});
  out.gof = ks_test(emp, law, Window{0.0, 1.0});
  return out;
}

}  // namespace erw::stats
