#ifndef ERW_STATS_HPP_
#define ERW_STATS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "erw/limit_laws.hpp"
#include "erw/walk.hpp"

namespace erw::stats {

/// Sorted uncensored samples plus the mass censored at `censor_point`.
class EmpiricalDistribution {
 public:
  std::span<const double> sorted_samples() const noexcept { return sorted_; }
  std::size_t n_total() const noexcept { return n_total_; }
  std::size_t n_censored() const noexcept { return n_censored_; }
  std::optional<double> censor_point() const noexcept { return censor_point_; }

  /// Right-continuous ECDF, #{x_i <= x} / n_total.
  double operator()(double x) const noexcept;
  /// Left limit, #{x_i < x} / n_total.
  double left_limit(double x) const noexcept;

 private:
  friend EmpiricalDistribution ecdf(std::vector<double>, std::size_t,
                                    std::optional<double>);
  std::vector<double> sorted_;
  std::size_t n_total_ = 0;
  std::size_t n_censored_ = 0;
  std::optional<double> censor_point_;
};

/// Builds an ECDF from uncensored samples and a count of samples censored at
/// `censor_point`. Throws std::invalid_argument when there are no samples at
/// all, when censored mass has no censor point, or when a retained sample
/// lies above the censor point.
EmpiricalDistribution ecdf(std::vector<double> uncensored,
                           std::size_t n_censored = 0,
                           std::optional<double> censor_point = std::nullopt);

/// Quantile-level bounds of a KS comparison.
struct Window {
  double q_lo = 0.05;
  double q_hi = 0.80;
};

struct GofReport {
  double ks_distance = 0.0;
  double ks_pvalue = 1.0;
  Window window;
  double t_lo = 0.0;            // law quantile at q_lo
  double t_hi = 0.0;            // law quantile at q_hi, or the censor point
  bool clipped = false;         // upper edge lowered to the censor point
  std::size_t n_effective = 0;  // sample size used for the p-value
  std::size_t points = 0;       // sample points inside the window
};

/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_pvalue(double lambda);

/// sup |ECDF - F| over sample points inside the window. When censoring is
/// present the upper edge is lowered to just below the censor point, so no
/// censored or above-cap value is read. Throws when the window holds no
/// sample. The p-value is indicative only for proper sub-windows.
GofReport ks_test(const EmpiricalDistribution& emp, const laws::ContinuousLaw& law,
                  Window window = {});

/// Mean and spread of a sample with standard errors.
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;  // unbiased
  double variance_se = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments describe(std::span<const double> xs);

struct MarginalPoint {
  double t = 0.0;
  std::uint64_t step = 0;
  Moments moments;
  double theory_mean = 0.0;
  double theory_variance = 0.0;
};

struct MarginalReport {
  std::vector<MarginalPoint> points;
  std::vector<std::vector<double>> covariance;
  std::vector<std::vector<double>> covariance_se;
  std::vector<std::vector<double>> theory_covariance;
  std::vector<std::string> warnings;
};

struct MarginalSpec {
  MemoryParam p{0.5};
  double n = 0.0;
  std::vector<double> t;     // reparametrized times
  bool trained = true;       // compare against the trained drift, else 0
  double epsilon = 1e-3;     // smallest admissible t
};

/// Step index of each reparametrized time: floor(n t) in the diffusive
/// regime, floor(n^t) at p = 3/4.
std::vector<std::uint64_t> marginal_steps(const MarginalSpec& spec);

/// Moments of S(floor(nt))/sqrt(n) (diffusive) or
/// S(floor(n^t))/sqrt(n^t log n) (critical) next to the limit process.
/// `positions[r][i]` is replica r at marginal_steps(spec)[i]. Throws for
/// t < epsilon or superdiffusive p.
MarginalReport marginal_report(const std::vector<std::vector<std::int64_t>>& positions,
                               const MarginalSpec& spec);

struct NormalityReport {
  GofReport gof;
  Moments moments;
  double target_variance = 1.0;
};

/// KS over the full range against N(0, target_variance) plus moments.
NormalityReport normality_report(std::span<const double> standardized,
                                 double target_variance = 1.0);

}  // namespace erw::stats

#endif  // ERW_STATS_HPP_
