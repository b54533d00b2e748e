#ifndef ERW_LIMIT_LAWS_HPP_
#define ERW_LIMIT_LAWS_HPP_

// Closed-form limit distributions and scaling constants for trained
// elephant random walks. Every function is pure and throws
// std::invalid_argument outside its stated domain.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace erw::laws {

// ---------------------------------------------------------------------------
// Stable(1/2) (Levy) law: density (2 pi t^3)^{-1/2} exp(-1/(2t)) on t > 0.

/// 0 for t <= 0.
double stable_half_pdf(double t);

/// erfc(1 / sqrt(2t)) = 2 (1 - Phi(1 / sqrt t)); 0 for t <= 0.
double stable_half_cdf(double t);

/// erf(1 / sqrt(2t)), accurate in the heavy upper tail.
double stable_half_sf(double t);

/// 1 / (2 erfcinv(u)^2). Throws for u outside (0, 1).
double stable_half_quantile(double u);

// ---------------------------------------------------------------------------
// First-return laws.

/// P(X <= x) for X = (3-4p)^{1/(3-4p)} tau^{1/(3-4p)}, the limit of
/// k^{-(4-4p)/(3-4p)} T. Throws for p >= 3/4 ("use critical law").
double diffusive_return_cdf(MemoryParam p, double x);
double diffusive_return_quantile(MemoryParam p, double u);

/// Limit law of log(T) / k at p = 3/4: Stable(1/2).
double critical_return_cdf(double x);

/// Training length at which the head start stays visible at time n:
/// (3-4p)^{-1/(4-4p)} n^{(3-4p)/(4-4p)}. Diffusive only.
double critical_training_k(MemoryParam p, double n);

/// log n, the critical-regime counterpart. Requires n >= 1.
double critical_training_k_critical(double n);

/// r(k) = (3-4p)^{1/(3-4p)} k^{(4-4p)/(3-4p)}.
double return_scale(MemoryParam p, double k);

/// Exponent (4-4p)/(3-4p) such that k^{-exponent} T converges.
double return_exponent(MemoryParam p);

// ---------------------------------------------------------------------------
// Scaling limits.

/// t^{2p-1} / sqrt(3-4p), the drift left by critical-phase training. At
/// t = 0 the correction diverges for p < 1/2 and the call throws.
double trained_limit_mean(MemoryParam p, double t);

/// Covariance of noise-reinforced Brownian motion,
/// t^{2p-1} s^{2-2p} / (3-4p) for s <= t, symmetric otherwise.
double nrbm_cov(MemoryParam p, double s, double t);

/// One draw of (B(t_1), ..., B(t_m)) for noise-reinforced Brownian motion.
/// The covariance gets +1e-12 on the diagonal before the Cholesky
/// factorization; throws std::runtime_error if it still fails.
std::vector<double> nrbm_sample_grid(MemoryParam p, std::span<const double> grid,
                                     Xoshiro256pp& rng);

/// k^{2-2p} / n^{1-2p}, centering of S(n) for an overtrained walk.
double overtrained_center(MemoryParam p, double n, double k);

/// sqrt(n k), centering at p = 3/4.
double overtrained_center_critical(double n, double k);

/// Human-readable notes when (n, k) are outside the asymptotic regime of the
/// overtrained limits. Empty when the regime holds.
std::vector<std::string> overtrained_regime_warnings(MemoryParam p, double n,
                                                     double k);

/// 1 / sqrt(3-4p), the iterated-logarithm constant of the limit process.
double lil_constant(MemoryParam p);

// ---------------------------------------------------------------------------
// Law objects for goodness-of-fit comparisons.

class ContinuousLaw {
 public:
  virtual ~ContinuousLaw() = default;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double u) const = 0;
  virtual std::string name() const = 0;
};

class StableHalfLaw final : public ContinuousLaw {
 public:
  double cdf(double x) const override { return stable_half_cdf(x); }
  double quantile(double u) const override { return stable_half_quantile(u); }
  double pdf(double x) const { return stable_half_pdf(x); }
  std::string name() const override { return "stable-half"; }
};

class DiffusiveReturnLaw final : public ContinuousLaw {
 public:
  /// Throws for p >= 3/4.
  explicit DiffusiveReturnLaw(MemoryParam p);
  double cdf(double x) const override { return diffusive_return_cdf(p_, x); }
  double quantile(double u) const override {
    return diffusive_return_quantile(p_, u);
  }
  double pdf(double x) const;
  std::string name() const override;

 private:
  MemoryParam p_;
};

class CriticalReturnLaw final : public ContinuousLaw {
 public:
  double cdf(double x) const override { return critical_return_cdf(x); }
  double quantile(double u) const override { return stable_half_quantile(u); }
  std::string name() const override { return "critical-return"; }
};

/// Finite-k approximation of the rescaled return time. The martingale
/// a_n S(n) starts at a_k k and its clock runs as sum a_m^2, so
/// T^{3-4p} ~ k^{3-4p} + (3-4p) (a_k k)^2 tau (diffusive) and
/// log T ~ log k + (a_k k)^2 tau (p = 3/4), tau ~ Stable(1/2). Works on the
/// same axis as DiffusiveReturnLaw / CriticalReturnLaw for that k and
/// approaches them as k grows.
class FiniteKReturnLaw final : public ContinuousLaw {
 public:
  /// Throws for p > 3/4 or k < 1.
  FiniteKReturnLaw(MemoryParam p, std::uint64_t k);
  double cdf(double x) const override;
  double quantile(double u) const override;
  std::string name() const override;

 private:
  double time_of(double x) const;  // scaled axis -> T
  double axis_of(double t) const;  // T -> scaled axis
  MemoryParam p_;
  double k_;
  double start_sq_;  // (a_k k)^2
};

class GaussianLimit final : public ContinuousLaw {
 public:
  /// Throws for stdev <= 0.
  GaussianLimit(double center, double stdev);
  double center() const noexcept { return center_; }
  double stdev() const noexcept { return stdev_; }
  double cdf(double x) const override;
  double quantile(double u) const override;
  std::string name() const override;

 private:
  double center_;
  double stdev_;
};

class NrBMLaw {
 public:
  /// Throws for p >= 3/4.
  explicit NrBMLaw(MemoryParam p);
  double cov(double s, double t) const { return nrbm_cov(p_, s, t); }
  /// Mean of the trained limit B(t) + t^{2p-1}/sqrt(3-4p).
  double trained_mean(double t) const { return trained_limit_mean(p_, t); }
  std::vector<double> sample(std::span<const double> grid, Xoshiro256pp& rng) const {
    return nrbm_sample_grid(p_, grid, rng);
  }

 private:
  MemoryParam p_;
};

}  // namespace erw::laws

#endif  // ERW_LIMIT_LAWS_HPP_
