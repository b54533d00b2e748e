#ifndef ERW_SPECIAL_HPP_
#define ERW_SPECIAL_HPP_

namespace erw::special {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile, Wichura's AS 241 (PPND16) followed by one
/// Halley correction. Throws std::domain_error outside (0, 1).
double normal_quantile(double u);

/// Inverse of std::erfc on (0, 2). Throws std::domain_error outside.
double erfc_inv(double y);

/// log(Gamma(x) / Gamma(x + b)) for x > 0 and x + b > 0. Large x uses the
/// Bernoulli-polynomial expansion so the difference keeps full relative
/// precision where lgamma(x) alone would cancel.
double log_gamma_ratio(double x, double b);

}  // namespace erw::special

#endif  // ERW_SPECIAL_HPP_
