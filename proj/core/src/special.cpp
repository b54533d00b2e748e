#include "erw/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace erw::special {
namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// AS 241 coefficients, lowest order first.
constexpr std::array<double, 8> kA = {
    3.3871328727963666080e0, 1.3314166789178437745e+2,
    1.9715909503065514427e+3, 1.3731693765509461125e+4,
    4.5921953931549871457e+4, 6.7265770927008700853e+4,
    3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr std::array<double, 8> kB = {
    1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2,
    5.3941960214247511077e+3, 2.1213794301586595867e+4,
    3.9307895800092710610e+4, 2.8729085735721942674e+4,
    5.2264952788528545610e+3};
constexpr std::array<double, 8> kC = {
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr std::array<double, 8> kD = {
    1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1,
    1.51986665636164571966e-2, 5.47593808499534494600e-4,
    1.05075007164441684324e-9};
constexpr std::array<double, 8> kE = {
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr std::array<double, 8> kF = {
    1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4,
    1.84631831751005468180e-5, 1.42151175831644588870e-7,
    2.04426310338993978564e-15};

double ppnd16(double u) {
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, r) / horner(kB, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(kC, r) / horner(kD, r);
  } else {
    r -= 5.0;
    x = horner(kE, r) / horner(kF, r);
  }
  return q < 0.0 ? -x : x;
}

// Bernoulli numbers B_0..B_16 (B_1 = -1/2).
constexpr std::array<double, 17> kBernoulli = {
    1.0,          -0.5,        1.0 / 6.0,     0.0, -1.0 / 30.0, 0.0,
    1.0 / 42.0,   0.0,         -1.0 / 30.0,   0.0, 5.0 / 66.0,  0.0,
    -691.0 / 2730.0, 0.0,      7.0 / 6.0,     0.0, -3617.0 / 510.0};

double bernoulli_poly(int k, double t) {
  double binom = 1.0;
  double acc = 0.0;
  for (int i = 0; i <= k; ++i) {
    acc += binom * kBernoulli[static_cast<std::size_t>(i)] * std::pow(t, k - i);
    binom = binom * (k - i) / (i + 1);
  }
  return acc;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("normal quantile requires u in (0, 1)");
  }
  double x = ppnd16(u);
  // One Halley step against the erfc-based CDF, done on the lower tail.
  const bool upper = u > 0.5;
  const double target = upper ? 1.0 - u : u;
  const double z = upper ? -x : x;
  const double e = normal_cdf(z) - target;
  const double t = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
  const double refined = z - t / (1.0 + 0.5 * z * t);
  if (std::isfinite(refined)) x = upper ? -refined : refined;
  return x;
}

double erfc_inv(double y) {
  if (!(y > 0.0 && y < 2.0)) {
    throw std::domain_error("erfc_inv requires y in (0, 2)");
  }
  double x = -ppnd16(0.5 * y) / std::numbers::sqrt2;
  for (int i = 0; i < 2; ++i) {
    const double f = std::erfc(x) - y;
    const double slope = -2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
    if (slope == 0.0) break;
    const double step = f / slope;
    const double next = x - step / (1.0 + x * step);
    if (!std::isfinite(next)) break;
    x = next;
  }
  return x;
}

double log_gamma_ratio(double x, double b) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma_ratio requires x > 0");
  const double y = x + b;
  if (y == 0.0) return -std::numeric_limits<double>::infinity();
  if (y < 0.0) throw std::domain_error("log_gamma_ratio requires x + b >= 0");
  if (b == 0.0) return 0.0;
  if (x < 20.0) return std::log(std::tgamma(x) / std::tgamma(y));

  double acc = -b * std::log(x);
  double xp = x;
  for (int k = 2; k <= 16; ++k) {
    const double term = (kBernoulli[static_cast<std::size_t>(k)] - bernoulli_poly(k, b)) /
                        (static_cast<double>(k) * (k - 1) * xp);
    acc += (k % 2 == 0) ? term : -term;
    xp *= x;
  }
  return acc;
}

}  // namespace erw::special
