#include "erw/limit_laws.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "erw/gamma_weights.hpp"
#include "erw/special.hpp"

namespace erw::laws {
namespace {

void require_diffusive(MemoryParam p, const char* what) {
  if (p.regime() != Regime::Diffusive) {
    throw std::invalid_argument(std::string(what) +
                                " requires p < 3/4; use critical law");
  }
}

void require_unit_open(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile level must lie in (0, 1)");
}

// (0, 1) uniform with 53 random bits, never exactly 0.
double open_uniform(Xoshiro256pp& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

double stable_half_pdf(double t) {
  if (!(t > 0.0)) return 0.0;
  return std::exp(-0.5 / t) / std::sqrt(2.0 * std::numbers::pi * t * t * t);
}

double stable_half_cdf(double t) {
  if (!(t > 0.0)) return 0.0;
  if (std::isinf(t)) return 1.0;
  return std::erfc(1.0 / std::sqrt(2.0 * t));
}

double stable_half_sf(double t) {
  if (!(t > 0.0)) return 1.0;
  if (std::isinf(t)) return 0.0;
  return std::erf(1.0 / std::sqrt(2.0 * t));
}

double stable_half_quantile(double u) {
  require_unit_open(u);
  const double z = special::erfc_inv(u);
  return 1.0 / (2.0 * z * z);
}

double diffusive_return_cdf(MemoryParam p, double x) {
  require_diffusive(p, "diffusive return law");
  if (!(x > 0.0)) return 0.0;
  const double e = 3.0 - 4.0 * p.value();
  return stable_half_cdf(std::pow(x, e) / e);
}

double diffusive_return_quantile(MemoryParam p, double u) {
  require_diffusive(p, "diffusive return law");
  const double e = 3.0 - 4.0 * p.value();
  return std::pow(e * stable_half_quantile(u), 1.0 / e);
}

double critical_return_cdf(double x) { return stable_half_cdf(x); }

double critical_training_k(MemoryParam p, double n) {
  require_diffusive(p, "critical training phase");
  if (!(n >= 1.0)) throw std::invalid_argument("n must be >= 1");
  const double e = 3.0 - 4.0 * p.value();
  const double g = 4.0 - 4.0 * p.value();
  return std::pow(e, -1.0 / g) * std::pow(n, e / g);
}

double critical_training_k_critical(double n) {
  if (!(n >= 1.0)) throw std::invalid_argument("n must be >= 1");
  return std::log(n);
}

double return_exponent(MemoryParam p) {
  require_diffusive(p, "return scale");
  return (4.0 - 4.0 * p.value()) / (3.0 - 4.0 * p.value());
}

double return_scale(MemoryParam p, double k) {
  require_diffusive(p, "return scale");
  if (!(k >= 1.0)) throw std::invalid_argument("k must be >= 1");
  const double e = 3.0 - 4.0 * p.value();
  return std::pow(e, 1.0 / e) * std::pow(k, return_exponent(p));
}

double trained_limit_mean(MemoryParam p, double t) {
  require_diffusive(p, "trained limit mean");
  if (t < 0.0 || std::isnan(t)) throw std::invalid_argument("t must be >= 0");
  if (t == 0.0 && p.value() < 0.5) {
    throw std::invalid_argument("training correction diverges at t = 0 for p < 1/2");
  }
  return std::pow(t, 2.0 * p.value() - 1.0) / std::sqrt(3.0 - 4.0 * p.value());
}

double nrbm_cov(MemoryParam p, double s, double t) {
  require_diffusive(p, "noise-reinforced Brownian motion");
  if (!(s > 0.0 && t > 0.0)) throw std::invalid_argument("times must be positive");
  if (s > t) std::swap(s, t);
  const double pv = p.value();
  return std::pow(t, 2.0 * pv - 1.0) * std::pow(s, 2.0 - 2.0 * pv) / (3.0 - 4.0 * pv);
}

std::vector<double> nrbm_sample_grid(MemoryParam p, std::span<const double> grid,
                                     Xoshiro256pp& rng) {
  require_diffusive(p, "noise-reinforced Brownian motion");
  const auto m = static_cast<Eigen::Index>(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw std::invalid_argument("grid times must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      cov(i, j) = nrbm_cov(p, grid[static_cast<std::size_t>(i)],
                           grid[static_cast<std::size_t>(j)]);
    }
    cov(i, i) += 1e-12;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("covariance factorization failed");
  }
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    z(i) = special::normal_quantile(open_uniform(rng));
  }
  const Eigen::VectorXd x = llt.matrixL() * z;
  return {x.data(), x.data() + m};
}

double overtrained_center(MemoryParam p, double n, double k) {
  require_diffusive(p, "overtrained center");
  if (!(n > 0.0 && k >= 0.0)) throw std::invalid_argument("need n > 0, k >= 0");
  const double pv = p.value();
  return std::pow(k, 2.0 - 2.0 * pv) / std::pow(n, 1.0 - 2.0 * pv);
}

double overtrained_center_critical(double n, double k) {
  if (!(n > 0.0 && k >= 0.0)) throw std::invalid_argument("need n > 0, k >= 0");
  return std::sqrt(n * k);
}

std::vector<std::string> overtrained_regime_warnings(MemoryParam p, double n,
                                                     double k) {
  std::vector<std::string> out;
  if (k >= n) out.emplace_back("training length is not small against n");
  if (p.regime() == Regime::Diffusive) {
    const double phase = critical_training_k(p, n);
    if (k <= 2.0 * phase) {
      std::ostringstream os;
      os << "k = " << k << " is not well above the critical phase " << phase;
      out.push_back(os.str());
    }
  } else if (p.regime() == Regime::Critical) {
    const double logn = std::log(n);
    if (k <= 2.0 * logn) out.emplace_back("k is not well above log n");
    if (k > 1.0 && std::log(k) > 0.5 * logn) {
      out.emplace_back("log k is not small against log n");
    }
  } else {
    out.emplace_back("superdiffusive regime has no Gaussian overtrained limit");
  }
  return out;
}

double lil_constant(MemoryParam p) {
  require_diffusive(p, "iterated-logarithm constant");
  return 1.0 / std::sqrt(3.0 - 4.0 * p.value());
}

DiffusiveReturnLaw::DiffusiveReturnLaw(MemoryParam p) : p_(p) {
  require_diffusive(p, "diffusive return law");
}

double DiffusiveReturnLaw::pdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  const double e = 3.0 - 4.0 * p_.value();
  const double tau = std::pow(x, e) / e;
  return stable_half_pdf(tau) * std::pow(x, e - 1.0);
}

std::string DiffusiveReturnLaw::name() const {
  std::ostringstream os;
  os << "diffusive-return(p=" << p_.value() << ")";
  return os.str();
}

FiniteKReturnLaw::FiniteKReturnLaw(MemoryParam p, std::uint64_t k)
    : p_(p), k_(static_cast<double>(k)) {
  if (p.regime() == Regime::Superdiffusive) {
    throw std::invalid_argument("no return-time law for p > 3/4");
  }
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const double start = weight(p, k) * k_;
  start_sq_ = start * start;
}

double FiniteKReturnLaw::time_of(double x) const {
  if (p_.regime() == Regime::Critical) return std::exp(k_ * x);
  return x * std::pow(k_, return_exponent(p_));
}

double FiniteKReturnLaw::axis_of(double t) const {
  if (p_.regime() == Regime::Critical) return std::log(t) / k_;
  return t * std::pow(k_, -return_exponent(p_));
}

double FiniteKReturnLaw::cdf(double x) const {
  if (!(x > 0.0)) return 0.0;
  const double t = time_of(x);
  double clock = 0.0;
  if (p_.regime() == Regime::Critical) {
    clock = std::log(t / k_);
  } else {
    const double e = 3.0 - 4.0 * p_.value();
    clock = (std::pow(t, e) - std::pow(k_, e)) / e;
  }
  return stable_half_cdf(clock / start_sq_);
}

double FiniteKReturnLaw::quantile(double u) const {
  const double tau = stable_half_quantile(u);
  if (p_.regime() == Regime::Critical) return axis_of(k_ * std::exp(start_sq_ * tau));
  const double e = 3.0 - 4.0 * p_.value();
  return axis_of(std::pow(std::pow(k_, e) + e * start_sq_ * tau, 1.0 / e));
}

std::string FiniteKReturnLaw::name() const {
  std::ostringstream os;
  os << "finite-k-return(p=" << p_.value() << ", k=" << k_ << ")";
  return os.str();
}

GaussianLimit::GaussianLimit(double center, double stdev)
    : center_(center), stdev_(stdev) {
  if (!(stdev > 0.0)) throw std::invalid_argument("stdev must be positive");
}

double GaussianLimit::cdf(double x) const {
  return special::normal_cdf((x - center_) / stdev_);
}

double GaussianLimit::quantile(double u) const {
  require_unit_open(u);
  return center_ + stdev_ * special::normal_quantile(u);
}

std::string GaussianLimit::name() const {
  std::ostringstream os;
  os << "normal(" << center_ << ", " << stdev_ * stdev_ << ")";
  return os.str();
}

NrBMLaw::NrBMLaw(MemoryParam p) : p_(p) {
  require_diffusive(p, "noise-reinforced Brownian motion");
}

}  // namespace erw::laws
