#ifndef ERW_GAMMA_WEIGHTS_HPP_
#define ERW_GAMMA_WEIGHTS_HPP_

#include <cstdint>
#include <vector>

#include "erw/walk.hpp"

namespace erw {

/// a_j = Gamma(j) / Gamma(j + 2p - 1), evaluated through a log-gamma
/// difference. a_j ~ j^{1-2p} for large j. At p = 0, j = 1 the denominator
/// sits on the Gamma pole and the weight is 0.
/// Throws std::invalid_argument for j = 0.
double weight(MemoryParam p, std::uint64_t j);

/// Immutable a_j for j in [first, last].
class GammaWeightTable {
 public:
  GammaWeightTable(MemoryParam p, std::uint64_t first, std::uint64_t last);

  MemoryParam param() const noexcept { return p_; }
  std::uint64_t first() const noexcept { return first_; }
  std::uint64_t last() const noexcept { return first_ + values_.size() - 1; }

  /// Throws std::out_of_range outside [first, last].
  double at(std::uint64_t j) const;
  double operator[](std::uint64_t j) const noexcept { return values_[j - first_]; }

 private:
  MemoryParam p_;
  std::uint64_t first_;
  std::vector<double> values_;
};

enum class MartingaleKind {
  Diffusive,  // M1(m) = a_m S(m) - a_k S(k)
  Critical,   // M2(m) = a_m S(m) - a_{k+1} S(k+1), p = 3/4
};

struct MartingaleSeries {
  std::vector<std::uint64_t> times;
  std::vector<double> values;  // M at each time, 0 at the origin
  std::vector<double> qv;      // running sum of squared increments
  MartingaleKind kind = MartingaleKind::Diffusive;
};

/// Requires a unit-resolution trajectory (consecutive step counts) starting
/// at the training length. The critical series starts one step later, at
/// k + 1. Throws std::invalid_argument on gaps, or for Critical with p != 3/4.
MartingaleSeries martingale_transform(const CheckpointSeries& trajectory,
                                      MartingaleKind kind = MartingaleKind::Diffusive);

/// Running sum of squared increments of the recorded values.
std::vector<double> quadratic_variation(const MartingaleSeries& series);

/// M / sqrt(n^{3-4p} / (3-4p)). Throws std::invalid_argument for p >= 3/4.
std::vector<double> normalized_martingale(const MartingaleSeries& series,
                                          MemoryParam p, double n);

/// Conditional mean of a_{m+1} S(m+1) - a_m S(m) given S(m) = s, which is
/// a_{m+1} s (1 + (2p-1)/m) - a_m s and vanishes identically.
double predictable_increment(MemoryParam p, std::uint64_t m, std::int64_t s);

}  // namespace erw

#endif  // ERW_GAMMA_WEIGHTS_HPP_
