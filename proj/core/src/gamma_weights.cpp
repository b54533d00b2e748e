#include "erw/gamma_weights.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "erw/special.hpp"

namespace erw {

double weight(MemoryParam p, std::uint64_t j) {
  if (j == 0) throw std::invalid_argument("weight index must be >= 1");
  const double b = 2.0 * p.value() - 1.0;
  if (b == 0.0) return 1.0;
  return std::exp(special::log_gamma_ratio(static_cast<double>(j), b));
}

GammaWeightTable::GammaWeightTable(MemoryParam p, std::uint64_t first,
                                   std::uint64_t last)
    : p_(p), first_(first) {
  if (first == 0) throw std::invalid_argument("weight index must be >= 1");
  if (last < first) throw std::invalid_argument("empty weight range");
  // a_{j+1} = a_j j / (j + 2p - 1), re-anchored to the closed form every
  // kAnchor entries, and after the p = 0 pole, so rounding cannot accumulate.
  constexpr std::uint64_t kAnchor = 256;
  const double b = 2.0 * p.value() - 1.0;
  values_.reserve(last - first + 1);
  for (std::uint64_t j = first; j <= last; ++j) {
    const auto prev = static_cast<double>(j - 1);
    if ((j - first) % kAnchor == 0 || prev + b <= 0.0) {
      values_.push_back(weight(p, j));
    } else {
      values_.push_back(values_.back() * prev / (prev + b));
    }
  }
}

double GammaWeightTable::at(std::uint64_t j) const {
  if (j < first_ || j > last()) {
    throw std::out_of_range("weight index " + std::to_string(j) +
                            " outside table range");
  }
  return values_[j - first_];
}

MartingaleSeries martingale_transform(const CheckpointSeries& trajectory,
                                      MartingaleKind kind) {
  const auto& times = trajectory.times;
  const auto& pos = trajectory.positions;
  if (times.empty() || times.size() != pos.size()) {
    throw std::invalid_argument("trajectory is empty or malformed");
  }
  if (times.front() != trajectory.k) {
    throw std::invalid_argument("trajectory must begin at the training length");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] != times[i - 1] + 1) {
      throw std::invalid_argument("trajectory has gaps; unit resolution required");
    }
  }

  std::size_t origin = 0;
  if (kind == MartingaleKind::Critical) {
    if (trajectory.p.regime() != Regime::Critical) {
      throw std::invalid_argument("critical martingale requires p = 3/4");
    }
    origin = 1;
  }
  if (origin >= times.size()) {
    throw std::invalid_argument("trajectory too short for the martingale origin");
  }
  if (times[origin] == 0) {
    throw std::invalid_argument("martingale origin must have n >= 1");
  }

  const GammaWeightTable a(trajectory.p, times[origin], times.back());
  MartingaleSeries series;
  series.kind = kind;
  const std::size_t len = times.size() - origin;
  series.times.reserve(len);
  series.values.reserve(len);
  series.qv.reserve(len);

  const double base = a[times[origin]] * static_cast<double>(pos[origin]);
  double prev = base;
  double qv = 0.0;
  for (std::size_t i = origin; i < times.size(); ++i) {
    const double x = a[times[i]] * static_cast<double>(pos[i]);
    const double inc = x - prev;
    qv += inc * inc;
    series.times.push_back(times[i]);
    series.values.push_back(x - base);
    series.qv.push_back(qv);
    prev = x;
  }
  return series;
}

std::vector<double> quadratic_variation(const MartingaleSeries& series) {
  std::vector<double> out;
  out.reserve(series.values.size());
  double acc = 0.0;
  double prev = 0.0;
  for (const double v : series.values) {
    const double inc = v - prev;
    acc += inc * inc;
    out.push_back(acc);
    prev = v;
  }
  return out;
}

std::vector<double> normalized_martingale(const MartingaleSeries& series,
                                          MemoryParam p, double n) {
  if (p.regime() != Regime::Diffusive) {
    throw std::invalid_argument(
        "diffusive normalization requires p < 3/4; the critical scale is sqrt(log n)");
  }
  if (!(n > 0.0)) throw std::invalid_argument("n must be positive");
  const double e = 3.0 - 4.0 * p.value();
  const double scale = std::sqrt(std::pow(n, e) / e);
  std::vector<double> out;
  out.reserve(series.values.size());
  for (const double v : series.values) out.push_back(v / scale);
  return out;
}

double predictable_increment(MemoryParam p, std::uint64_t m, std::int64_t s) {
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  const double sd = static_cast<double>(s);
  const double md = static_cast<double>(m);
  const double expected_next = sd + (2.0 * p.value() - 1.0) * sd / md;
  return weight(p, m + 1) * expected_next - weight(p, m) * sd;
}

}  // namespace erw
