#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "erw/gamma_weights.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace {

using erw::MemoryParam;

TEST(Weight, RejectsIndexZero) {
  EXPECT_THROW(erw::weight(MemoryParam(0.6), 0), std::invalid_argument);
}

TEST(Weight, ClosedFormsAtSmallIndex) {
  // a_1 = 1 / Gamma(2p).
  EXPECT_NEAR(erw::weight(MemoryParam(0.75), 1), 2.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_DOUBLE_EQ(erw::weight(MemoryParam(1.0), 1), 1.0);
  EXPECT_DOUBLE_EQ(erw::weight(MemoryParam(0.5), 12345), 1.0);
  // a_2 = 1 / Gamma(2 + 2p - 1) = 1 / Gamma(2p + 1); p = 1: 1/2.
  EXPECT_NEAR(erw::weight(MemoryParam(1.0), 2), 0.5, 1e-15);
  // Gamma pole at p = 0, j = 1.
  EXPECT_EQ(erw::weight(MemoryParam(0.0), 1), 0.0);
}

TEST(Weight, MatchesBoostDeltaRatio) {
  for (const double p : {0.1, 0.3, 0.6, 0.75, 0.9}) {
    for (std::uint64_t j = 1; j < 10'000'000; j = j * 3 + 1) {
      const double ref = boost::math::tgamma_delta_ratio(static_cast<double>(j), 2 * p - 1);
      EXPECT_NEAR(erw::weight(MemoryParam(p), j), ref, 1e-13 * ref) << p << " " << j;
    }
  }
}

TEST(Weight, PositiveFromIndexTwo) {
  for (double p = 0.0; p <= 1.0; p += 0.05) {
    for (std::uint64_t j = 2; j < 100'000; j = j * 2 + 1) {
      EXPECT_GT(erw::weight(MemoryParam(p), j), 0.0);
    }
  }
}

TEST(Weight, RecursionIdentityHoldsToTightTolerance) {
  // a_{m+1} (1 + (2p-1)/m) = a_m on a p grid and log-spaced m in [1, 1e6].
  double worst = 0.0;
  for (int ip = 0; ip <= 20; ++ip) {
    const MemoryParam p(ip / 20.0);
    for (int i = 0; i <= 120; ++i) {
      const auto m = static_cast<std::uint64_t>(std::llround(std::pow(1e6, i / 120.0)));
      const double lhs = erw::weight(p, m + 1) * (1.0 + (2 * p.value() - 1) / m);
      const double rhs = erw::weight(p, m);
      const double err = rhs == 0.0 ? std::abs(lhs) : std::abs(lhs / rhs - 1);
      worst = std::max(worst, err);
    }
  }
  EXPECT_LT(worst, 1e-10);
}

TEST(Weight, PowerLawAsymptotics) {
  for (const double p : {0.2, 0.6, 0.75}) {
    const double j = 1e9;
    const double a = erw::weight(MemoryParam(p), static_cast<std::uint64_t>(j));
    EXPECT_NEAR(a * std::pow(j, 2 * p - 1), 1.0, 1e-8);
  }
}

TEST(GammaWeightTable, MatchesWeightAndChecksRange) {
  const erw::GammaWeightTable t(MemoryParam(0.6), 10, 20);
  EXPECT_EQ(t.first(), 10u);
  EXPECT_EQ(t.last(), 20u);
  for (std::uint64_t j = 10; j <= 20; ++j) {
    EXPECT_NEAR(t.at(j) / erw::weight(MemoryParam(0.6), j), 1.0, 1e-14);
  }
  EXPECT_THROW(t.at(9), std::out_of_range);
  EXPECT_THROW(t.at(21), std::out_of_range);
  EXPECT_THROW(erw::GammaWeightTable(MemoryParam(0.6), 0, 3), std::invalid_argument);
}

TEST(GammaWeightTable, RecursionStaysOnClosedFormOverLongRanges) {
  for (const double p : {0.0, 0.05, 0.3, 0.75, 0.95}) {
    const MemoryParam mp(p);
    const erw::GammaWeightTable t(mp, 1, 200'000);
    for (std::uint64_t j = 1; j <= 200'000; j += 997) {
      if (p == 0.0 && j == 1) continue;
      EXPECT_NEAR(t[j] / erw::weight(mp, j), 1.0, 1e-13) << "p=" << p << " j=" << j;
    }
  }
}

TEST(PredictableIncrement, VanishesUpToRounding) {
  for (const double p : {0.1, 0.6, 0.75}) {
    for (std::uint64_t m = 1; m < 1'000'000; m = m * 5 + 2) {
      for (const std::int64_t s : {-7, 0, 3, 100}) {
        const double scale = erw::weight(MemoryParam(p), m) * (std::abs(s) + 1.0);
        EXPECT_LT(std::abs(erw::predictable_increment(MemoryParam(p), m, s)), 1e-12 * scale);
      }
    }
  }
}

erw::CheckpointSeries path(double p, std::uint64_t k, std::uint64_t steps, std::uint64_t seed) {
  erw::Xoshiro256pp rng(seed);
  return erw::simulate_path(erw::TrainingPrefix::canonical(k), MemoryParam(p), steps, rng);
}

TEST(MartingaleTransform, StartsAtZeroAndTracksQuadraticVariation) {
  const auto traj = path(0.6, 10, 500, 1);
  const auto m = erw::martingale_transform(traj);
  EXPECT_EQ(m.times.front(), 10u);
  EXPECT_EQ(m.values.front(), 0.0);
  const auto qv = erw::quadratic_variation(m);
  ASSERT_EQ(qv.size(), m.qv.size());
  for (std::size_t i = 0; i < qv.size(); ++i) EXPECT_NEAR(qv[i], m.qv[i], 1e-12 * (1 + qv[i]));
  const erw::GammaWeightTable a(MemoryParam(0.6), 10, 510);
  for (std::size_t i = 1; i < m.values.size(); ++i) {
    const double inc = std::abs(m.values[i] - m.values[i - 1]);
    EXPECT_LE(inc, 2 * a[m.times[i]] * (1 + 1e-12));
  }
}

TEST(MartingaleTransform, CriticalUsesShiftedOrigin) {
  const auto traj = path(0.75, 5, 100, 2);
  const auto m = erw::martingale_transform(traj, erw::MartingaleKind::Critical);
  EXPECT_EQ(m.times.front(), 6u);
  EXPECT_EQ(m.values.front(), 0.0);
  EXPECT_THROW(erw::martingale_transform(path(0.6, 5, 100, 2), erw::MartingaleKind::Critical),
               std::invalid_argument);
}

TEST(MartingaleTransform, RejectsGapsAndMissingOrigin) {
  erw::Xoshiro256pp rng(3);
  const std::vector<std::uint64_t> times{5, 7, 9};
  const auto sparse = erw::simulate_checkpoints(erw::TrainingPrefix::canonical(5),
                                                MemoryParam(0.6), times, rng);
  EXPECT_THROW(erw::martingale_transform(sparse), std::invalid_argument);
  const auto untrained = path(0.6, 0, 10, 3);
  EXPECT_THROW(erw::martingale_transform(untrained), std::invalid_argument);
}

TEST(MartingaleTransform, HasZeroMeanAcrossReplicas) {
  constexpr int kRuns = 4000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < kRuns; ++r) {
    const auto m = erw::martingale_transform(path(0.65, 8, 400, 100 + r));
    const double x = m.values.back();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / kRuns;
  const double se = std::sqrt((sum2 / kRuns - mean * mean) / kRuns);
  EXPECT_LT(std::abs(mean), 4 * se);
}

TEST(NormalizedMartingale, RejectsCriticalAndAbove) {
  const auto m = erw::martingale_transform(path(0.75, 5, 100, 2));
  EXPECT_THROW(erw::normalized_martingale(m, MemoryParam(0.75), 100), std::invalid_argument);
}

}  // namespace
