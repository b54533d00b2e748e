#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace {

using erw::MemoryParam;
using erw::TrainingPrefix;
using erw::WalkState;
using erw::Xoshiro256pp;

TEST(MemoryParam, RejectsValuesOutsideUnitInterval) {
  EXPECT_THROW(MemoryParam(-0.01), std::invalid_argument);
  EXPECT_THROW(MemoryParam(1.01), std::invalid_argument);
  EXPECT_THROW(MemoryParam(std::nan("")), std::invalid_argument);
  EXPECT_NO_THROW(MemoryParam(0.0));
  EXPECT_NO_THROW(MemoryParam(1.0));
}

TEST(MemoryParam, ClassifiesRegimes) {
  EXPECT_EQ(MemoryParam(0.2).regime(), erw::Regime::Diffusive);
  EXPECT_EQ(MemoryParam(0.7499).regime(), erw::Regime::Diffusive);
  EXPECT_EQ(MemoryParam(0.75).regime(), erw::Regime::Critical);
  EXPECT_EQ(MemoryParam(0.8).regime(), erw::Regime::Superdiffusive);
}

TEST(TrainingPrefix, ValidatesSteps) {
  EXPECT_THROW(TrainingPrefix({1, 0, -1}), std::invalid_argument);
  const TrainingPrefix prefix({1, 1, -1, 1});
  EXPECT_EQ(prefix.length(), 4u);
  EXPECT_EQ(prefix.end_position(), 2);
  EXPECT_FALSE(prefix.is_canonical());
  EXPECT_TRUE(TrainingPrefix::canonical(5).is_canonical());
  EXPECT_EQ(TrainingPrefix::canonical(5).end_position(), 5);
}

TEST(StepProb, RequiresHistory) {
  EXPECT_THROW(erw::step_prob_up(WalkState{0, 0, MemoryParam(0.6)}), std::domain_error);
  Xoshiro256pp rng(1);
  EXPECT_THROW(erw::advance(WalkState{0, 0, MemoryParam(0.6)}, rng), std::domain_error);
}

TEST(StepProb, OverflowGuard) {
  Xoshiro256pp rng(1);
  EXPECT_THROW(erw::advance(WalkState{erw::kMaxSteps, 0, MemoryParam(0.5)}, rng),
               std::overflow_error);
}

// The urn description: pick a past step uniformly, repeat it with
// probability p, otherwise reverse it. Compared with the closed form on
// every history of length <= 14.
TEST(StepProb, MatchesUrnOnAllShortHistories) {
  for (const double p : {0.0, 0.2, 0.5, 0.6, 0.75, 0.9, 1.0}) {
    for (int len = 1; len <= 14; ++len) {
      for (unsigned mask = 0; mask < (1u << len); ++mask) {
        int ups = 0;
        for (int i = 0; i < len; ++i) ups += (mask >> i) & 1u;
        const int downs = len - ups;
        const double urn = (ups * p + downs * (1.0 - p)) / len;
        const WalkState st{static_cast<std::uint64_t>(len), ups - downs, MemoryParam(p)};
        ASSERT_NEAR(erw::step_prob_up(st), urn, 1e-15) << p << " " << len << " " << mask;
      }
    }
  }
}

TEST(Walk, FairFirstStepGivesBinomialFourthPosition) {
  // p = 1/2 is the simple random walk; S(4) has Binomial(4, 1/2) shape.
  constexpr int kRuns = 100'000;
  std::map<std::int64_t, int> counts;
  Xoshiro256pp rng(99);
  for (int r = 0; r < kRuns; ++r) {
    WalkState st{0, 0, MemoryParam(0.5)};
    st = erw::ensure_history(st, rng);
    for (int i = 0; i < 3; ++i) st = erw::advance(st, rng);
    ++counts[st.position];
  }
  const std::array<std::pair<int, double>, 5> expected{
      {{-4, 1.0 / 16}, {-2, 4.0 / 16}, {0, 6.0 / 16}, {2, 4.0 / 16}, {4, 1.0 / 16}}};
  double chi2 = 0.0;
  for (const auto& [s, prob] : expected) {
    const double e = prob * kRuns;
    const double d = counts[s] - e;
    chi2 += d * d / e;
  }
  EXPECT_LT(chi2, 13.277);  // chi-square 4 dof, 1%
}

TEST(Walk, LawOfLargeNumbersInDiffusiveRegime) {
  Xoshiro256pp rng(3);
  WalkState st = erw::ensure_history(WalkState{0, 0, MemoryParam(0.6)}, rng);
  while (st.n < 1'000'000) st = erw::advance(st, rng);
  EXPECT_LT(std::abs(static_cast<double>(st.position)) / 1e6, 0.01);
}

TEST(Walk, FullMemoryRepeatsTraining) {
  Xoshiro256pp rng(4);
  const auto path = erw::simulate_path(TrainingPrefix::canonical(1), MemoryParam(1.0), 100, rng);
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    EXPECT_EQ(path.positions[i], static_cast<std::int64_t>(path.times[i]));
  }
}

TEST(Walk, ZeroMemoryAfterOneUpStepGoesDown) {
  Xoshiro256pp rng(5);
  const auto st = erw::advance(erw::init_trained(TrainingPrefix::canonical(1), MemoryParam(0.0)), rng);
  EXPECT_EQ(st.position, 0);
}

TEST(FirstReturn, ValidatesCap) {
  Xoshiro256pp rng(1);
  EXPECT_THROW(erw::first_return_time(TrainingPrefix::canonical(10), MemoryParam(0.5), 10, rng),
               std::invalid_argument);
}

TEST(FirstReturn, PrefixEndingAtZeroReturnsImmediately) {
  Xoshiro256pp rng(1);
  const auto t = erw::first_return_time(TrainingPrefix({1, -1}), MemoryParam(0.5), 10, rng);
  EXPECT_EQ(t.value, 2u);
  EXPECT_FALSE(t.censored);
  EXPECT_EQ(t.steps, 0u);
}

TEST(FirstReturn, ParityAndCensoring) {
  Xoshiro256pp rng(8);
  for (int r = 0; r < 2000; ++r) {
    const auto t = erw::first_return_time(TrainingPrefix::canonical(6), MemoryParam(0.6), 200, rng);
    if (t.censored) {
      EXPECT_EQ(t.value, 200u);
    } else {
      EXPECT_EQ(t.value % 2, 0u);  // S(n) = 0 needs n even
      EXPECT_GE(t.value, 12u);
      EXPECT_EQ(t.steps, t.value - 6);
    }
  }
}

// Exact P(T <= H) by dynamic programming over (n, S) with absorption at 0.
double exact_return_cdf(double p, int k, int horizon) {
  std::map<int, double> dist{{k, 1.0}};
  double absorbed = 0.0;
  for (int n = k; n < horizon; ++n) {
    std::map<int, double> next;
    for (const auto& [s, mass] : dist) {
      const double up = 0.5 + (p - 0.5) * s / n;
      if (s + 1 == 0) absorbed += mass * up; else next[s + 1] += mass * up;
      if (s - 1 == 0) absorbed += mass * (1 - up); else next[s - 1] += mass * (1 - up);
    }
    dist = std::move(next);
  }
  return absorbed;
}

TEST(FirstReturn, MatchesExactDistribution) {
  for (const auto& [p, k] : std::vector<std::pair<double, int>>{{0.7, 4}, {0.2, 6}, {0.75, 3}}) {
    constexpr int kHorizon = 300;
    constexpr int kRuns = 40'000;
    const double exact = exact_return_cdf(p, k, kHorizon);
    Xoshiro256pp rng(17);
    int hits = 0;
    for (int r = 0; r < kRuns; ++r) {
      hits += erw::first_return_time(TrainingPrefix::canonical(k), MemoryParam(p), kHorizon, rng)
                      .censored
                  ? 0
                  : 1;
    }
    const double se = std::sqrt(exact * (1 - exact) / kRuns);
    EXPECT_NEAR(static_cast<double>(hits) / kRuns, exact, 4 * se) << "p=" << p;
  }
}

TEST(Checkpoints, ValidatesTimes) {
  Xoshiro256pp rng(1);
  const auto prefix = TrainingPrefix::canonical(5);
  const std::vector<std::uint64_t> early{4, 10};
  const std::vector<std::uint64_t> unsorted{10, 8};
  EXPECT_THROW(erw::simulate_checkpoints(prefix, MemoryParam(0.5), early, rng),
               std::invalid_argument);
  EXPECT_THROW(erw::simulate_checkpoints(prefix, MemoryParam(0.5), unsorted, rng),
               std::invalid_argument);
}

TEST(Checkpoints, AgreeWithFullPath) {
  const auto prefix = TrainingPrefix::canonical(3);
  const std::vector<std::uint64_t> times{3, 10, 57, 200};
  Xoshiro256pp a(21), b(21);
  const auto cps = erw::simulate_checkpoints(prefix, MemoryParam(0.4), times, a);
  const auto path = erw::simulate_path(prefix, MemoryParam(0.4), 197, b);
  for (std::size_t i = 0; i < times.size(); ++i) {
    EXPECT_EQ(cps.positions[i], path.positions[times[i] - 3]);
  }
}

TEST(Checkpoints, UntrainedStartsWithFairStep) {
  Xoshiro256pp rng(2);
  const std::vector<std::uint64_t> times{0, 1};
  const auto cps = erw::simulate_checkpoints(TrainingPrefix{}, MemoryParam(0.6), times, rng);
  EXPECT_EQ(cps.positions[0], 0);
  EXPECT_EQ(std::abs(cps.positions[1]), 1);
}

TEST(EarlyReturn, AgreesWithPathMinimum) {
  const auto prefix = TrainingPrefix::canonical(4);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Xoshiro256pp a(seed), b(seed);
    const bool hit = erw::early_return_indicator(prefix, MemoryParam(0.3), 100, a);
    const auto path = erw::simulate_path(prefix, MemoryParam(0.3), 96, b);
    bool expected = false;
    for (const auto s : path.positions) expected = expected || s <= 0;
    ASSERT_EQ(hit, expected) << seed;
  }
}

TEST(Walk, SameStreamSamePath) {
  Xoshiro256pp a(77), b(77);
  const auto x = erw::simulate_path(TrainingPrefix::canonical(2), MemoryParam(0.65), 1000, a);
  const auto y = erw::simulate_path(TrainingPrefix::canonical(2), MemoryParam(0.65), 1000, b);
  EXPECT_EQ(x.positions, y.positions);
}

}  // namespace
