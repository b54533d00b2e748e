#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "erw/limit_laws.hpp"
#include "erw/rng.hpp"
#include "erw/stats.hpp"

namespace {

namespace stats = erw::stats;
namespace laws = erw::laws;

TEST(Ecdf, StepFunctionProperties) {
  const auto e = stats::ecdf({3.0, 1.0, 2.0, 2.0});
  EXPECT_EQ(e.n_total(), 4u);
  EXPECT_DOUBLE_EQ(e(0.5), 0.0);
  EXPECT_DOUBLE_EQ(e(1.0), 0.25);
  EXPECT_DOUBLE_EQ(e.left_limit(2.0), 0.25);
  EXPECT_DOUBLE_EQ(e(2.0), 0.75);
  EXPECT_DOUBLE_EQ(e(10.0), 1.0);
  double prev = 0.0;
  for (double x = 0.0; x < 4.0; x += 0.01) {
    EXPECT_GE(e(x), prev);
    prev = e(x);
  }
}

TEST(Ecdf, CensoredMassStaysBelowOne) {
  const auto e = stats::ecdf({1.0, 2.0}, 2, 5.0);
  EXPECT_DOUBLE_EQ(e(4.999), 0.5);
  EXPECT_EQ(e.n_censored(), 2u);
  EXPECT_THROW(stats::ecdf({1.0, 6.0}, 1, 5.0), std::invalid_argument);
  EXPECT_THROW(stats::ecdf({1.0}, 1), std::invalid_argument);
  EXPECT_THROW(stats::ecdf({}), std::invalid_argument);
  EXPECT_THROW(stats::ecdf({std::nan("")}), std::invalid_argument);
}

TEST(KolmogorovPValue, MatchesReferenceValues) {
  EXPECT_NEAR(stats::kolmogorov_pvalue(0.5), 0.9639452436648751, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_pvalue(0.8), 0.5441424115741981, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_pvalue(1.0), 0.26999967167735456, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_pvalue(1.36), 0.049485876755377876, 1e-12);
  EXPECT_NEAR(stats::kolmogorov_pvalue(2.0), 0.0006709252557796953, 1e-12);
  EXPECT_EQ(stats::kolmogorov_pvalue(0.0), 1.0);
}

TEST(KsTest, QuantileGridSampleHasDistanceOneOverN) {
  const laws::StableHalfLaw law;
  std::vector<double> xs;
  constexpr int n = 1000;
  for (int i = 1; i <= n; ++i) xs.push_back(law.quantile((i - 0.5) / n));
  const auto gof = stats::ks_test(stats::ecdf(xs), law, {0.0, 1.0});
  EXPECT_NEAR(gof.ks_distance, 0.5 / n, 1e-9);
  EXPECT_EQ(gof.points, static_cast<std::size_t>(n));
}

TEST(KsTest, WindowRestrictsComparedPoints) {
  const laws::GaussianLimit law(0.0, 1.0);
  std::vector<double> xs;
  for (int i = 1; i <= 1000; ++i) xs.push_back(law.quantile(i / 1001.0));
  const auto gof = stats::ks_test(stats::ecdf(xs), law, {0.25, 0.75});
  EXPECT_NEAR(static_cast<double>(gof.points), 500.0, 2.0);
  EXPECT_NEAR(gof.t_lo, law.quantile(0.25), 1e-12);
  EXPECT_THROW(stats::ks_test(stats::ecdf(xs), law, {0.8, 0.2}), std::invalid_argument);
}

TEST(KsTest, ClipsWindowAtCensorPoint) {
  const laws::StableHalfLaw law;
  std::vector<double> xs;
  constexpr int n = 1000;
  std::size_t censored = 0;
  const double cap = law.quantile(0.6);
  for (int i = 1; i <= n; ++i) {
    const double x = law.quantile((i - 0.5) / n);
    if (x < cap) xs.push_back(x); else ++censored;
  }
  const auto gof = stats::ks_test(stats::ecdf(xs, censored, cap), law, {0.05, 0.8});
  EXPECT_TRUE(gof.clipped);
  EXPECT_DOUBLE_EQ(gof.t_hi, cap);
  EXPECT_LT(gof.ks_distance, 1.0 / n);
  const auto unclipped = stats::ks_test(stats::ecdf(xs, censored, cap), law, {0.05, 0.5});
  EXPECT_FALSE(unclipped.clipped);
}

TEST(KsTest, DetectsWrongLaw) {
  auto rng = erw::replica_rng(1, 1, 1);
  const laws::GaussianLimit truth(0.0, 1.0), wrong(0.3, 1.0);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = truth.quantile((static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53);
  const auto emp = stats::ecdf(xs);
  EXPECT_LT(stats::ks_test(emp, truth, {0.0, 1.0}).ks_distance, 0.03);
  EXPECT_GT(stats::ks_test(emp, wrong, {0.0, 1.0}).ks_distance, 0.08);
  EXPECT_LT(stats::ks_test(emp, wrong, {0.0, 1.0}).ks_pvalue, 1e-6);
}

TEST(Describe, MomentsOfSmallSample) {
  const std::vector<double> xs{1, 2, 3, 4, 10};
  const auto m = stats::describe(xs);
  EXPECT_EQ(m.count, 5u);
  EXPECT_DOUBLE_EQ(m.mean, 4.0);
  EXPECT_DOUBLE_EQ(m.variance, 12.5);
  EXPECT_NEAR(m.mean_se, std::sqrt(12.5 / 5), 1e-15);
  EXPECT_GT(m.skewness, 0.0);
}

TEST(Marginals, StepIndexing) {
  const stats::MarginalSpec diff{erw::MemoryParam(0.6), 1e6, {0.25, 0.5, 1.0}, true, 1e-3};
  EXPECT_EQ(stats::marginal_steps(diff), (std::vector<std::uint64_t>{250000, 500000, 1000000}));
  const stats::MarginalSpec crit{erw::MemoryParam(0.75), 1e6, {0.5, 1.0}, true, 1e-3};
  EXPECT_EQ(stats::marginal_steps(crit), (std::vector<std::uint64_t>{1000, 1000000}));
}

TEST(Marginals, RecoversCovarianceOfSyntheticLimit) {
  const erw::MemoryParam p(0.6);
  const std::vector<double> t{0.25, 0.5, 1.0};
  const double n = 1e6;
  auto rng = erw::replica_rng(3, 3, 3);
  std::vector<std::vector<std::int64_t>> rows;
  for (int r = 0; r < 20'000; ++r) {
    const auto x = laws::nrbm_sample_grid(p, t, rng);
    std::vector<std::int64_t> row;
    for (std::size_t i = 0; i < t.size(); ++i) {
      row.push_back(std::llround((x[i] + laws::trained_limit_mean(p, t[i])) * std::sqrt(n)));
    }
    rows.push_back(row);
  }
  const auto rep = stats::marginal_report(rows, {p, n, t, true, 1e-3});
  EXPECT_TRUE(rep.warnings.empty());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& pt = rep.points[i];
    EXPECT_NEAR(pt.moments.mean, pt.theory_mean, 4 * pt.moments.mean_se);
    for (std::size_t j = 0; j < t.size(); ++j) {
      EXPECT_NEAR(rep.covariance[i][j], rep.theory_covariance[i][j],
                  4 * rep.covariance_se[i][j]);
    }
  }
}

TEST(Marginals, ValidatesInput) {
  const erw::MemoryParam p(0.6);
  std::vector<std::vector<std::int64_t>> rows(10, std::vector<std::int64_t>{1, 2});
  EXPECT_THROW(stats::marginal_report(rows, {p, 1e6, {0.0001, 1.0}, true, 1e-3}),
               std::invalid_argument);
  EXPECT_THROW(stats::marginal_report(rows, {erw::MemoryParam(0.8), 1e6, {0.5, 1.0}, true, 1e-3}),
               std::invalid_argument);
  EXPECT_FALSE(stats::marginal_report(rows, {p, 1e6, {0.5, 1.0}, true, 1e-3}).warnings.empty());
}

TEST(Normality, StandardNormalSamplePasses) {
  auto rng = erw::replica_rng(8, 8, 8);
  const laws::GaussianLimit law(0.0, std::sqrt(2.0));
  std::vector<double> xs(5000);
  for (auto& x : xs) x = law.quantile((static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53);
  const auto rep = stats::normality_report(xs, 2.0);
  EXPECT_LT(rep.gof.ks_distance, 0.03);
  EXPECT_NEAR(rep.moments.variance, 2.0, 4 * rep.moments.variance_se);
}

}  // namespace
