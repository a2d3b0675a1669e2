// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "asclt/error.hpp"
#include "asclt/stattests.hpp"

namespace asclt {
namespace {

std::vector<double> quantile_sample(std::size_t n, double shift = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n)) + shift;
  }
  return x;
}

TEST(Normal, CdfAndQuantile) {
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-15);
  EXPECT_NEAR(normal_cdf(3.0, 1.0, 4.0), normal_cdf(1.0), 1e-15);
  // Lower tail round trip; the upper tail follows from symmetry.
  for (double x = -6.0; x <= 0.0; x += 0.25) {
    EXPECT_NEAR(normal_quantile(normal_cdf(x)), x, 1e-10 * std::max(1.0, std::abs(x)));
    EXPECT_NEAR(normal_cdf(-x), 1.0 - normal_cdf(x), 1e-15);
  }
  for (double p : {1e-4, 0.01, 0.3}) {
    EXPECT_NEAR(normal_quantile(1.0 - p), -normal_quantile(p), 1e-9);
  }
  EXPECT_THROW(normal_quantile(0.0), Error);
  EXPECT_THROW(normal_quantile(1.0), Error);
}

TEST(Kolmogorov, SurvivalOracle) {
  // mpmath, 50 digits.
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-14);
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-14);
  EXPECT_NEAR(kolmogorov_survival(0.3), 0.9999906941986655, 1e-14);
  EXPECT_NEAR(kolmogorov_survival(2.0), 0.0006709252557796953, 1e-16);
  EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Ks, QuantileSampleAccepted) {
  const std::vector<double> x = quantile_sample(200);
  const KsResult r = ks_test_gaussian(x, 0.0, 1.0);
  EXPECT_NEAR(r.statistic, 0.5 / 200.0, 1e-12);
  EXPECT_GT(r.p_value, 0.99);
}

TEST(Ks, ShiftRejected) {
  const KsResult r = ks_test_gaussian(quantile_sample(500, 0.5), 0.0, 1.0);
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(Ks, DegenerateSample) {
  const std::vector<double> x(50, 0.0);
  EXPECT_NEAR(ks_test_gaussian(x, 0.0, 1.0).statistic, 0.5, 1e-15);
  EXPECT_THROW(ks_test_gaussian(std::vector<double>(19, 0.0), 0.0, 1.0), Error);
}

TEST(Ks, CalibratedUnderNull) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  int rejections = 0;
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> x(200);
    for (double& v : x) v = g(rng);
    if (ks_test_gaussian(x, 0.0, 1.0).p_value < 0.05) ++rejections;
  }
  const double rate = rejections / 500.0;
  EXPECT_GE(rate, 0.02);
  EXPECT_LE(rate, 0.08);
}

TEST(AndersonDarling, Cases) {
  // Oracle for exact quantiles at n = 100 (scipy formula, double precision).
  const AdResult q = anderson_darling_normal(quantile_sample(100), 0.0, 1.0);
  EXPECT_NEAR(q.statistic, 0.011495132744087755, 1e-10);
  EXPECT_FALSE(q.reject_1pct);
  const AdResult s = anderson_darling_normal(quantile_sample(100, 1.0), 0.0, 1.0);
  EXPECT_TRUE(s.reject_1pct);
  const AdResult wide = anderson_darling_normal(quantile_sample(400), 0.0, 4.0);
  EXPECT_TRUE(wide.reject_1pct);
  EXPECT_THROW(anderson_darling_normal(std::vector<double>(10, 0.0), 0.0, 1.0), Error);
}

TEST(Moments, Basic) {
  const std::vector<double> c(10, 3.0);
  const MomentSummary a = moment_summary(c);
  EXPECT_DOUBLE_EQ(a.mean, 3.0);
  EXPECT_DOUBLE_EQ(a.variance, 0.0);

  const MomentSummary b = moment_summary(std::vector<double>{-1.0, 1.0});
  EXPECT_DOUBLE_EQ(b.mean, 0.0);
  EXPECT_DOUBLE_EQ(b.variance, 2.0);
  EXPECT_DOUBLE_EQ(b.skewness, 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> x(20000);
  for (double& v : x) v = g(rng);
  const MomentSummary n = moment_summary(x);
  EXPECT_NEAR(n.mean, 0.0, 4.0 * n.se_mean);
  EXPECT_NEAR(n.variance, 1.0, 4.0 * n.se_variance);
  EXPECT_NEAR(n.skewness, 0.0, 4.0 * n.se_skewness);
  EXPECT_NEAR(n.excess_kurtosis, 0.0, 4.0 * n.se_kurtosis);
  EXPECT_THROW(moment_summary(std::vector<double>{}), Error);
}

}  // namespace
}  // namespace asclt
