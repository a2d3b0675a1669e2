// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_STATTESTS_HPP
#define ASCLT_STATTESTS_HPP

#include <span>

namespace asclt {

double normal_cdf(double x, double mean = 0.0, double var = 1.0);
double normal_quantile(double p, double mean = 0.0, double var = 1.0);

/// P(K > x) for the Kolmogorov distribution, 100 series terms.
double kolmogorov_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample KS against N(mean, var); p from K(sqrt(n) D_n). n >= 20.
KsResult ks_test_gaussian(std::span<const double> samples, double mean, double var);

struct AdResult {
  double statistic = 0.0;
  bool reject_1pct = false;
};

inline constexpr double kAdCritical1Pct = 3.857;

/// Anderson-Darling A^2 against the fully specified N(mean, var). n >= 20.
AdResult anderson_darling_normal(std::span<const double> samples, double mean,
                                 double var);

struct MomentSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;         ///< unbiased
  double skewness = 0.0;         ///< adjusted Fisher-Pearson
  double excess_kurtosis = 0.0;  ///< adjusted
  double se_mean = 0.0;
  double se_variance = 0.0;
  double se_skewness = 0.0;
  double se_kurtosis = 0.0;
};

/// n >= 1; higher moments need n >= 4 and are 0 otherwise.
MomentSummary moment_summary(std::span<const double> samples);

}  // namespace asclt

#endif  // ASCLT_STATTESTS_HPP
