// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "asclt/error.hpp"
#include "asclt/quadrature.hpp"

namespace asclt {
namespace {

constexpr std::size_t kMinSamples = 20;
constexpr int kSeriesTerms = 100;

void check_var(double var) {
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw Error(ErrorCode::kInvalidArgument, "variance must be finite and > 0");
  }
}

void check_n(std::span<const double> samples) {
  if (samples.size() < kMinSamples) {
    throw Error(ErrorCode::kTooFewSamples,
                "need at least 20 samples, got " + std::to_string(samples.size()));
  }
}

}  // namespace

double normal_cdf(double x, double mean, double var) {
  check_var(var);
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * var));
}

double normal_quantile(double p, double mean, double var) {
  check_var(var);
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "probability must be in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal(mean, std::sqrt(var)), p);
}

double kolmogorov_survival(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 1.0) {
    // K(x) = sqrt(2 pi) / x sum exp(-(2k-1)^2 pi^2 / (8 x^2))
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    CompensatedSum s;
    for (int k = 1; k <= kSeriesTerms; ++k) {
      const double term = std::exp(-(2.0 * k - 1.0) * (2.0 * k - 1.0) * c);
      s += term;
      if (term == 0.0) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * s.value(), 0.0, 1.0);
  }
  CompensatedSum s;
  for (int k = 1; k <= kSeriesTerms; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term == 0.0) break;
  }
  return std::clamp(s.value(), 0.0, 1.0);
}

KsResult ks_test_gaussian(std::span<const double> samples, double mean, double var) {
  check_n(samples);
  check_var(var);
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i], mean, var);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f,
                  f - static_cast<double>(i) / n});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

AdResult anderson_darling_normal(std::span<const double> samples, double mean,
                                 double var) {
  check_n(samples);
  check_var(var);
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const double sd = std::sqrt(var);
  // log Phi and log(1 - Phi) through erfc keep both tails accurate.
  const auto log_cdf = [&](double v) {
    return std::log(std::max(0.5 * std::erfc(-(v - mean) / (sd * std::numbers::sqrt2)), 1e-300));
  };
  const auto log_sf = [&](double v) {
    return std::log(std::max(0.5 * std::erfc((v - mean) / (sd * std::numbers::sqrt2)), 1e-300));
  };
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 2.0 * static_cast<double>(i) + 1.0;
    s += c * (log_cdf(x[i]) + log_sf(x[n - 1 - i]));
  }
  const double nn = static_cast<double>(n);
  const double a2 = -nn - s.value() / nn;
  return {a2, a2 > kAdCritical1Pct};
}

MomentSummary moment_summary(std::span<const double> samples) {
  if (samples.empty()) throw Error(ErrorCode::kTooFewSamples, "empty sample");
  MomentSummary out;
  out.n = samples.size();
  const double n = static_cast<double>(out.n);
  CompensatedSum s1;
  for (double v : samples) s1 += v;
  out.mean = s1.value() / n;
  CompensatedSum m2, m3, m4;
  for (double v : samples) {
    const double d = v - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  out.variance = out.n > 1 ? m2.value() / (n - 1.0) : 0.0;
  out.se_mean = std::sqrt(out.variance / n);
  out.se_variance = out.n > 1 ? out.variance * std::sqrt(2.0 / (n - 1.0)) : 0.0;
  if (out.n >= 4 && m2.value() > 0.0) {
    const double b2 = m2.value() / n;
    const double g1 = (m3.value() / n) / std::pow(b2, 1.5);
    const double g2 = (m4.value() / n) / (b2 * b2) - 3.0;
    out.skewness = std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
    out.excess_kurtosis =
        (n - 1.0) / ((n - 2.0) * (n - 3.0)) * ((n + 1.0) * g2 + 6.0);
    out.se_skewness =
        std::sqrt(6.0 * n * (n - 1.0) / ((n - 2.0) * (n + 1.0) * (n + 3.0)));
    out.se_kurtosis = 2.0 * out.se_skewness *
                      std::sqrt((n * n - 1.0) / ((n - 3.0) * (n + 5.0)));
  }
  return out;
}

}  // namespace asclt
