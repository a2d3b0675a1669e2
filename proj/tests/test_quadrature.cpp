// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "asclt/quadrature.hpp"

namespace asclt {
namespace {

TEST(AdaptiveSimpson, SineOverHalfPeriod) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi),
              2.0, 1e-12);
}

TEST(AdaptiveSimpson, ZeroIntegralNeedsAbsTol) {
  const double v = adaptive_simpson([](double x) { return std::sin(x); }, -1.0, 1.0,
                                    1e-10, 1e-14);
  EXPECT_NEAR(v, 0.0, 1e-13);
}

TEST(AdaptiveSimpson, GaussianMass) {
  const double v = adaptive_simpson(
      [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); },
      -10.0, 10.0);
  EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(CompositeSimpson, CubicIsExact) {
  const double v = composite_simpson([](double x) { return x * x * x - 2.0 * x; }, 0.0, 3.0, 0.1);
  EXPECT_NEAR(v, 81.0 / 4.0 - 9.0, 1e-12);
}

TEST(PowerSingular, InverseSquareRoot) {
  // int_0^1 s^{-1/2} ds = 2
  EXPECT_NEAR(integrate_power_singular([](double) { return 1.0; }, 0.5, 1.0, 1e-12), 2.0,
              1e-10);
  // int_0^2 s^{-1/2} e^{-s} ds = sqrt(pi) erf(sqrt 2)
  const double ref = std::sqrt(std::numbers::pi) * std::erf(std::sqrt(2.0));
  EXPECT_NEAR(integrate_power_singular([](double s) { return std::exp(-s); }, 0.5, 2.0, 1e-12),
              ref, 1e-10);
}

TEST(CompensatedSum, RecoversCancelledTerms) {
  CompensatedSum s;
  s += 1.0;
  s += 1e100;
  s += 1.0;
  s += -1e100;
  EXPECT_EQ(s.value(), 2.0);
}

}  // namespace
}  // namespace asclt
