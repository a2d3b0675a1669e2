// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include "asclt/error.hpp"
#include "asclt/levy.hpp"
#include "asclt/quadrature.hpp"
#include "fixtures.hpp"

namespace asclt {
namespace {

LevyModel jump_model() {
  LevyModel m;
  m.drift = 0.3;
  m.gaussian_vol = 0.5;
  m.jump_intensity = 1.5;
  m.jump = NormalJump{0.0, std::sqrt(0.5)};
  return m;
}

TEST(JumpLaws, Moments) {
  EXPECT_DOUBLE_EQ(jump_mean(NormalJump{0.4, 0.7}), 0.4);
  EXPECT_NEAR(jump_second_moment(NormalJump{0.4, 0.7}), 0.65, 1e-15);
  EXPECT_NEAR(jump_second_moment(UniformJump{-1.0, 2.0}), 1.0, 1e-15);
  EXPECT_NEAR(jump_mean(DiscreteJump{{-1.0, 2.0}, {0.25, 0.75}}), 1.25, 1e-15);
}

TEST(JumpLaws, TruncatedSecondMomentNormal) {
  // Oracle: arbitrary-precision quadrature of x^2 phi(x) over |x| > c.
  EXPECT_NEAR(jump_truncated_second_moment(NormalJump{0.0, 1.0}, 1.3), 0.6391593084955197, 1e-13);
  EXPECT_NEAR(jump_truncated_second_moment(NormalJump{0.4, 0.7}, 0.5), 0.6136088483732233, 1e-13);
  EXPECT_NEAR(jump_truncated_second_moment(NormalJump{0.0, 1.0}, 0.0), 1.0, 1e-15);
}

TEST(JumpLaws, TruncatedSecondMomentUniformAndDiscrete) {
  // int_{0.5}^{2} x^2 / 3 dx + int_{-1}^{-0.5} x^2 / 3 dx
  const double ref = (8.0 - 0.125) / 9.0 + (1.0 - 0.125) / 9.0;
  EXPECT_NEAR(jump_truncated_second_moment(UniformJump{-1.0, 2.0}, 0.5), ref, 1e-14);
  EXPECT_DOUBLE_EQ(jump_truncated_second_moment(DiscreteJump{{-1.0, 1.0}, {0.5, 0.5}}, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(jump_truncated_second_moment(DiscreteJump{{-1.0, 1.0}, {0.5, 0.5}}, 0.5), 1.0);
}

TEST(JumpLaws, CompensatedCharacteristicFunction) {
  const double u = 1.7;
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> normal_ref =
      std::exp(i * u * 0.4 - 0.5 * u * u * 0.49) - 1.0 - i * u * 0.4;
  EXPECT_LT(std::abs(jump_compensated_cf(NormalJump{0.4, 0.7}, u) - normal_ref), 1e-8);
  const std::complex<double> uni_ref =
      (std::exp(i * u * 2.0) - std::exp(-i * u)) / (i * u * 3.0) - 1.0 - i * u * 0.5;
  EXPECT_LT(std::abs(jump_compensated_cf(UniformJump{-1.0, 2.0}, u) - uni_ref), 1e-8);
  EXPECT_NEAR(jump_compensated_cf(DiscreteJump{{-1.0, 1.0}, {0.5, 0.5}}, u).real(),
              std::cos(u) - 1.0, 1e-15);
}

TEST(LevyModel, RatesAndValidation) {
  const LevyModel m = jump_model();
  EXPECT_NEAR(m.mean_rate(), 0.3, 1e-15);
  EXPECT_NEAR(m.variance_rate(), 1.0, 1e-15);
  EXPECT_NEAR(predictable_variation(m, 4.0), 4.0, 1e-14);
  LevyModel bad = m;
  bad.jump_intensity = -1.0;
  EXPECT_THROW(bad.validate(), Error);
  bad = m;
  bad.jump = DiscreteJump{{1.0}, {0.5}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(TimeGrid, ShapeAndErrors) {
  const TimeGrid g(1.05, 0.1);
  EXPECT_EQ(g.cells(), 11u);
  EXPECT_DOUBLE_EQ(g[g.cells()], 1.05);
  EXPECT_EQ(g.floor_index(0.3), 3u);
  EXPECT_EQ(g.floor_index(1.05), 11u);
  EXPECT_EQ(g.cell_of(0.35), 3u);
  EXPECT_THROW(TimeGrid(0.0, 0.1), Error);
  EXPECT_THROW(TimeGrid(1.0, 0.0), Error);
}

TEST(Simulation, DeterministicDriftPath) {
  LevyModel m;
  m.drift = 2.0;
  Rng rng(3);
  const SamplePath p = simulate_path(m, 10.0, 0.5, rng);
  for (std::size_t i = 0; i < p.grid->size(); ++i) {
    EXPECT_NEAR(p.values[i], 2.0 * (*p.grid)[i], 1e-12);
  }
  EXPECT_TRUE(p.jumps.empty());
}

TEST(Simulation, SameSeedSamePath) {
  Rng a(99), b(99);
  const SamplePath p = simulate_path(jump_model(), 50.0, 0.1, a);
  const SamplePath q = simulate_path(jump_model(), 50.0, 0.1, b);
  EXPECT_EQ(p.values, q.values);
  ASSERT_EQ(p.jumps.size(), q.jumps.size());
}

TEST(Simulation, JumpLogConsistent) {
  Rng rng(5);
  const SamplePath p = simulate_path(jump_model(), 100.0, 0.1, rng);
  ASSERT_FALSE(p.jumps.empty());
  for (std::size_t k = 1; k < p.jumps.size(); ++k) {
    EXPECT_LT(p.jumps[k - 1].time, p.jumps[k].time);
  }
  EXPECT_GT(p.jumps.front().time, 0.0);
  EXPECT_LE(p.jumps.back().time, 100.0);
}

TEST(Simulation, TerminalMomentsMonteCarlo) {
  // S_T ~ mean m T, variance sigma^2 T; 4000 draws, 4.5 standard errors.
  const LevyModel m = jump_model();
  const double horizon = 10.0;
  const int n = 4000;
  CompensatedSum s1, s2;
  Rng rng(2024);
  for (int r = 0; r < n; ++r) {
    const double x = simulate_path(m, horizon, 0.5, rng).values.back();
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1.value() / n;
  const double var = s2.value() / n - mean * mean;
  EXPECT_NEAR(mean, 3.0, 4.5 * std::sqrt(10.0 / n));
  EXPECT_NEAR(var, 10.0, 4.5 * 10.0 * std::sqrt(2.5 / n));
}

TEST(QuadraticVariation, BrownianAndJumps) {
  LevyModel bm;
  bm.gaussian_vol = 2.0;
  Rng rng(1);
  const SamplePath p = simulate_path(bm, 10.0, 0.1, rng);
  EXPECT_NEAR(quadratic_variation(p, bm, 5.0), 20.0, 1e-12);
  EXPECT_THROW(quadratic_variation(p, bm, 11.0), Error);

  LevyModel pj;
  pj.jump_intensity = 2.0;
  pj.jump = DiscreteJump{{1.0}, {1.0}};
  const SamplePath q = simulate_path(pj, 10.0, 0.1, rng);
  EXPECT_DOUBLE_EQ(quadratic_variation(q, pj, 10.0), static_cast<double>(q.jumps.size()));
}

TEST(Refinement, KeepsCoarseKnots) {
  Rng rng(8);
  const LevyModel m = jump_model();
  const SamplePath p = simulate_path(m, 20.0, 0.1, rng);
  const SamplePath f = refine_path(p, 10, m.gaussian_vol, rng);
  ASSERT_EQ(f.grid->cells(), p.grid->cells() * 10);
  for (std::size_t i = 0; i < p.grid->size(); ++i) {
    EXPECT_NEAR(f.values[i * 10], p.values[i], 1e-12);
  }
  EXPECT_EQ(f.jumps.size(), p.jumps.size());
}

TEST(WeightedIntegral, UnitWeightReproducesMartingale) {
  Rng rng(12);
  const LevyModel m = jump_model();
  const SamplePath p = simulate_path(m, 30.0, 0.1, rng);
  const WeightedPath w = weighted_integral(p, m, unit_weight());
  for (std::size_t i = 0; i < p.grid->size(); ++i) {
    EXPECT_NEAR(w.z[i], p.values[i] - m.mean_rate() * (*p.grid)[i], 1e-10);
  }
}

TEST(WeightedIntegral, NonIntegrableWeight) {
  const Weight bad{"bad", [](double) { return 0.0; }, 1.0, [](double) { return 0.0; },
                   std::nullopt};
  EXPECT_THROW(make_weight_table(std::make_shared<const TimeGrid>(1.0, 0.01), bad), Error);
}

TEST(WeightedIntegral, ExpWeightMatchesFineRiemannStieltjes) {
  Rng rng(77);
  const LevyModel m = jump_model();
  const SamplePath p = simulate_path(m, 20.0, 0.01, rng);
  const Weight w = exp_weight(0.5);
  const WeightedPath coarse = weighted_integral(p, m, w);
  const SamplePath fine = refine_path(p, 50, m.gaussian_vol, rng);
  const double rs = testing::riemann_stieltjes_scaled(fine, m.mean_rate(), w);
  EXPECT_LE(std::abs(coarse.z.back() - rs), 1e-3 * std::abs(rs));
}

TEST(WeightedIntegral, RescaledStorageAvoidsOverflow) {
  Rng rng(4);
  LevyModel bm;
  bm.gaussian_vol = 1.0;
  const SamplePath p = simulate_path(bm, 1e6, 1.0, rng);
  const WeightedPath w = weighted_integral(p, bm, exp_weight(0.5));
  EXPECT_TRUE(std::isfinite(w.z.back()));
  EXPECT_LT(std::abs(w.z.back()), 10.0);
}

}  // namespace
}  // namespace asclt
