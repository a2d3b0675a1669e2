// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_TESTS_FIXTURES_HPP
#define ASCLT_TESTS_FIXTURES_HPP

#include <cmath>

#include <Eigen/Dense>

#include "asclt/levy.hpp"
#include "asclt/normalization.hpp"
#include "asclt/quadrature.hpp"

namespace asclt::testing {

// V_t = [[1+t, t], [0, 1+2t]], a_t = 1/(1+t), A_t = log(1+t), U = I.
inline NormalizationFamily triangular_family() {
  NormalizationFamily f;
  f.name = "triangular";
  f.dim = 2;
  f.value = [](double t) {
    Eigen::MatrixXd v(2, 2);
    v << 1.0 + t, t, 0.0, 1.0 + 2.0 * t;
    return v;
  };
  f.derivative = [](double) {
    Eigen::MatrixXd d(2, 2);
    d << 1.0, 1.0, 0.0, 2.0;
    return d;
  };
  f.weight = [](double t) { return 1.0 / (1.0 + t); };
  f.primitive = [](double t) { return std::log1p(t); };
  f.limit = Eigen::MatrixXd::Identity(2, 2);
  return f;
}

// Midpoint Riemann-Stieltjes sum of w d(S - m s) over the grid of `path`,
// divided by v at the horizon.
inline double riemann_stieltjes_scaled(const SamplePath& path, double m,
                                       const Weight& w) {
  const TimeGrid& g = *path.grid;
  const double lv_end = w.log_v(g.horizon());
  CompensatedSum acc;
  for (std::size_t i = 0; i < g.cells(); ++i) {
    const double dm = (path.values[i + 1] - path.values[i]) - m * (g[i + 1] - g[i]);
    acc += std::exp(w.log_w(0.5 * (g[i] + g[i + 1])) - lv_end) * dm;
  }
  return acc.value();
}

}  // namespace asclt::testing

#endif  // ASCLT_TESTS_FIXTURES_HPP
