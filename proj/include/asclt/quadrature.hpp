// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_QUADRATURE_HPP
#define ASCLT_QUADRATURE_HPP

#include <cstddef>
#include <functional>

namespace asclt {

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson with Richardson correction. Stops when the local error
/// estimate is below max(rel_tol * |estimate|, abs_tol) or at max_depth.
double adaptive_simpson(const ScalarFn& f, double a, double b,
                        double rel_tol = 1e-10, double abs_tol = 0.0,
                        int max_depth = 48);

/// Composite Simpson with a step no larger than `step` (the panel count is
/// rounded up to an even number).
double composite_simpson(const ScalarFn& f, double a, double b, double step);

/// Integral over [0, h] of s^{-q} g(s) for q in [0, 1), with g smooth.
/// Substitutes s = u^{1/(1-q)}, which absorbs the singular factor through its
/// antiderivative, then runs adaptive Simpson on the regular integrand.
double integrate_power_singular(const ScalarFn& g, double q, double h,
                                double rel_tol = 1e-10);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace asclt

#endif  // ASCLT_QUADRATURE_HPP
