// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/quadrature.hpp"

#include <cmath>

#include "asclt/error.hpp"

namespace asclt {
namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const ScalarFn& f, const Panel& p, double rel_tol, double abs_tol,
              int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
  const double both = left + right;
  const double delta = both - p.whole;
  const double tol = std::max(rel_tol * std::abs(both), abs_tol);
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !std::isfinite(delta)) {
    return both + delta / 15.0;
  }
  return refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, rel_tol, abs_tol,
                depth - 1) +
         refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, rel_tol, abs_tol,
                depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double rel_tol,
                        double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  // One forced split so a coincidentally flat first panel cannot stop early.
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  return refine(f, {a, lm, m, fa, flm, fm, left}, rel_tol, abs_tol,
                max_depth - 1) +
         refine(f, {m, rm, b, fm, frm, fb, right}, rel_tol, abs_tol,
                max_depth - 1);
}

double composite_simpson(const ScalarFn& f, double a, double b, double step) {
  if (!(step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "composite_simpson: step must be > 0");
  }
  if (a == b) return 0.0;
  auto n = static_cast<long>(std::ceil(std::abs(b - a) / step));
  if (n < 2) n = 2;
  if (n % 2 != 0) ++n;
  const double h = (b - a) / static_cast<double>(n);
  CompensatedSum acc;
  acc += f(a);
  acc += f(b);
  for (long i = 1; i < n; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
  }
  return acc.value() * h / 3.0;
}

double integrate_power_singular(const ScalarFn& g, double q, double h,
                                double rel_tol) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "integrate_power_singular: exponent must lie in [0, 1)");
  }
  if (h <= 0.0) return 0.0;
  if (q == 0.0) return adaptive_simpson(g, 0.0, h, rel_tol);
  const double p = 1.0 / (1.0 - q);
  const auto transformed = [&](double u) { return g(std::pow(u, p)); };
  return p * adaptive_simpson(transformed, 0.0, std::pow(h, 1.0 - q), rel_tol);
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace asclt
