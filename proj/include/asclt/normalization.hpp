// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_NORMALIZATION_HPP
#define ASCLT_NORMALIZATION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asclt/linalg.hpp"

namespace asclt {

/// Scalar normalization V_t = v_t I_d handled in log space, since v_t can
/// exceed double range for the exponential families.
struct ScalarForm {
  std::function<double(double)> log_v;   ///< log v_t
  std::function<double(double)> dlog_v;  ///< v'_t / v_t
  double eta = 0.5;
};

/// Deterministic normalization family with an explicit witness of its growth conditions:
/// V_t, dV_t/dt, a_t, A_t and the limit matrix U of a_t^{-1} V_t^{-1} V'_t.
struct NormalizationFamily {
  std::string name;
  Eigen::Index dim = 1;
  std::function<Eigen::MatrixXd(double)> value;       ///< V_t
  std::function<Eigen::MatrixXd(double)> derivative;  ///< dV_t / dt
  std::function<double(double)> weight;               ///< a_t
  std::function<double(double)> primitive;            ///< A_t
  Eigen::MatrixXd limit;                              ///< U
  /// Declared Delta_t; when empty the remainder is computed from V and V'.
  std::function<Eigen::MatrixXd(double)> declared_remainder;
  /// Closed form of log det V_t^2 when one is known.
  std::function<double(double)> closed_log_det_sq;
  std::optional<ScalarForm> scalar;
  /// Start of the range on which the witness is valid.
  double valid_from = 0.0;

  bool is_scalar() const noexcept { return scalar.has_value(); }

  Eigen::MatrixXd matrix(double t) const;
  /// log det V_t^2, via the closed form or a pivoted factorization.
  double log_det_sq(double t) const;
  /// d/dt log det V_t^2 = 2 tr(V_t^{-1} V'_t).
  double log_det_sq_rate(double t) const;
  /// Z = V_t^{-1} x.
  Eigen::VectorXd normalize(double t, const Eigen::VectorXd& x) const;
  /// a_t^{-1} V_t^{-1} V'_t - U from the declared derivative.
  Eigen::MatrixXd remainder(double t) const;
  /// S = U + U^T.
  SymmetricMatrix s_matrix() const;
};

/// v_t = sqrt(1 + t), a_t = 1/(1+t), A_t = log(1+t), eta = 1/2, delta = 0.
NormalizationFamily sqrt_scalar(Eigen::Index dim = 1);

/// V_t = diag((1+t)^{beta_i/2}), a_t = 1/(1+t), U = diag(beta_i / 2).
NormalizationFamily power_diag(const std::vector<double>& betas);

/// Normalizer of the exponentially weighted PAIS:
/// v_t = exp(t^{1-alpha} / (2(1-alpha))), a_t = t^{-alpha},
/// A_t = t^{1-alpha} / (1-alpha), eta = 1/2, delta = 0.
NormalizationFamily weighted_exp(double alpha);

/// v_t = t^{-alpha/2} / (1-alpha) * exp(t^{1-alpha} / (2(1-alpha))), i.e. the
/// weight itself used as a normalizer. With a_t = t^{-alpha} the declared
/// remainder is delta_t = -(alpha/2) t^{alpha-1}, which decays slower than
/// A_t^{-3/2}. With `exact_weight` the witness is a_t = 2 v'_t / v_t
/// (delta = 0), valid from t = 1 where it is positive and decreasing.
NormalizationFamily weighted_exp_prefactor(double alpha, bool exact_weight = false);

/// t0 * ratio^k for k = 0 .. count-1.
std::vector<double> geometric_grid(double t0, double ratio, std::size_t count);

struct ConditionReport {
  std::string family;
  std::vector<std::pair<double, double>> c2_violations;  ///< (s, t) pairs where V_s is not below V_t
  double delta_tail = 0.0;       ///< max ||Delta_t|| over the last quartile
  double delta_rate_first = 0.0; ///< ||Delta_t|| A_t^{3/2} at the tail start
  double delta_rate_last = 0.0;  ///< ||Delta_t|| A_t^{3/2} at the last sample
  bool delta_rate_ok = true;     ///< last <= 2 * first (no growth)
  bool pd_ok = false;            ///< U + U^T positive definite
  double equiv_ratio = 0.0;      ///< log det V_t^2 / (A_t tr S), last sample
  double deriv_err = 0.0;        ///< finite-difference vs declared V'
  double remainder_err = 0.0;    ///< declared Delta vs finite-difference Delta
  bool a_decreasing = true;
  bool primitive_increasing = true;
  double last_time = 0.0;

  /// All checks within tolerance: no monotonicity violation, pd_ok, deriv_err and
  /// remainder_err <= 1e-4, delta_tail <= 0.05, |equiv_ratio - 1| <= 0.02,
  /// monotone a and A.
  bool passed() const;
  std::string to_json() const;
};

/// Samples the growth conditions on `sample_times` (increasing, >= 10 points). Scalar
/// families compare log v for monotonicity; matrix families use psd_order_leq on
/// V V^T with tolerance `tol`.
ConditionReport check_conditions(const NormalizationFamily& family,
                                 const std::vector<double>& sample_times,
                                 double tol = 1e-10);

/// |int_0^{t_end} 2 tr(V_s^{-1} V'_s) ds - (log det V_{t_end}^2 - log det V_0^2)|
/// with composite Simpson at `quad_step`; the determinants go through
/// logdet_sq on the evaluated matrices.
double logdet_identity_residual(const NormalizationFamily& family, double t_end,
                                double quad_step);

/// d^{n0} (det V_rho / det V_r)^{2/d} - ||V_r^{-1} V_rho||_F^2.
double norm_bound_margin(const NormalizationFamily& family, double rho,
                               double r, int n0);

/// Smallest n0 in [1, max_n0] with margin >= -1e-12 (rounding slack).
std::optional<int> smallest_certifying_n0(const NormalizationFamily& family,
                                          double rho, double r, int max_n0 = 64);

}  // namespace asclt

#endif  // ASCLT_NORMALIZATION_HPP
