// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_ESTIMATORS_HPP
#define ASCLT_ESTIMATORS_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "asclt/levy.hpp"
#include "asclt/linalg.hpp"
#include "asclt/normalization.hpp"

namespace asclt {

enum class SeriesKind { kSigmaHat, kSigmaTilde, kMatrixLfq, kCltStat, kMatrixCltStat, kLilStat,
                        kHypothesisRate };

const char* series_kind_name(SeriesKind kind) noexcept;

/// Values at increasing evaluation times. Matrix values are stored row-major
/// with `value_dim` = d * d entries per time.
struct EstimatorSeries {
  SeriesKind kind = SeriesKind::kSigmaHat;
  std::vector<double> eval_times;
  std::vector<double> values;
  std::size_t value_dim = 1;
  std::uint64_t config_hash = 0;

  std::size_t size() const noexcept { return eval_times.size(); }
  double scalar(std::size_t k) const { return values[k * value_dim]; }
  Eigen::MatrixXd matrix(std::size_t k) const;
  /// Index of `t` among eval_times (relative 1e-9 match); MissingEvalTime.
  std::size_t index_of(double t) const;
  /// "kind,t,v0,v1,..." lines with a header.
  std::string to_csv() const;
};

/// Snaps requested times down to grid points. Throws OutOfHorizon when a
/// time exceeds the horizon and InvalidArgument when times do not increase.
std::vector<double> snap_eval_times(const TimeGrid& grid,
                                    const std::vector<double>& eval_times);

/// sigma_hat^2_t = (log(1+t))^{-1} int_0^t (S_r - m r)^2 / (1+r)^2 dr by the
/// trapezoid rule on grid points and jump knots (left limits at knots).
EstimatorSeries sigma2_hat(const SamplePath& path, double mean_rate,
                           const std::vector<double>& eval_times);

/// sigma_tilde_t = A_t^{-1} int_0^t exp(-A_s) N_s^2 s^{-alpha} ds for the
/// exponential weight, evaluated as A_t^{-1} int Z_s^2 exp(2 log v_s - A_s)
/// s^{-alpha} ds. Throws WeightMismatch when the path was built with a
/// different alpha or without the exponential weight.
EstimatorSeries sigma2_tilde(const WeightedPath& wpath, double alpha,
                             const std::vector<double>& eval_times);
/// Same integral on the raw N values; overflows beyond moderate t.
EstimatorSeries sigma2_tilde_raw(const WeightedPath& wpath, double alpha,
                                 const std::vector<double>& eval_times);

/// (log det V_R^2)^{-1} int_0^R V_s^{-1} M_{s-} M_{s-}^T V_s^{-T} d log det V_s^2
/// for d independent coordinates on one grid. Coordinates without a knot at
/// another coordinate's jump time are interpolated linearly inside their own
/// segment.
EstimatorSeries matrix_lfq(std::span<const SamplePath> paths,
                           const std::vector<double>& mean_rates,
                           const NormalizationFamily& family,
                           const std::vector<double>& eval_times);

enum class RateKind { kLog, kPoly };

/// sqrt(log(1+t)) (sigma_hat^2_t - sigma^2) or t^{(1-alpha)/2} (sigma_tilde_t - sigma^2).
double clt_statistic(const EstimatorSeries& series, double sigma2, double t,
                     RateKind rate, double alpha = 0.5);
/// 4 sigma^4 or 4 (1-alpha) sigma^4.
double clt_target_variance(double sigma2, RateKind rate, double alpha = 0.5);

struct MatrixCltResult {
  double statistic = 0.0;
  double target_std = 0.0;        ///< 2 sqrt(tr S tr(C_hat R C R))
  double scalar_bound = 0.0;      ///< 2 eta C (scalar families, d = 1)
  double trace_s = 0.0;
  double trace_chat_rcr = 0.0;
};

/// Constants of the matrix CLT for limit U and covariance C.
MatrixCltResult matrix_clt_constants(const Eigen::MatrixXd& u, const SymmetricMatrix& c);

/// (log det V_t^2)^{-1/2} int_0^t tr(V_s^{-1} M_{s-} M_{s-}^T V_s^{-T} - C) d log det V_s^2.
MatrixCltResult matrix_clt_statistic(std::span<const SamplePath> paths,
                                     const std::vector<double>& mean_rates,
                                     const NormalizationFamily& family,
                                     const SymmetricMatrix& c, double t);

/// h(u) = sqrt(2 u log log u); DomainTooSmall for u <= e.
double lil_normalizer(double u);

/// Smallest t in [t_lo, t_hi] with log det V_t^2 > e (bisection), or
/// DomainTooSmall when none exists.
double first_admissible_time(const NormalizationFamily& family, double t_lo,
                             double t_hi);

/// int tr(V^{-1} M M^T V^{-T} - C) d log det V^2 / h(log det V_t^2).
EstimatorSeries lil_statistic(std::span<const SamplePath> paths,
                              const std::vector<double>& mean_rates,
                              const NormalizationFamily& family,
                              const SymmetricMatrix& c,
                              const std::vector<double>& eval_times);
/// Scalar version on a weighted path: int (Z^2 - C) dL / h(L_t) with
/// L = log v^2 of the path's normalizer.
EstimatorSeries lil_statistic(const WeightedPath& wpath, double c,
                              const std::vector<double>& eval_times);

/// max |LIL ratio| over grid points in [t_lo, t_hi] (every `stride`-th point).
double lil_sup(const SamplePath& path, double mean_rate,
               const NormalizationFamily& family, double c, double t_lo,
               double t_hi, std::size_t stride = 1);
double lil_sup(const WeightedPath& wpath, double c, double t_lo, double t_hi,
               std::size_t stride = 1);

/// (lambda t / v_t^2) E[J^2 1{|J| > delta v_t}] for a scalar family.
double lindeberg_diagnostic(const LevyModel& model, const NormalizationFamily& family,
                            double t, double delta);

/// (log v_t^2)^rho |v_t^{-2} [M]_t - sigma^2| at each eval time.
EstimatorSeries hypothesis_rate_check(const SamplePath& path, const LevyModel& model,
                                      const NormalizationFamily& family,
                                      const std::vector<double>& eval_times,
                                      double rho);
/// max / median over the last half of the series.
double tail_boundedness_ratio(const EstimatorSeries& series);

struct CharExponent {
  std::complex<double> value;  ///< exp(B_t(u / v_t))
  double gaussian_gap = 0.0;   ///< |value - exp(-sigma^2 u^2 / 2)|
};

/// Characteristic function of V_t^{-1} M_t for a scalar family.
CharExponent char_exponent(const LevyModel& model, const NormalizationFamily& family,
                           double u, double t);

}  // namespace asclt

#endif  // ASCLT_ESTIMATORS_HPP
