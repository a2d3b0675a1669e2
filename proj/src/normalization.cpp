// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/normalization.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "asclt/error.hpp"
#include "asclt/quadrature.hpp"

namespace asclt {
namespace {

Eigen::MatrixXd eye(Eigen::Index d) { return Eigen::MatrixXd::Identity(d, d); }

// Fills the matrix-valued members of a scalar family from its log form.
void complete_scalar(NormalizationFamily& f) {
  const ScalarForm form = *f.scalar;
  const Eigen::Index d = f.dim;
  f.value = [form, d](double t) -> Eigen::MatrixXd {
    return std::exp(form.log_v(t)) * eye(d);
  };
  f.derivative = [form, d](double t) -> Eigen::MatrixXd {
    return form.dlog_v(t) * std::exp(form.log_v(t)) * eye(d);
  };
  f.limit = form.eta * eye(d);
  if (!f.closed_log_det_sq) {
    f.closed_log_det_sq = [form, d](double t) {
      return 2.0 * static_cast<double>(d) * form.log_v(t);
    };
  }
}

double fd_step(double t) { return 1e-4 * std::max(std::abs(t), 1e-3); }

}  // namespace

// ---------------------------------------------------------------------------

Eigen::MatrixXd NormalizationFamily::matrix(double t) const { return value(t); }

double NormalizationFamily::log_det_sq(double t) const {
  if (closed_log_det_sq) return closed_log_det_sq(t);
  return logdet_sq(SquareMatrix(value(t)));
}

double NormalizationFamily::log_det_sq_rate(double t) const {
  if (scalar) return 2.0 * static_cast<double>(dim) * scalar->dlog_v(t);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(value(t));
  return 2.0 * lu.solve(derivative(t)).trace();
}

Eigen::VectorXd NormalizationFamily::normalize(double t,
                                               const Eigen::VectorXd& x) const {
  if (scalar) return std::exp(-scalar->log_v(t)) * x;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(value(t)).solve(x);
}

Eigen::MatrixXd NormalizationFamily::remainder(double t) const {
  if (scalar) return (scalar->dlog_v(t) / weight(t) - scalar->eta) * eye(dim);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(value(t));
  return lu.solve(derivative(t)) / weight(t) - limit;
}

SymmetricMatrix NormalizationFamily::s_matrix() const {
  return SymmetricMatrix(Eigen::MatrixXd(limit + limit.transpose()));
}

// ---------------------------------------------------------------------------
// Built-in families

NormalizationFamily sqrt_scalar(Eigen::Index dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "sqrt_scalar: dim < 1");
  NormalizationFamily f;
  f.name = "sqrt_scalar";
  f.dim = dim;
  f.weight = [](double t) { return 1.0 / (1.0 + t); };
  f.primitive = [](double t) { return std::log1p(t); };
  f.scalar = ScalarForm{[](double t) { return 0.5 * std::log1p(t); },
                        [](double t) { return 0.5 / (1.0 + t); }, 0.5};
  f.closed_log_det_sq = [d = static_cast<double>(dim)](double t) {
    return d * std::log1p(t);
  };
  f.declared_remainder = [dim](double) {
    return Eigen::MatrixXd::Zero(dim, dim).eval();
  };
  complete_scalar(f);
  return f;
}

NormalizationFamily power_diag(const std::vector<double>& betas) {
  if (betas.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "power_diag: no exponents");
  }
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::kInvalidArgument, "power_diag: exponents must be > 0");
    }
  }
  const auto d = static_cast<Eigen::Index>(betas.size());
  const Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(betas.data(), d);
  NormalizationFamily f;
  f.name = "power_diag";
  f.dim = d;
  f.value = [beta](double t) {
    return Eigen::MatrixXd(
        (0.5 * beta.array() * std::log1p(t)).exp().matrix().asDiagonal());
  };
  f.derivative = [beta](double t) {
    const Eigen::ArrayXd e = 0.5 * beta.array();
    return Eigen::MatrixXd(
        (e * ((e - 1.0) * std::log1p(t)).exp()).matrix().asDiagonal());
  };
  f.weight = [](double t) { return 1.0 / (1.0 + t); };
  f.primitive = [](double t) { return std::log1p(t); };
  f.limit = Eigen::MatrixXd((0.5 * beta).asDiagonal());
  f.declared_remainder = [d](double) { return Eigen::MatrixXd::Zero(d, d).eval(); };
  f.closed_log_det_sq = [betas](double t) {
    const double l = std::log1p(t);
    double acc = 0.0;
    for (double b : betas) acc += b * l;
    return acc;
  };
  return f;
}

NormalizationFamily weighted_exp(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "weighted_exp: alpha must be in (0, 1)");
  }
  const double e = 1.0 - alpha;
  NormalizationFamily f;
  f.name = "weighted_exp";
  f.dim = 1;
  f.weight = [alpha](double t) { return std::pow(t, -alpha); };
  f.primitive = [e](double t) { return std::pow(t, e) / e; };
  f.scalar = ScalarForm{[e](double t) { return std::pow(t, e) / (2.0 * e); },
                        [alpha](double t) { return 0.5 * std::pow(t, -alpha); },
                        0.5};
  f.declared_remainder = [](double) { return Eigen::MatrixXd::Zero(1, 1).eval(); };
  complete_scalar(f);
  return f;
}

NormalizationFamily weighted_exp_prefactor(double alpha, bool exact_weight) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "weighted_exp_prefactor: alpha must be in (0, 1)");
  }
  const double e = 1.0 - alpha;
  const auto log_v = [alpha, e](double t) {
    return -0.5 * alpha * std::log(t) - std::log(e) + std::pow(t, e) / (2.0 * e);
  };
  const auto dlog_v = [alpha](double t) {
    return -0.5 * alpha / t + 0.5 * std::pow(t, -alpha);
  };
  NormalizationFamily f;
  f.dim = 1;
  f.scalar = ScalarForm{log_v, dlog_v, 0.5};
  if (!exact_weight) {
    f.name = "weighted_exp_prefactor";
    f.weight = [alpha](double t) { return std::pow(t, -alpha); };
    f.primitive = [e](double t) { return std::pow(t, e) / e; };
    f.declared_remainder = [alpha](double t) {
      return Eigen::MatrixXd::Constant(1, 1, -0.5 * alpha * std::pow(t, alpha - 1.0))
          .eval();
    };
  } else {
    // 2 v'/v = t^{-alpha} - alpha/t is positive and decreasing for t > 1.
    const double t0 = 1.0;
    f.name = "weighted_exp_prefactor_exact";
    f.valid_from = t0;
    f.weight = [dlog_v, t0](double t) { return 2.0 * dlog_v(std::max(t, t0)); };
    f.primitive = [log_v, t0](double t) {
      return t <= t0 ? 0.0 : 2.0 * (log_v(t) - log_v(t0));
    };
    f.declared_remainder = [](double) { return Eigen::MatrixXd::Zero(1, 1).eval(); };
  }
  complete_scalar(f);
  return f;
}

std::vector<double> geometric_grid(double t0, double ratio, std::size_t count) {
  if (!(t0 > 0.0) || !(ratio > 1.0) || count == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "geometric_grid needs t0 > 0, ratio > 1, count >= 1");
  }
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = t0 * std::pow(ratio, static_cast<double>(k));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Condition checks

bool ConditionReport::passed() const {
  return c2_violations.empty() && pd_ok && deriv_err <= 1e-4 &&
         remainder_err <= 1e-4 && delta_tail <= 0.05 &&
         std::abs(equiv_ratio - 1.0) <= 0.02 && a_decreasing &&
         primitive_increasing;
}

std::string ConditionReport::to_json() const {
  nlohmann::ordered_json j;
  j["family"] = family;
  auto viol = nlohmann::json::array();
  for (const auto& [s, t] : c2_violations) viol.push_back({s, t});
  j["c2_violations"] = viol;
  j["delta_tail"] = delta_tail;
  j["delta_rate_first"] = delta_rate_first;
  j["delta_rate_last"] = delta_rate_last;
  j["delta_rate_ok"] = delta_rate_ok;
  j["pd_ok"] = pd_ok;
  j["equiv_ratio"] = equiv_ratio;
  j["deriv_err"] = deriv_err;
  j["remainder_err"] = remainder_err;
  j["a_decreasing"] = a_decreasing;
  j["primitive_increasing"] = primitive_increasing;
  j["last_time"] = last_time;
  j["passed"] = passed();
  return j.dump(2);
}

ConditionReport check_conditions(const NormalizationFamily& family,
                                 const std::vector<double>& sample_times,
                                 double tol) {
  if (sample_times.size() < 10) {
    throw Error(ErrorCode::kInvalidArgument,
                "check_conditions needs at least 10 sample times");
  }
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    if (!(sample_times[k] > sample_times[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "sample times must increase");
    }
  }
  ConditionReport rep;
  rep.family = family.name;
  rep.last_time = sample_times.back();

  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    const double s = sample_times[k - 1], t = sample_times[k];
    bool ok;
    if (family.scalar) {
      const double ls = family.scalar->log_v(s), lt = family.scalar->log_v(t);
      ok = ls <= lt + tol * std::max(1.0, std::abs(lt));
    } else {
      const Eigen::MatrixXd vs = family.matrix(s), vt = family.matrix(t);
      ok = psd_order_leq(SymmetricMatrix(Eigen::MatrixXd(vs * vs.transpose())),
                         SymmetricMatrix(Eigen::MatrixXd(vt * vt.transpose())), tol);
    }
    if (!ok) rep.c2_violations.emplace_back(s, t);
    if (!(family.weight(t) < family.weight(s))) rep.a_decreasing = false;
    if (!(family.primitive(t) > family.primitive(s))) rep.primitive_increasing = false;
  }

  const std::size_t tail_start = sample_times.size() - sample_times.size() / 4 - 1;
  const auto delta_norm = [&](double t) {
    return family.declared_remainder ? family.declared_remainder(t).norm()
                                     : family.remainder(t).norm();
  };
  for (std::size_t k = tail_start; k < sample_times.size(); ++k) {
    rep.delta_tail = std::max(rep.delta_tail, delta_norm(sample_times[k]));
  }
  const auto rate = [&](double t) {
    return delta_norm(t) * std::pow(family.primitive(t), 1.5);
  };
  rep.delta_rate_first = rate(sample_times[tail_start]);
  rep.delta_rate_last = rate(sample_times.back());
  rep.delta_rate_ok = rep.delta_rate_last <= 2.0 * rep.delta_rate_first + 1e-12;

  rep.pd_ok = is_positive_definite(family.s_matrix(), tol);

  for (double t : sample_times) {
    const double h = fd_step(t);
    Eigen::MatrixXd fd_rem;
    if (family.scalar) {
      const auto& lv = family.scalar->log_v;
      const double fd = (lv(t + h) - lv(t - h)) / (2.0 * h);
      const double declared = family.scalar->dlog_v(t);
      rep.deriv_err = std::max(
          rep.deriv_err, std::abs(fd - declared) / std::max(std::abs(declared), 1e-300));
      fd_rem = (fd / family.weight(t) - family.scalar->eta) *
               Eigen::MatrixXd::Identity(family.dim, family.dim);
    } else {
      const Eigen::MatrixXd fd =
          (family.matrix(t + h) - family.matrix(t - h)) / (2.0 * h);
      const Eigen::MatrixXd declared = family.derivative(t);
      rep.deriv_err = std::max(
          rep.deriv_err, (fd - declared).norm() / std::max(declared.norm(), 1e-300));
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(family.matrix(t));
      fd_rem = lu.solve(fd) / family.weight(t) - family.limit;
    }
    const Eigen::MatrixXd declared_rem = family.declared_remainder
                                             ? family.declared_remainder(t)
                                             : family.remainder(t);
    rep.remainder_err = std::max(rep.remainder_err, (declared_rem - fd_rem).norm());
  }

  const double t_last = sample_times.back();
  rep.equiv_ratio = family.log_det_sq(t_last) /
                    (family.primitive(t_last) * family.s_matrix().matrix().trace());
  return rep;
}

double logdet_identity_residual(const NormalizationFamily& family, double t_end,
                                double quad_step) {
  if (!(t_end > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "t_end must be > 0");
  }
  const double integral = composite_simpson(
      [&](double s) { return family.log_det_sq_rate(s); }, 0.0, t_end, quad_step);
  const double lhs_end = logdet_sq(SquareMatrix(family.matrix(t_end)));
  const double lhs_start = logdet_sq(SquareMatrix(family.matrix(0.0)));
  return std::abs(integral - (lhs_end - lhs_start));
}

double norm_bound_margin(const NormalizationFamily& family, double rho,
                               double r, int n0) {
  if (!(rho <= r)) throw Error(ErrorCode::kInvalidArgument, "need rho <= r");
  const double d = static_cast<double>(family.dim);
  const double det_term = std::exp((family.log_det_sq(rho) - family.log_det_sq(r)) / d);
  double norm_sq;
  if (family.scalar) {
    norm_sq = d * std::exp(2.0 * (family.scalar->log_v(rho) - family.scalar->log_v(r)));
  } else {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(family.matrix(r));
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::kSingular, "V_r is singular");
    }
    norm_sq = lu.solve(family.matrix(rho)).squaredNorm();
  }
  return std::pow(d, n0) * det_term - norm_sq;
}

std::optional<int> smallest_certifying_n0(const NormalizationFamily& family,
                                          double rho, double r, int max_n0) {
  for (int n0 = 1; n0 <= max_n0; ++n0) {
    if (norm_bound_margin(family, rho, r, n0) >= -1e-12) return n0;
  }
  return std::nullopt;
}

}  // namespace asclt
