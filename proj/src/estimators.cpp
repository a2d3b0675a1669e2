// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "asclt/error.hpp"
#include "asclt/quadrature.hpp"

namespace asclt {
namespace {

bool same_time(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

std::vector<std::size_t> eval_indices(const TimeGrid& grid,
                                      const std::vector<double>& times) {
  std::vector<std::size_t> idx;
  idx.reserve(times.size());
  for (double t : snap_eval_times(grid, times)) idx.push_back(grid.floor_index(t));
  return idx;
}

// Trapezoid of f(s, M_s) over a path up to grid index `last`, reporting the
// running integral at every grid point through `at_grid`.
template <class F, class G>
void integrate_path(const SamplePath& path, double m, std::size_t last, F&& f,
                    G&& at_grid) {
  const TimeGrid& grid = *path.grid;
  double acc = 0.0, comp = 0.0;
  const auto add = [&](double x) {
    const double t = acc + x;
    comp += std::abs(acc) >= std::abs(x) ? (acc - t) + x : (x - t) + acc;
    acc = t;
  };
  at_grid(std::size_t{0}, 0.0);
  std::size_t cursor = 0;
  double f_prev = f(grid[0], path.values[0] - m * grid[0]);
  for (std::size_t i = 0; i < last; ++i) {
    const bool has_jump =
        cursor < path.jumps.size() && path.jumps[cursor].time <= grid[i + 1];
    if (!has_jump) {
      const double f_next = f(grid[i + 1], path.values[i + 1] - m * grid[i + 1]);
      add(0.5 * (f_prev + f_next) * (grid[i + 1] - grid[i]));
      f_prev = f_next;
    } else {
      for (const Segment& seg : cell_segments(path, i, cursor)) {
        const double f0 = f(seg.t0, seg.start - m * seg.t0);
        const double f1 = f(seg.t1, seg.end_left - m * seg.t1);
        add(0.5 * (f0 + f1) * (seg.t1 - seg.t0));
      }
      f_prev = f(grid[i + 1], path.values[i + 1] - m * grid[i + 1]);
    }
    at_grid(i + 1, acc + comp);
  }
}

// Walks a weighted path through grid points and jump knots, calling
// piece(t0, z0, lv0, t1, z1_left, lv1) for each piece and at_grid(i) after
// each cell.
template <class P, class G>
void walk_weighted(const WeightedPath& w, std::size_t last, P&& piece, G&& at_grid) {
  const TimeGrid& grid = *w.grid;
  std::size_t k = 0;
  for (std::size_t i = 0; i < last; ++i) {
    double t0 = grid[i], z0 = w.z[i], lv0 = w.log_v[i];
    while (k < w.jump_knots.size() && w.jump_knots[k].time <= grid[i + 1]) {
      const KnotValue& kv = w.jump_knots[k++];
      piece(t0, z0, lv0, kv.time, kv.z_left, kv.log_v);
      t0 = kv.time;
      z0 = kv.z_right;
      lv0 = kv.log_v;
    }
    if (grid[i + 1] > t0) piece(t0, z0, lv0, grid[i + 1], w.z[i + 1], w.log_v[i + 1]);
    at_grid(i + 1);
  }
}

void check_common_grid(std::span<const SamplePath> paths,
                       const std::vector<double>& mean_rates,
                       const NormalizationFamily& family) {
  if (paths.empty()) throw Error(ErrorCode::kDimensionMismatch, "no paths");
  if (static_cast<Eigen::Index>(paths.size()) != family.dim ||
      mean_rates.size() != paths.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "family dimension, path count and mean rates differ");
  }
  for (const SamplePath& p : paths) {
    if (p.grid->size() != paths[0].grid->size() ||
        p.grid->horizon() != paths[0].grid->horizon()) {
      throw Error(ErrorCode::kDimensionMismatch, "paths live on different grids");
    }
  }
}

// Normalized outer-product integrand at one time: X X^T * dL/ds.
struct Normalizer {
  const NormalizationFamily& family;

  Eigen::MatrixXd operator()(double s, const Eigen::VectorXd& m) const {
    const Eigen::Index d = m.size();
    if (m.isZero(0.0)) return Eigen::MatrixXd::Zero(d, d);
    const Eigen::VectorXd x = family.normalize(s, m);
    return (x * x.transpose()) * family.log_det_sq_rate(s);
  }
};

// Position of coordinate k at time t inside its own cell segments: left
// limit (or right value when `right`), linear between knots.
double coordinate_value(const std::vector<Segment>& segs, double t, bool right) {
  for (const Segment& s : segs) {
    if (right ? t < s.t1 : t <= s.t1) {
      if (t <= s.t0) return s.start;
      return s.start + (s.end_left - s.start) * (t - s.t0) / (s.t1 - s.t0);
    }
  }
  const Segment& s = segs.back();
  return s.end_left + (s.ends_in_jump && right ? s.jump_size : 0.0);
}

// Running matrix integral of V^{-1} M M^T V^{-T} dL over the merged grid.
template <class G>
void integrate_outer(std::span<const SamplePath> paths,
                     const std::vector<double>& means,
                     const NormalizationFamily& family, std::size_t last,
                     G&& at_grid) {
  const std::size_t d = paths.size();
  const TimeGrid& grid = *paths[0].grid;
  const Normalizer integrand{family};
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
  at_grid(std::size_t{0}, acc);
  std::vector<std::size_t> cursors(d, 0);
  Eigen::VectorXd m(d);
  const auto grid_state = [&](std::size_t i) {
    for (std::size_t k = 0; k < d; ++k) {
      m[k] = paths[k].values[i] - means[k] * grid[i];
    }
    return integrand(grid[i], m);
  };
  Eigen::MatrixXd f_prev = grid_state(0);
  std::vector<std::vector<Segment>> segs(d);
  std::vector<double> knots;
  for (std::size_t i = 0; i < last; ++i) {
    bool any = false;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& jumps = paths[k].jumps;
      if (cursors[k] < jumps.size() && jumps[cursors[k]].time <= grid[i + 1]) any = true;
    }
    if (!any) {
      const Eigen::MatrixXd f_next = grid_state(i + 1);
      acc += 0.5 * (f_prev + f_next) * (grid[i + 1] - grid[i]);
      f_prev = f_next;
      at_grid(i + 1, acc);
      continue;
    }
    knots.assign({grid[i]});
    for (std::size_t k = 0; k < d; ++k) {
      segs[k] = cell_segments(paths[k], i, cursors[k]);
      for (const Segment& s : segs[k]) {
        if (s.ends_in_jump) knots.push_back(s.t1);
      }
    }
    knots.push_back(grid[i + 1]);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    for (std::size_t q = 0; q + 1 < knots.size(); ++q) {
      const double u0 = knots[q], u1 = knots[q + 1];
      for (std::size_t k = 0; k < d; ++k) {
        m[k] = coordinate_value(segs[k], u0, true) - means[k] * u0;
      }
      const Eigen::MatrixXd f0 = integrand(u0, m);
      for (std::size_t k = 0; k < d; ++k) {
        m[k] = coordinate_value(segs[k], u1, false) - means[k] * u1;
      }
      const Eigen::MatrixXd f1 = integrand(u1, m);
      acc += 0.5 * (f0 + f1) * (u1 - u0);
    }
    f_prev = grid_state(i + 1);
    at_grid(i + 1, acc);
  }
}

double log_det_origin(const NormalizationFamily& family) {
  const double l0 = family.log_det_sq(0.0);
  if (!std::isfinite(l0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "family '" + family.name + "' has no finite determinant at t = 0");
  }
  return l0;
}

void check_exp_weight(const WeightedPath& wpath, double alpha) {
  if (!wpath.alpha || std::abs(*wpath.alpha - alpha) > 1e-12) {
    throw Error(ErrorCode::kWeightMismatch,
                "weighted path was not built with the exponential weight of this alpha");
  }
}

EstimatorSeries sigma2_tilde_impl(const WeightedPath& wpath, double alpha,
                                  const std::vector<double>& eval_times, bool raw) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0, 1)");
  }
  check_exp_weight(wpath, alpha);
  const TimeGrid& grid = *wpath.grid;
  const std::vector<std::size_t> idx = eval_indices(grid, eval_times);
  const double e = 1.0 - alpha;
  const auto big_a = [e](double s) { return std::pow(s, e) / e; };
  const auto g = [&](double s, double z, double lv) {
    if (z == 0.0 || s <= 0.0) return 0.0;
    if (raw) {
      const double n = z * std::exp(lv);
      return std::exp(-big_a(s)) * n * n * std::pow(s, -alpha);
    }
    return z * z * std::exp(2.0 * lv - big_a(s) - alpha * std::log(s));
  };
  EstimatorSeries out;
  out.kind = SeriesKind::kSigmaTilde;
  CompensatedSum acc;
  std::vector<double> cum(grid.size(), 0.0);
  const std::size_t last = idx.empty() ? 0 : idx.back();
  walk_weighted(
      wpath, last,
      [&](double t0, double z0, double lv0, double t1, double z1, double lv1) {
        acc += 0.5 * (g(t0, z0, lv0) + g(t1, z1, lv1)) * (t1 - t0);
      },
      [&](std::size_t i) { cum[i] = acc.value(); });
  for (std::size_t i : idx) {
    const double t = grid[i];
    out.eval_times.push_back(t);
    out.values.push_back(t > 0.0 ? cum[i] / big_a(t) : 0.0);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* series_kind_name(SeriesKind kind) noexcept {
  switch (kind) {
    case SeriesKind::kSigmaHat: return "sigma_hat";
    case SeriesKind::kSigmaTilde: return "sigma_tilde";
    case SeriesKind::kMatrixLfq: return "matrix_lfq";
    case SeriesKind::kCltStat: return "clt_stat";
    case SeriesKind::kMatrixCltStat: return "matrix_clt_stat";
    case SeriesKind::kLilStat: return "lil_stat";
    case SeriesKind::kHypothesisRate: return "hypothesis_rate";
  }
  return "unknown";
}

Eigen::MatrixXd EstimatorSeries::matrix(std::size_t k) const {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(value_dim)));
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      out(r, c) = values[k * value_dim + static_cast<std::size_t>(r * d + c)];
    }
  }
  return out;
}

std::size_t EstimatorSeries::index_of(double t) const {
  for (std::size_t k = 0; k < eval_times.size(); ++k) {
    if (same_time(eval_times[k], t)) return k;
  }
  throw Error(ErrorCode::kMissingEvalTime,
              "time " + std::to_string(t) + " is not an evaluation time");
}

std::string EstimatorSeries::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind,t";
  for (std::size_t j = 0; j < value_dim; ++j) os << ",v" << j;
  os << '\n';
  for (std::size_t k = 0; k < eval_times.size(); ++k) {
    os << series_kind_name(kind) << ',' << eval_times[k];
    for (std::size_t j = 0; j < value_dim; ++j) os << ',' << values[k * value_dim + j];
    os << '\n';
  }
  return os.str();
}

std::vector<double> snap_eval_times(const TimeGrid& grid,
                                    const std::vector<double>& eval_times) {
  std::vector<double> out;
  out.reserve(eval_times.size());
  for (std::size_t k = 0; k < eval_times.size(); ++k) {
    const double t = eval_times[k];
    if (!std::isfinite(t) || t < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "evaluation times must be >= 0");
    }
    if (t > grid.horizon() * (1.0 + 1e-12)) {
      throw Error(ErrorCode::kOutOfHorizon,
                  "evaluation time " + std::to_string(t) + " beyond horizon");
    }
    if (k > 0 && !(t > eval_times[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "evaluation times must increase");
    }
    out.push_back(grid[grid.floor_index(t)]);
  }
  return out;
}

EstimatorSeries sigma2_hat(const SamplePath& path, double mean_rate,
                           const std::vector<double>& eval_times) {
  const TimeGrid& grid = *path.grid;
  const std::vector<std::size_t> idx = eval_indices(grid, eval_times);
  std::vector<double> cum(grid.size(), 0.0);
  if (!idx.empty()) {
    integrate_path(
        path, mean_rate, idx.back(),
        [](double r, double m) {
          const double q = m / (1.0 + r);
          return q * q;
        },
        [&](std::size_t i, double v) { cum[i] = v; });
  }
  EstimatorSeries out;
  out.kind = SeriesKind::kSigmaHat;
  for (std::size_t i : idx) {
    const double t = grid[i];
    out.eval_times.push_back(t);
    out.values.push_back(t > 0.0 ? cum[i] / std::log1p(t) : 0.0);
  }
  return out;
}

EstimatorSeries sigma2_tilde(const WeightedPath& wpath, double alpha,
                             const std::vector<double>& eval_times) {
  return sigma2_tilde_impl(wpath, alpha, eval_times, false);
}

EstimatorSeries sigma2_tilde_raw(const WeightedPath& wpath, double alpha,
                                 const std::vector<double>& eval_times) {
  return sigma2_tilde_impl(wpath, alpha, eval_times, true);
}

EstimatorSeries matrix_lfq(std::span<const SamplePath> paths,
                           const std::vector<double>& mean_rates,
                           const NormalizationFamily& family,
                           const std::vector<double>& eval_times) {
  check_common_grid(paths, mean_rates, family);
  const TimeGrid& grid = *paths[0].grid;
  const std::vector<std::size_t> idx = eval_indices(grid, eval_times);
  const std::size_t d = paths.size();
  EstimatorSeries out;
  out.kind = SeriesKind::kMatrixLfq;
  out.value_dim = d * d;
  if (idx.empty()) return out;
  std::size_t next = 0;
  integrate_outer(paths, mean_rates, family, idx.back(),
                  [&](std::size_t i, const Eigen::MatrixXd& acc) {
                    while (next < idx.size() && idx[next] == i) {
                      const double t = grid[i];
                      const double l = family.log_det_sq(t);
                      out.eval_times.push_back(t);
                      for (std::size_t r = 0; r < d; ++r) {
                        for (std::size_t c = 0; c < d; ++c) {
                          const double v = acc(r, c);
                          out.values.push_back(t > 0.0 && l != 0.0 ? v / l : 0.0);
                        }
                      }
                      ++next;
                    }
                  });
  return out;
}

double clt_target_variance(double sigma2, RateKind rate, double alpha) {
  const double s4 = sigma2 * sigma2;
  return rate == RateKind::kLog ? 4.0 * s4 : 4.0 * (1.0 - alpha) * s4;
}

double clt_statistic(const EstimatorSeries& series, double sigma2, double t,
                     RateKind rate, double alpha) {
  const std::size_t k = series.index_of(t);
  const double tk = series.eval_times[k];
  const double scale = rate == RateKind::kLog ? std::sqrt(std::log1p(tk))
                                              : std::pow(tk, 0.5 * (1.0 - alpha));
  return scale * (series.scalar(k) - sigma2);
}

MatrixCltResult matrix_clt_constants(const Eigen::MatrixXd& u, const SymmetricMatrix& c) {
  if (u.rows() != c.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "U and C differ in dimension");
  }
  const SymmetricMatrix r = lyapunov_solve(SquareMatrix(u));
  const Eigen::MatrixXd& cm = c.matrix();
  const Eigen::MatrixXd& rm = r.matrix();
  const Eigen::MatrixXd chat = u * cm + cm * u.transpose();
  MatrixCltResult out;
  out.trace_s = 2.0 * u.trace();
  out.trace_chat_rcr = (chat * rm * cm * rm).trace();
  out.target_std = 2.0 * std::sqrt(out.trace_s * out.trace_chat_rcr);
  if (u.rows() == 1) out.scalar_bound = 2.0 * u(0, 0) * cm(0, 0);
  return out;
}

MatrixCltResult matrix_clt_statistic(std::span<const SamplePath> paths,
                                     const std::vector<double>& mean_rates,
                                     const NormalizationFamily& family,
                                     const SymmetricMatrix& c, double t) {
  check_common_grid(paths, mean_rates, family);
  MatrixCltResult out = matrix_clt_constants(family.limit, c);
  const TimeGrid& grid = *paths[0].grid;
  const std::size_t last = eval_indices(grid, {t}).front();
  double trace_int = 0.0;
  integrate_outer(paths, mean_rates, family, last,
                  [&](std::size_t i, const Eigen::MatrixXd& acc) {
                    if (i == last) trace_int = acc.trace();
                  });
  const double tl = grid[last];
  const double l = family.log_det_sq(tl);
  const double l0 = log_det_origin(family);
  out.statistic = l > 0.0 ? (trace_int - c.matrix().trace() * (l - l0)) / std::sqrt(l) : 0.0;
  return out;
}

double lil_normalizer(double u) {
  if (!(u > std::numbers::e)) {
    throw Error(ErrorCode::kDomainTooSmall,
                "log det V^2 = " + std::to_string(u) + " is not above e");
  }
  return std::sqrt(2.0 * u * std::log(std::log(u)));
}

double first_admissible_time(const NormalizationFamily& family, double t_lo,
                             double t_hi) {
  const auto ok = [&](double t) { return family.log_det_sq(t) > std::numbers::e; };
  if (!(t_hi >= t_lo) || !ok(t_hi)) {
    throw Error(ErrorCode::kDomainTooSmall,
                "log det V^2 stays below e on the requested range");
  }
  if (ok(t_lo)) return t_lo;
  double lo = t_lo, hi = t_hi;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

EstimatorSeries lil_statistic(std::span<const SamplePath> paths,
                              const std::vector<double>& mean_rates,
                              const NormalizationFamily& family,
                              const SymmetricMatrix& c,
                              const std::vector<double>& eval_times) {
  check_common_grid(paths, mean_rates, family);
  const TimeGrid& grid = *paths[0].grid;
  const std::vector<std::size_t> idx = eval_indices(grid, eval_times);
  for (std::size_t i : idx) lil_normalizer(family.log_det_sq(grid[i]));
  const double l0 = log_det_origin(family);
  const double tr_c = c.matrix().trace();
  EstimatorSeries out;
  out.kind = SeriesKind::kLilStat;
  if (idx.empty()) return out;
  std::size_t next = 0;
  integrate_outer(paths, mean_rates, family, idx.back(),
                  [&](std::size_t i, const Eigen::MatrixXd& acc) {
                    while (next < idx.size() && idx[next] == i) {
                      const double l = family.log_det_sq(grid[i]);
                      out.eval_times.push_back(grid[i]);
                      out.values.push_back((acc.trace() - tr_c * (l - l0)) /
                                           lil_normalizer(l));
                      ++next;
                    }
                  });
  return out;
}

EstimatorSeries lil_statistic(const WeightedPath& wpath, double c,
                              const std::vector<double>& eval_times) {
  const TimeGrid& grid = *wpath.grid;
  const std::vector<std::size_t> idx = eval_indices(grid, eval_times);
  for (std::size_t i : idx) lil_normalizer(2.0 * wpath.log_v[i]);
  EstimatorSeries out;
  out.kind = SeriesKind::kLilStat;
  if (idx.empty()) return out;
  CompensatedSum acc;
  std::vector<double> cum(grid.size(), 0.0);
  walk_weighted(
      wpath, idx.back(),
      [&](double, double z0, double lv0, double, double z1, double lv1) {
        acc += 0.5 * ((z0 * z0 - c) + (z1 * z1 - c)) * 2.0 * (lv1 - lv0);
      },
      [&](std::size_t i) { cum[i] = acc.value(); });
  for (std::size_t i : idx) {
    out.eval_times.push_back(grid[i]);
    out.values.push_back(cum[i] / lil_normalizer(2.0 * wpath.log_v[i]));
  }
  return out;
}

double lil_sup(const SamplePath& path, double mean_rate,
               const NormalizationFamily& family, double c, double t_lo,
               double t_hi, std::size_t stride) {
  if (family.dim != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "lil_sup needs a one-dimensional family");
  }
  const TimeGrid& grid = *path.grid;
  const std::size_t lo = eval_indices(grid, {t_lo}).front();
  const std::size_t hi = eval_indices(grid, {t_hi}).front();
  lil_normalizer(family.log_det_sq(grid[lo]));
  const double l0 = log_det_origin(family);
  stride = std::max<std::size_t>(stride, 1);
  double sup = 0.0;
  integrate_outer(std::span<const SamplePath>(&path, 1), {mean_rate}, family, hi,
                  [&](std::size_t i, const Eigen::MatrixXd& acc) {
                    if (i < lo || (i - lo) % stride != 0) return;
                    const double l = family.log_det_sq(grid[i]);
                    sup = std::max(sup, std::abs(acc(0, 0) - c * (l - l0)) /
                                            lil_normalizer(l));
                  });
  return sup;
}

double lil_sup(const WeightedPath& wpath, double c, double t_lo, double t_hi,
               std::size_t stride) {
  const TimeGrid& grid = *wpath.grid;
  const std::size_t lo = eval_indices(grid, {t_lo}).front();
  const std::size_t hi = eval_indices(grid, {t_hi}).front();
  lil_normalizer(2.0 * wpath.log_v[lo]);
  stride = std::max<std::size_t>(stride, 1);
  double sup = 0.0;
  CompensatedSum acc;
  walk_weighted(
      wpath, hi,
      [&](double, double z0, double lv0, double, double z1, double lv1) {
        acc += 0.5 * ((z0 * z0 - c) + (z1 * z1 - c)) * 2.0 * (lv1 - lv0);
      },
      [&](std::size_t i) {
        if (i < lo || (i - lo) % stride != 0) return;
        sup = std::max(sup, std::abs(acc.value()) /
                                lil_normalizer(2.0 * wpath.log_v[i]));
      });
  return sup;
}

double lindeberg_diagnostic(const LevyModel& model, const NormalizationFamily& family,
                            double t, double delta) {
  if (!family.scalar) {
    throw Error(ErrorCode::kInvalidArgument, "lindeberg_diagnostic needs a scalar family");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be > 0");
  if (model.jump_intensity == 0.0 || t <= 0.0) return 0.0;
  const double lv = family.scalar->log_v(t);
  const double v = std::exp(lv);
  return model.jump_intensity * t * std::exp(-2.0 * lv) *
         jump_truncated_second_moment(model.jump, delta * v);
}

EstimatorSeries hypothesis_rate_check(const SamplePath& path, const LevyModel& model,
                                      const NormalizationFamily& family,
                                      const std::vector<double>& eval_times,
                                      double rho) {
  if (!family.scalar) {
    throw Error(ErrorCode::kInvalidArgument, "hypothesis_rate_check needs a scalar family");
  }
  const double sigma2 = model.variance_rate();
  EstimatorSeries out;
  out.kind = SeriesKind::kHypothesisRate;
  for (double t : snap_eval_times(*path.grid, eval_times)) {
    const double log_v2 = 2.0 * family.scalar->log_v(t);
    const double dev =
        std::abs(std::exp(-log_v2) * quadratic_variation(path, model, t) - sigma2);
    out.eval_times.push_back(t);
    out.values.push_back(std::pow(std::max(log_v2, 0.0), rho) * dev);
  }
  return out;
}

double tail_boundedness_ratio(const EstimatorSeries& series) {
  const std::size_t n = series.size();
  if (n < 2) throw Error(ErrorCode::kTooFewSamples, "series too short");
  std::vector<double> tail(series.values.begin() + static_cast<std::ptrdiff_t>(n / 2),
                           series.values.begin() + static_cast<std::ptrdiff_t>(n));
  const double mx = *std::max_element(tail.begin(), tail.end());
  std::nth_element(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(tail.size() / 2),
                   tail.end());
  const double med = tail[tail.size() / 2];
  return med > 0.0 ? mx / med : (mx > 0.0 ? INFINITY : 1.0);
}

CharExponent char_exponent(const LevyModel& model, const NormalizationFamily& family,
                           double u, double t) {
  if (!family.scalar) {
    throw Error(ErrorCode::kInvalidArgument, "char_exponent needs a scalar family");
  }
  if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "t must be >= 0");
  const double x = u * std::exp(-family.scalar->log_v(t));
  std::complex<double> b = -0.5 * x * x * model.gaussian_vol * model.gaussian_vol * t;
  if (model.jump_intensity > 0.0) {
    b += t * model.jump_intensity * jump_compensated_cf(model.jump, x);
  }
  CharExponent out;
  out.value = std::exp(b);
  out.gaussian_gap = std::abs(out.value - std::exp(-0.5 * model.variance_rate() * u * u));
  return out;
}

}  // namespace asclt
