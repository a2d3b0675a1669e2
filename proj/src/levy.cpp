// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "asclt/error.hpp"
#include "asclt/quadrature.hpp"

namespace asclt {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double std_normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}
double std_normal_upper(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }
double std_normal_lower(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Real and imaginary parts of exp(iux) - 1 - iux without cancellation in the
// real part.
double cf_real_kernel(double ux) {
  const double h = std::sin(0.5 * ux);
  return -2.0 * h * h;
}
double cf_imag_kernel(double ux) { return std::sin(ux) - ux; }

std::complex<double> integrate_cf(const std::function<double(double)>& pdf,
                                  double lo, double hi, double u,
                                  double second_moment) {
  const double abs_tol = 1e-14 * std::max(1.0, u * u * second_moment);
  const double re = adaptive_simpson(
      [&](double x) { return cf_real_kernel(u * x) * pdf(x); }, lo, hi, 1e-10,
      abs_tol, 40);
  const double im = adaptive_simpson(
      [&](double x) { return cf_imag_kernel(u * x) * pdf(x); }, lo, hi, 1e-10,
      abs_tol, 40);
  return {re, im};
}

}  // namespace

// ---------------------------------------------------------------------------
// Jump laws

double jump_mean(const JumpDistribution& dist) {
  return std::visit(
      Overloaded{
          [](const NormalJump& j) { return j.mean; },
          [](const UniformJump& j) { return 0.5 * (j.lo + j.hi); },
          [](const DiscreteJump& j) {
            return std::inner_product(j.points.begin(), j.points.end(),
                                      j.probs.begin(), 0.0);
          }},
      dist);
}

double jump_second_moment(const JumpDistribution& dist) {
  return std::visit(
      Overloaded{
          [](const NormalJump& j) { return j.mean * j.mean + j.sd * j.sd; },
          [](const UniformJump& j) {
            return (j.lo * j.lo + j.lo * j.hi + j.hi * j.hi) / 3.0;
          },
          [](const DiscreteJump& j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < j.points.size(); ++k) {
              acc += j.probs[k] * j.points[k] * j.points[k];
            }
            return acc;
          }},
      dist);
}

double jump_truncated_second_moment(const JumpDistribution& dist, double c) {
  if (c < 0.0) return jump_second_moment(dist);
  return std::visit(
      Overloaded{
          [c](const NormalJump& j) {
            const double mu = j.mean, s = j.sd;
            if (s == 0.0) return std::abs(mu) > c ? mu * mu : 0.0;
            const double a = (c - mu) / s;
            const double b = (-c - mu) / s;
            const double upper = mu * mu * std_normal_upper(a) +
                                 2.0 * mu * s * std_normal_pdf(a) +
                                 s * s * (a * std_normal_pdf(a) + std_normal_upper(a));
            const double lower = mu * mu * std_normal_lower(b) -
                                 2.0 * mu * s * std_normal_pdf(b) +
                                 s * s * (std_normal_lower(b) - b * std_normal_pdf(b));
            return upper + lower;
          },
          [c](const UniformJump& j) {
            if (j.hi == j.lo) return std::abs(j.lo) > c ? j.lo * j.lo : 0.0;
            const auto cube = [](double x) { return x * x * x; };
            double mass = (cube(j.hi) - cube(j.lo)) / 3.0;
            const double a = std::max(j.lo, -c);
            const double b = std::min(j.hi, c);
            if (b > a) mass -= (cube(b) - cube(a)) / 3.0;
            return mass / (j.hi - j.lo);
          },
          [c](const DiscreteJump& j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < j.points.size(); ++k) {
              if (std::abs(j.points[k]) > c) {
                acc += j.probs[k] * j.points[k] * j.points[k];
              }
            }
            return acc;
          }},
      dist);
}

std::complex<double> jump_compensated_cf(const JumpDistribution& dist,
                                         double u) {
  if (u == 0.0) return {0.0, 0.0};
  return std::visit(
      Overloaded{
          [u](const NormalJump& j) -> std::complex<double> {
            if (j.sd == 0.0) {
              return {cf_real_kernel(u * j.mean), cf_imag_kernel(u * j.mean)};
            }
            const auto pdf = [&](double x) {
              return std_normal_pdf((x - j.mean) / j.sd) / j.sd;
            };
            return integrate_cf(pdf, j.mean - 12.0 * j.sd, j.mean + 12.0 * j.sd,
                                u, j.mean * j.mean + j.sd * j.sd);
          },
          [u](const UniformJump& j) -> std::complex<double> {
            if (j.hi == j.lo) {
              return {cf_real_kernel(u * j.lo), cf_imag_kernel(u * j.lo)};
            }
            const double dens = 1.0 / (j.hi - j.lo);
            return integrate_cf([dens](double) { return dens; }, j.lo, j.hi, u,
                                jump_second_moment(j));
          },
          [u](const DiscreteJump& j) -> std::complex<double> {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t k = 0; k < j.points.size(); ++k) {
              const double ux = u * j.points[k];
              acc += j.probs[k] *
                     std::complex<double>(cf_real_kernel(ux), cf_imag_kernel(ux));
            }
            return acc;
          }},
      dist);
}

double sample_jump(const JumpDistribution& dist, Rng& rng) {
  return std::visit(
      Overloaded{
          [&rng](const NormalJump& j) {
            std::normal_distribution<double> n(j.mean, j.sd);
            return j.sd == 0.0 ? j.mean : n(rng);
          },
          [&rng](const UniformJump& j) {
            if (j.hi == j.lo) return j.lo;
            std::uniform_real_distribution<double> u(j.lo, j.hi);
            return u(rng);
          },
          [&rng](const DiscreteJump& j) {
            std::discrete_distribution<std::size_t> pick(j.probs.begin(),
                                                         j.probs.end());
            return j.points[pick(rng)];
          }},
      dist);
}

// ---------------------------------------------------------------------------
// Model

double LevyModel::mean_rate() const {
  return drift + jump_intensity * jump_mean(jump);
}

double LevyModel::variance_rate() const {
  return gaussian_vol * gaussian_vol + jump_intensity * jump_second_moment(jump);
}

void LevyModel::validate() const {
  if (!std::isfinite(drift) || !std::isfinite(gaussian_vol) ||
      !std::isfinite(jump_intensity)) {
    throw Error(ErrorCode::kInvalidArgument, "model parameters must be finite");
  }
  if (gaussian_vol < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "gaussian_vol must be >= 0");
  }
  if (jump_intensity < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "jump_intensity must be >= 0");
  }
  std::visit(
      Overloaded{
          [](const NormalJump& j) {
            if (!std::isfinite(j.mean) || !std::isfinite(j.sd) || j.sd < 0.0) {
              throw Error(ErrorCode::kInvalidArgument,
                          "normal jump needs finite mean and sd >= 0");
            }
          },
          [](const UniformJump& j) {
            if (!std::isfinite(j.lo) || !std::isfinite(j.hi) || j.lo > j.hi) {
              throw Error(ErrorCode::kInvalidArgument,
                          "uniform jump needs finite lo <= hi");
            }
          },
          [](const DiscreteJump& j) {
            if (j.points.empty() || j.points.size() != j.probs.size()) {
              throw Error(ErrorCode::kInvalidArgument,
                          "discrete jump needs matching non-empty points/probs");
            }
            double total = 0.0;
            for (std::size_t k = 0; k < j.points.size(); ++k) {
              if (!std::isfinite(j.points[k]) || !(j.probs[k] >= 0.0)) {
                throw Error(ErrorCode::kInvalidArgument,
                            "discrete jump has a bad point or probability");
              }
              total += j.probs[k];
            }
            if (std::abs(total - 1.0) > 1e-12) {
              throw Error(ErrorCode::kInvalidArgument,
                          "discrete jump probabilities must sum to 1");
            }
          }},
      jump);
}

double predictable_variation(const LevyModel& model, double t) {
  return model.variance_rate() * t;
}

// ---------------------------------------------------------------------------
// Grid

TimeGrid::TimeGrid(double horizon, double step) : horizon_(horizon), step_(step) {
  if (!std::isfinite(horizon) || !(horizon > 0.0)) {
    throw Error(ErrorCode::kInvalidHorizon, "horizon must be finite and > 0");
  }
  if (!std::isfinite(step) || !(step > 0.0) || step > horizon) {
    throw Error(ErrorCode::kInvalidStep, "step must satisfy 0 < step <= horizon");
  }
  const double ratio = horizon / step;
  if (ratio > 5e8) {
    throw Error(ErrorCode::kInvalidStep, "grid would exceed 5e8 cells");
  }
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  if (n == 0) n = 1;
  times_.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) times_[i] = static_cast<double>(i) * step;
  times_[n] = horizon;
}

TimeGrid TimeGrid::from_times(std::vector<double> times, double step) {
  if (times.size() < 2 || times.front() != 0.0) {
    throw Error(ErrorCode::kInvalidHorizon, "grid must start at 0 with >= 2 points");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw Error(ErrorCode::kInvalidStep, "grid times must be strictly increasing");
    }
  }
  TimeGrid g;
  g.horizon_ = times.back();
  g.step_ = step;
  g.times_ = std::move(times);
  return g;
}

std::size_t TimeGrid::cell_of(double t) const {
  const std::size_t n = cells();
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor(t / step_)));
  i = std::min(i, n - 1);
  while (i > 0 && times_[i] > t) --i;
  while (i + 1 < n && times_[i + 1] <= t) ++i;
  return i;
}

std::size_t TimeGrid::floor_index(double t) const {
  const std::size_t n = cells();
  if (t >= horizon_ * (1.0 - 1e-12)) return n;
  const double snapped = t + 1e-9 * std::max(1.0, std::abs(t));
  auto i = static_cast<std::size_t>(std::max(0.0, std::floor(snapped / step_)));
  i = std::min(i, n);
  while (i > 0 && times_[i] > snapped) --i;
  while (i < n && times_[i + 1] <= snapped) ++i;
  return i;
}

// ---------------------------------------------------------------------------
// Simulation

SamplePath simulate_path(const LevyModel& model, double horizon, double step,
                         Rng& rng) {
  return simulate_path(model, std::make_shared<const TimeGrid>(horizon, step), rng);
}

SamplePath simulate_path(const LevyModel& model,
                         std::shared_ptr<const TimeGrid> grid, Rng& rng) {
  model.validate();
  const double horizon = grid->horizon();
  SamplePath path;
  path.grid = grid;
  path.drift = model.drift;

  if (model.jump_intensity > 0.0) {
    std::exponential_distribution<double> gap(model.jump_intensity);
    double t = 0.0;
    for (;;) {
      t += gap(rng);
      if (t > horizon) break;
      if (t <= 0.0) continue;
      path.jumps.push_back({t, sample_jump(model.jump, rng), 0.0});
    }
  }

  const std::size_t n = grid->cells();
  path.values.assign(n + 1, 0.0);
  path.gauss.assign(n, 0.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double b = model.drift;
  const double vol = model.gaussian_vol;
  const auto brownian = [&](double len) {
    return vol > 0.0 ? vol * std::sqrt(len) * normal(rng) : 0.0;
  };

  std::size_t cursor = 0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double cur = (*grid)[i];
    const double end = (*grid)[i + 1];
    double g_cell = 0.0;
    while (cursor < path.jumps.size() && path.jumps[cursor].time <= end) {
      Jump& j = path.jumps[cursor++];
      const double len = j.time - cur;
      const double g = brownian(len);
      s += b * len + g;
      g_cell += g;
      j.pre_value = s;
      s += j.size;
      cur = j.time;
    }
    const double len = end - cur;
    if (len > 0.0) {
      const double g = brownian(len);
      s += b * len + g;
      g_cell += g;
    }
    path.values[i + 1] = s;
    path.gauss[i] = g_cell;
  }
  return path;
}

std::vector<Segment> cell_segments(const SamplePath& path, std::size_t cell,
                                   std::size_t& jump_cursor) {
  const TimeGrid& grid = *path.grid;
  std::vector<Segment> out;
  double cur = grid[cell];
  double start = path.values[cell];
  const double end = grid[cell + 1];
  const double b = path.drift;
  while (jump_cursor < path.jumps.size() && path.jumps[jump_cursor].time <= end) {
    const Jump& j = path.jumps[jump_cursor++];
    const double len = j.time - cur;
    out.push_back({cur, j.time, start, j.pre_value, j.pre_value - start - b * len,
                   true, j.size, cell});
    start = j.pre_value + j.size;
    cur = j.time;
  }
  if (end > cur) {
    const double end_left = path.values[cell + 1];
    out.push_back({cur, end, start, end_left, end_left - start - b * (end - cur),
                   false, 0.0, cell});
  }
  return out;
}

void for_each_segment(const SamplePath& path,
                      const std::function<void(const Segment&)>& visit) {
  const TimeGrid& grid = *path.grid;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    const bool has_jump =
        cursor < path.jumps.size() && path.jumps[cursor].time <= grid[i + 1];
    if (!has_jump) {
      visit({grid[i], grid[i + 1], path.values[i], path.values[i + 1],
             path.gauss[i], false, 0.0, i});
      continue;
    }
    for (const Segment& seg : cell_segments(path, i, cursor)) visit(seg);
  }
}

SamplePath refine_path(const SamplePath& path, int factor, double gaussian_vol,
                       Rng& rng) {
  if (factor < 1) {
    throw Error(ErrorCode::kInvalidStep, "refine_path: factor must be >= 1");
  }
  const TimeGrid& coarse = *path.grid;
  const std::size_t n = coarse.cells();
  const auto f = static_cast<std::size_t>(factor);

  std::vector<double> times(n * f + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = (coarse[i + 1] - coarse[i]) / static_cast<double>(f);
    for (std::size_t k = 0; k < f; ++k) {
      times[i * f + k] = coarse[i] + static_cast<double>(k) * h;
    }
  }
  times[n * f] = coarse.horizon();
  auto fine = std::make_shared<const TimeGrid>(
      TimeGrid::from_times(times, coarse.step() / static_cast<double>(factor)));

  SamplePath out;
  out.grid = fine;
  out.jumps = path.jumps;
  out.drift = path.drift;
  out.seed_tag = path.seed_tag;
  out.values.assign(n * f + 1, 0.0);
  out.gauss.assign(n * f, 0.0);

  std::normal_distribution<double> normal(0.0, 1.0);
  const double var_rate = gaussian_vol * gaussian_vol;
  const double b = path.drift;

  std::size_t fine_idx = 1;  // next fine grid point to fill
  for_each_segment(path, [&](const Segment& seg) {
    // Bridge from 0 at seg.t0 to seg.gauss at seg.t1.
    double x_prev = seg.t0;
    double w_prev = 0.0;
    while (fine_idx <= n * f && times[fine_idx] < seg.t1) {
      const double x = times[fine_idx];
      const double rem = seg.t1 - x_prev;
      const double mean = w_prev + (seg.gauss - w_prev) * (x - x_prev) / rem;
      const double var = var_rate * (x - x_prev) * (seg.t1 - x) / rem;
      const double w = mean + (var > 0.0 ? std::sqrt(var) * normal(rng) : 0.0);
      out.values[fine_idx] = seg.start + b * (x - seg.t0) + w;
      x_prev = x;
      w_prev = w;
      ++fine_idx;
    }
    if (fine_idx <= n * f && times[fine_idx] == seg.t1) {
      out.values[fine_idx] =
          seg.end_left + (seg.ends_in_jump ? seg.jump_size : 0.0);
      ++fine_idx;
    }
  });

  std::size_t cursor = 0;
  for (std::size_t j = 0; j < n * f; ++j) {
    double jumps_in_cell = 0.0;
    while (cursor < out.jumps.size() && out.jumps[cursor].time <= times[j + 1]) {
      jumps_in_cell += out.jumps[cursor++].size;
    }
    out.gauss[j] = out.values[j + 1] - out.values[j] -
                   b * (times[j + 1] - times[j]) - jumps_in_cell;
  }
  return out;
}

double quadratic_variation(const SamplePath& path, const LevyModel& model,
                           double t) {
  const double horizon = path.horizon();
  if (!(t >= 0.0) || t > horizon * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kOutOfHorizon,
                "quadratic_variation: t outside [0, horizon]");
  }
  double qv = model.gaussian_vol * model.gaussian_vol * t;
  for (const Jump& j : path.jumps) {
    if (j.time > t) break;
    qv += j.size * j.size;
  }
  return qv;
}

// ---------------------------------------------------------------------------
// Weights

double Weight::log_w(double s) const {
  double lw = log_w_regular(s);
  if (sq_singularity > 0.0) lw -= 0.5 * sq_singularity * std::log(s);
  return lw;
}

Weight unit_weight() {
  return {"unit", [](double) { return 0.0; }, 0.0, [](double) { return 0.0; },
          std::nullopt};
}

Weight sqrt_weight() {
  return {"sqrt", [](double s) { return 0.5 * std::log(s); }, 0.0,
          [](double) { return 0.0; }, std::nullopt};
}

Weight exp_weight(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "exp_weight: alpha must be in (0, 1)");
  }
  const double e = 1.0 - alpha;
  auto half_primitive = [e](double t) { return std::pow(t, e) / (2.0 * e); };
  return {"exp", half_primitive, alpha, half_primitive, alpha};
}

Weight exp_weight(double alpha, std::function<double(double)> log_v,
                  std::string name) {
  Weight w = exp_weight(alpha);
  w.log_v = std::move(log_v);
  w.name = std::move(name);
  return w;
}

namespace {

struct CellIntegrals {
  double sq;
  double lin;
};

// Integrals of (w/v_ref)^2 and w/v_ref over [a, b].
CellIntegrals weight_integrals(const Weight& weight, double a, double b,
                               double log_v_ref) {
  if (b <= a) return {0.0, 0.0};
  constexpr double kRelTol = 1e-8;
  const double p = weight.sq_singularity;
  if (a == 0.0 && p > 0.0) {
    if (p >= 1.0) {
      throw Error(ErrorCode::kWeightNotIntegrable,
                  "w^2 ~ s^{-p} with p >= 1 is not integrable at 0");
    }
    const auto g2 = [&](double s) {
      return std::exp(2.0 * (weight.log_w_regular(s) - log_v_ref));
    };
    const auto g1 = [&](double s) {
      return std::exp(weight.log_w_regular(s) - log_v_ref);
    };
    return {integrate_power_singular(g2, p, b, kRelTol),
            integrate_power_singular(g1, 0.5 * p, b, kRelTol)};
  }
  const auto w2 = [&](double s) {
    return std::exp(2.0 * (weight.log_w(s) - log_v_ref));
  };
  const auto w1 = [&](double s) { return std::exp(weight.log_w(s) - log_v_ref); };
  return {adaptive_simpson(w2, a, b, kRelTol, 0.0, 30),
          adaptive_simpson(w1, a, b, kRelTol, 0.0, 30)};
}

double rescale(double z, double log_v_from, double log_v_to) {
  return z == 0.0 ? 0.0 : std::exp(log_v_from - log_v_to) * z;
}

}  // namespace

WeightTable make_weight_table(std::shared_ptr<const TimeGrid> grid,
                              const Weight& weight) {
  WeightTable table;
  table.grid = grid;
  table.weight = weight;
  const std::size_t n = grid->cells();
  table.log_v.resize(n + 1);
  table.sq.resize(n);
  table.lin.resize(n);
  for (std::size_t i = 0; i <= n; ++i) table.log_v[i] = weight.log_v((*grid)[i]);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ci = weight_integrals(weight, (*grid)[i], (*grid)[i + 1],
                                     table.log_v[i + 1]);
    if (!std::isfinite(ci.sq) || !std::isfinite(ci.lin)) {
      throw Error(ErrorCode::kWeightNotIntegrable,
                  "weight integral is not finite on cell " + std::to_string(i));
    }
    table.sq[i] = ci.sq;
    table.lin[i] = ci.lin;
  }
  return table;
}

double WeightedPath::raw_value(std::size_t i) const {
  return z[i] * std::exp(log_v[i]);
}

WeightedPath weighted_integral(const SamplePath& path, const LevyModel& model,
                               const Weight& weight) {
  return weighted_integral(path, model, make_weight_table(path.grid, weight));
}

WeightedPath weighted_integral(const SamplePath& path, const LevyModel& model,
                               const WeightTable& table) {
  const TimeGrid& grid = *path.grid;
  if (table.grid->cells() != grid.cells() ||
      table.grid->horizon() != grid.horizon()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weight table was built for a different grid");
  }
  const Weight& weight = table.weight;
  const double comp = model.drift - model.mean_rate();
  const std::size_t n = grid.cells();

  WeightedPath out;
  out.grid = path.grid;
  out.log_v = table.log_v;
  out.z.assign(n + 1, 0.0);
  out.weight_name = weight.name;
  out.alpha = weight.alpha;

  std::size_t cursor = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_jump =
        cursor < path.jumps.size() && path.jumps[cursor].time <= grid[i + 1];
    if (!has_jump) {
      const double len = grid[i + 1] - grid[i];
      const double inc = comp * table.lin[i] +
                         (path.gauss[i] != 0.0
                              ? path.gauss[i] * std::sqrt(table.sq[i] / len)
                              : 0.0);
      out.z[i + 1] = rescale(out.z[i], table.log_v[i], table.log_v[i + 1]) + inc;
      continue;
    }
    double z = out.z[i];
    double lv = table.log_v[i];
    for (const Segment& seg : cell_segments(path, i, cursor)) {
      const bool at_grid_end = seg.t1 == grid[i + 1];
      const double lv1 = at_grid_end ? table.log_v[i + 1] : weight.log_v(seg.t1);
      const auto ci = weight_integrals(weight, seg.t0, seg.t1, lv1);
      const double len = seg.t1 - seg.t0;
      double z_left = rescale(z, lv, lv1) + comp * ci.lin;
      if (seg.gauss != 0.0 && len > 0.0) z_left += seg.gauss * std::sqrt(ci.sq / len);
      double z_right = z_left;
      if (seg.ends_in_jump) {
        z_right += std::exp(weight.log_w(seg.t1) - lv1) * seg.jump_size;
        out.jump_knots.push_back({seg.t1, z_left, z_right, lv1});
      }
      z = z_right;
      lv = lv1;
    }
    out.z[i + 1] = z;
  }
  return out;
}

}  // namespace asclt
