// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_LEVY_HPP
#define ASCLT_LEVY_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace asclt {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Jump laws

struct NormalJump {
  double mean = 0.0;
  double sd = 1.0;
};

struct UniformJump {
  double lo = -1.0;
  double hi = 1.0;
};

struct DiscreteJump {
  std::vector<double> points;
  std::vector<double> probs;
};

using JumpDistribution = std::variant<NormalJump, UniformJump, DiscreteJump>;

double jump_mean(const JumpDistribution& dist);
double jump_second_moment(const JumpDistribution& dist);

/// E[J^2 1{|J| > c}] in closed form (Normal, Uniform) or by exact sum.
double jump_truncated_second_moment(const JumpDistribution& dist, double c);

/// E[exp(iuJ)] - 1 - iu E[J]. Discrete is summed exactly; Normal and Uniform
/// use adaptive quadrature at relative tolerance 1e-8.
std::complex<double> jump_compensated_cf(const JumpDistribution& dist, double u);

double sample_jump(const JumpDistribution& dist, Rng& rng);

// ---------------------------------------------------------------------------
// Model

/// Finite-activity Levy process S_t = b t + sigma_c W_t + compound Poisson.
struct LevyModel {
  double drift = 0.0;           ///< b
  double gaussian_vol = 0.0;    ///< sigma_c
  double jump_intensity = 0.0;  ///< lambda
  JumpDistribution jump = NormalJump{};

  /// m = E S_1 = b + lambda E[J]
  double mean_rate() const;
  /// sigma^2 = sigma_c^2 + lambda E[J^2]
  double variance_rate() const;

  /// Throws InvalidArgument on negative intensity/volatility, non-finite
  /// parameters or a malformed jump law. sigma^2 = 0 is allowed here; the
  /// experiment harness rejects it.
  void validate() const;
};

/// <M>_t = sigma^2 t.
double predictable_variation(const LevyModel& model, double t);

// ---------------------------------------------------------------------------
// Paths

/// Simulation grid 0 = t_0 < t_1 < ... < t_n = T with t_i = i * step except
/// possibly a shorter last cell.
class TimeGrid {
 public:
  TimeGrid(double horizon, double step);

  /// Grid with explicit increasing times (times.front() == 0); `step` is the
  /// nominal cell width used for index lookup.
  static TimeGrid from_times(std::vector<double> times, double step);

  double horizon() const noexcept { return horizon_; }
  double step() const noexcept { return step_; }
  std::size_t cells() const noexcept { return times_.size() - 1; }
  std::size_t size() const noexcept { return times_.size(); }
  double operator[](std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const noexcept { return times_; }

  /// Index of the cell [t_i, t_{i+1}) containing t (last cell is closed).
  std::size_t cell_of(double t) const;
  /// Largest grid index i with t_i <= t (up to a relative 1e-9 snap).
  std::size_t floor_index(double t) const;

 private:
  TimeGrid() = default;

  double horizon_ = 0.0;
  double step_ = 0.0;
  std::vector<double> times_;
};

struct Jump {
  double time;
  double size;
  double pre_value;  ///< S(time-)
};

/// One trajectory of S on a grid plus the exact jump log.
struct SamplePath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> values;  ///< S at grid points, values[0] = 0
  std::vector<double> gauss;   ///< per-cell Brownian part sigma_c (W_{i+1} - W_i)
  std::vector<Jump> jumps;     ///< ordered by time, all in (0, T]
  double drift = 0.0;          ///< b of the generating model
  std::uint64_t seed_tag = 0;

  double horizon() const { return grid->horizon(); }
};

/// Exact-in-distribution simulation. Jump times come from exponential
/// interarrivals over (0, T]; Brownian increments are drawn per sub-interval
/// between consecutive knots (grid points and jump times).
/// Throws InvalidHorizon / InvalidStep.
SamplePath simulate_path(const LevyModel& model, double horizon, double step,
                         Rng& rng);
SamplePath simulate_path(const LevyModel& model,
                         std::shared_ptr<const TimeGrid> grid, Rng& rng);

/// Brownian-bridge refinement onto a grid with step / factor. Values at the
/// coarse knots and the jump log are kept; only the Gaussian part between
/// knots is filled in.
SamplePath refine_path(const SamplePath& path, int factor, double gaussian_vol,
                       Rng& rng);

/// [M]_t = sigma_c^2 t + sum_{s <= t} (Delta S_s)^2. Throws OutOfHorizon.
double quadratic_variation(const SamplePath& path, const LevyModel& model,
                           double t);

/// A piece of a path between two consecutive knots.
struct Segment {
  double t0, t1;
  double start;        ///< S(t0), right value
  double end_left;     ///< S(t1-)
  double gauss;        ///< Brownian part over [t0, t1]
  bool ends_in_jump;
  double jump_size;    ///< S(t1) - S(t1-) when ends_in_jump
  std::size_t cell;    ///< grid cell containing the segment
};

/// Visits the segments of `path` in time order.
void for_each_segment(const SamplePath& path,
                      const std::function<void(const Segment&)>& visit);

/// Segments for grid cell i (1 + number of jumps in the cell of them).
std::vector<Segment> cell_segments(const SamplePath& path, std::size_t cell,
                                   std::size_t& jump_cursor);

// ---------------------------------------------------------------------------
// Weighted integrals

/// Deterministic positive weight w on (0, T] together with the scalar
/// normalizer v used to store the rescaled integral Z = N / v.
///
/// log_w(s) = log_w_regular(s) - (sq_singularity / 2) log s, so that w^2
/// behaves like s^{-sq_singularity} near 0.
struct Weight {
  std::string name;
  std::function<double(double)> log_w_regular;
  double sq_singularity = 0.0;
  std::function<double(double)> log_v;  ///< log v_t; may be +inf at t = 0
  std::optional<double> alpha;          ///< set for the exponential weight

  double log_w(double s) const;
};

/// w = 1, v = 1.
Weight unit_weight();
/// w = sqrt(s), v = 1.
Weight sqrt_weight();
/// w_s = s^{-alpha/2} exp(s^{1-alpha} / (2(1-alpha))),
/// v_t = exp(t^{1-alpha} / (2(1-alpha))).
Weight exp_weight(double alpha);
/// Same weight with the normalizer replaced by `log_v`.
Weight exp_weight(double alpha, std::function<double(double)> log_v,
                  std::string name);

/// Per-cell integrals of w against a fixed grid, normalized by v at the cell
/// end so that nothing overflows. Shared between replicates on one grid.
struct WeightTable {
  std::shared_ptr<const TimeGrid> grid;
  Weight weight;
  std::vector<double> log_v;      ///< log v at grid points
  std::vector<double> sq;         ///< int_cell (w / v_{i+1})^2 ds
  std::vector<double> lin;        ///< int_cell  w / v_{i+1} ds
};

/// Throws WeightNotIntegrable when the first-cell integral of w^2 diverges.
WeightTable make_weight_table(std::shared_ptr<const TimeGrid> grid,
                              const Weight& weight);

struct KnotValue {
  double time;
  double z_left;
  double z_right;
  double log_v;
};

/// N_t = int_0^t w d(S - m s), stored as Z_t = N_t / v_t.
struct WeightedPath {
  std::shared_ptr<const TimeGrid> grid;
  std::vector<double> z;       ///< Z at grid points
  std::vector<double> log_v;   ///< log v at grid points
  std::vector<KnotValue> jump_knots;
  std::string weight_name;
  std::optional<double> alpha;

  /// N at grid point i; overflows to inf for large t with the exp weight.
  double raw_value(std::size_t i) const;
};

/// Builds N through the rescaling recursion
///   Z_{t'} = (v_t / v_{t'}) Z_t + (cell increment of N) / v_{t'}
/// with the ratio taken in log space. Gaussian pieces are drawn exactly as
/// sigma_c z sqrt(int w^2) using the path's own Brownian increments.
WeightedPath weighted_integral(const SamplePath& path, const LevyModel& model,
                               const WeightTable& table);
WeightedPath weighted_integral(const SamplePath& path, const LevyModel& model,
                               const Weight& weight);

}  // namespace asclt

#endif  // ASCLT_LEVY_HPP
