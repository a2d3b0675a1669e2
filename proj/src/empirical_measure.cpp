// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/empirical_measure.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>

#include "asclt/error.hpp"
#include "asclt/quadrature.hpp"
#include "asclt/stattests.hpp"

namespace asclt {
namespace {

constexpr std::size_t kMinAtoms = 10;

// Trapezoid masses of dL for atoms at the given cumulative values.
std::vector<double> trapezoid_masses(const std::vector<double>& l) {
  const std::size_t n = l.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = l[j == 0 ? 0 : j - 1];
    const double hi = l[j + 1 == n ? j : j + 1];
    w[j] = 0.5 * (hi - lo);
  }
  return w;
}

std::vector<std::size_t> atom_indices(const TimeGrid& grid, double horizon,
                                      std::size_t subsample) {
  if (subsample == 0) throw Error(ErrorCode::kInvalidArgument, "subsample must be >= 1");
  if (horizon > grid.horizon() * (1.0 + 1e-12) || horizon < 0.0) {
    throw Error(ErrorCode::kOutOfHorizon, "measure horizon beyond path horizon");
  }
  const std::size_t last = grid.floor_index(horizon);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i <= last; i += subsample) idx.push_back(i);
  return idx;
}

EmpiricalMeasure finish(std::size_t dim, std::vector<double> locations,
                        const std::vector<double>& l) {
  if (l.size() < kMinAtoms) {
    throw Error(ErrorCode::kTooFewAtoms,
                "measure has " + std::to_string(l.size()) + " atoms, need 10");
  }
  EmpiricalMeasure m;
  m.dim = dim;
  m.locations = std::move(locations);
  m.weights = trapezoid_masses(l);
  m.normalize();
  return m;
}

}  // namespace

void EmpiricalMeasure::normalize() {
  CompensatedSum total;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total.value() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "measure has zero mass");
  }
  for (double& w : weights) w /= total.value();
  normalized = true;
}

EmpiricalMeasure EmpiricalMeasure::marginal(std::size_t k) const {
  if (k >= dim) throw Error(ErrorCode::kDimensionMismatch, "marginal index out of range");
  EmpiricalMeasure out;
  out.dim = 1;
  out.weights = weights;
  out.normalized = normalized;
  out.locations.reserve(size());
  for (std::size_t j = 0; j < size(); ++j) out.locations.push_back(locations[j * dim + k]);
  return out;
}

std::string EmpiricalMeasure::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  if (dim == 1) {
    os << "location,weight\n";
  } else {
    for (std::size_t k = 0; k < dim; ++k) os << 'x' << k << ',';
    os << "weight\n";
  }
  for (std::size_t j = 0; j < size(); ++j) {
    for (std::size_t k = 0; k < dim; ++k) os << locations[j * dim + k] << ',';
    os << weights[j] << '\n';
  }
  return os.str();
}

EmpiricalMeasure log_empirical_measure(std::span<const SamplePath> paths,
                                       const std::vector<double>& mean_rates,
                                       const NormalizationFamily& family,
                                       double horizon, std::size_t subsample) {
  if (paths.empty() || static_cast<Eigen::Index>(paths.size()) != family.dim ||
      mean_rates.size() != paths.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "family dimension, path count and mean rates differ");
  }
  const TimeGrid& grid = *paths[0].grid;
  for (const SamplePath& p : paths) {
    if (p.grid->size() != grid.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "paths live on different grids");
    }
  }
  const std::size_t d = paths.size();
  std::vector<double> locations, l;
  Eigen::VectorXd m(static_cast<Eigen::Index>(d));
  for (std::size_t i : atom_indices(grid, horizon, subsample)) {
    const double t = grid[i];
    const double li = family.log_det_sq(t);
    if (!std::isfinite(li)) continue;
    for (std::size_t k = 0; k < d; ++k) {
      m[static_cast<Eigen::Index>(k)] = paths[k].values[i] - mean_rates[k] * t;
    }
    const Eigen::VectorXd z = family.normalize(t, m);
    locations.insert(locations.end(), z.data(), z.data() + z.size());
    l.push_back(li);
  }
  return finish(d, std::move(locations), l);
}

EmpiricalMeasure log_empirical_measure(const WeightedPath& wpath, double horizon,
                                       std::size_t subsample) {
  std::vector<double> locations, l;
  for (std::size_t i : atom_indices(*wpath.grid, horizon, subsample)) {
    const double li = 2.0 * wpath.log_v[i];
    if (!std::isfinite(li)) continue;
    locations.push_back(wpath.z[i]);
    l.push_back(li);
  }
  return finish(1, std::move(locations), l);
}

EmpiricalMeasure make_measure(std::vector<double> locations, std::vector<double> weights) {
  if (locations.size() != weights.size() || locations.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, "locations and weights differ in size");
  }
  for (double x : locations) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "non-finite location");
  }
  EmpiricalMeasure m;
  m.locations = std::move(locations);
  m.weights = std::move(weights);
  m.normalize();
  return m;
}

double ks_distance(const EmpiricalMeasure& measure, double c) {
  if (measure.dim != 1) {
    throw Error(ErrorCode::kNonScalarMeasure, "ks_distance needs scalar atoms");
  }
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "variance must be > 0");
  const std::size_t n = measure.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return measure.locations[a] < measure.locations[b];
  });
  CompensatedSum total;
  for (double w : measure.weights) total += w;
  const double mass = total.value();
  CompensatedSum cum;
  double d = 0.0;
  std::size_t j = 0;
  while (j < n) {
    const double x = measure.locations[order[j]];
    const double below = cum.value() / mass;
    while (j < n && measure.locations[order[j]] == x) cum += measure.weights[order[j++]];
    const double at = cum.value() / mass;
    const double phi = normal_cdf(x, 0.0, c);
    d = std::max({d, std::abs(at - phi), std::abs(below - phi)});
  }
  return std::min(d, 1.0);
}

double cf_distance(const EmpiricalMeasure& measure, double c,
                   const std::vector<double>& u_grid) {
  if (measure.dim != 1) {
    throw Error(ErrorCode::kNonScalarMeasure, "cf_distance needs scalar atoms");
  }
  if (u_grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty u grid");
  CompensatedSum total;
  for (double w : measure.weights) total += w;
  double out = 0.0;
  for (double u : u_grid) {
    if (!(std::abs(u) <= 10.0)) {
      throw Error(ErrorCode::kInvalidArgument, "|u| must be <= 10");
    }
    CompensatedSum re, im;
    for (std::size_t j = 0; j < measure.size(); ++j) {
      const double a = u * measure.locations[j];
      re += measure.weights[j] * std::cos(a);
      im += measure.weights[j] * std::sin(a);
    }
    const std::complex<double> psi(re.value() / total.value(), im.value() / total.value());
    out = std::max(out, std::abs(psi - std::exp(-0.5 * u * u * c)));
  }
  return out;
}

}  // namespace asclt
