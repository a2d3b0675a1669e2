// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_EMPIRICAL_MEASURE_HPP
#define ASCLT_EMPIRICAL_MEASURE_HPP

#include <span>
#include <string>
#include <vector>

#include "asclt/levy.hpp"
#include "asclt/normalization.hpp"

namespace asclt {

/// Weighted atoms in R^dim; locations are stored row-major, one row per atom.
struct EmpiricalMeasure {
  std::size_t dim = 1;
  std::vector<double> locations;
  std::vector<double> weights;
  bool normalized = false;

  std::size_t size() const noexcept { return weights.size(); }
  /// Scales the weights to sum to one. Throws InvalidArgument on zero mass.
  void normalize();
  /// Projection on coordinate k.
  EmpiricalMeasure marginal(std::size_t k) const;
  /// "location,weight" lines (scalar) or "x0,..,weight" with a header.
  std::string to_csv() const;
};

/// Atoms Z_r = V_r^{-1} M_r at every `subsample`-th grid point r <= R with
/// weights from the trapezoid of d log det V_r^2, i.e.
/// (L_{r+} - L_{r-}) / 2 over neighbouring atoms. Throws TooFewAtoms below 10.
EmpiricalMeasure log_empirical_measure(std::span<const SamplePath> paths,
                                       const std::vector<double>& mean_rates,
                                       const NormalizationFamily& family,
                                       double horizon, std::size_t subsample);
/// Same construction on a weighted path with L = log v^2 of its normalizer.
EmpiricalMeasure log_empirical_measure(const WeightedPath& wpath, double horizon,
                                       std::size_t subsample);
/// Builds a normalized measure from explicit atoms.
EmpiricalMeasure make_measure(std::vector<double> locations, std::vector<double> weights);

/// sup |F_mu(x) - Phi(x / sqrt(c))| over atom locations, both one-sided limits.
/// Throws NonScalarMeasure for dim > 1.
double ks_distance(const EmpiricalMeasure& measure, double c);

/// max over u of |sum_j w_j exp(i u Z_j) - exp(-u^2 c / 2)|; |u| <= 10.
double cf_distance(const EmpiricalMeasure& measure, double c,
                   const std::vector<double>& u_grid);

}  // namespace asclt

#endif  // ASCLT_EMPIRICAL_MEASURE_HPP
