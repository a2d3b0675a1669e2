// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASCLT_HARNESS_HPP
#define ASCLT_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asclt/levy.hpp"
#include "asclt/normalization.hpp"

namespace asclt {

enum class ExperimentKind { kAsclt, kLfqConsistency, kCltLfq, kLil, kConditions };

const char* experiment_kind_name(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(const std::string& name);

enum class EstimatorKind { kAuto, kSigmaHat, kSigmaTilde, kMatrixLfq };

struct FamilySpec {
  std::string type = "sqrt_scalar";  ///< sqrt_scalar | power_diag | weighted_exp | weighted_exp_prefactor
  std::size_t dim = 1;
  std::vector<double> betas;
  double alpha = 0.5;
};

struct EvalTimesSpec {
  double t0 = 100.0;
  double ratio = 10.0;
  std::size_t count = 3;
};

struct Tolerances {
  double ks_max = 0.15;
  double ks_pass_fraction = 0.8;
  double mean_tol = 0.05;
  double var_rel_tol = 0.3;
  double lil_slack = 1.5;
  double lil_t_lo = 100.0;
  double lil_t_hi = 10000.0;
  double lil_max_violation_fraction = 0.1;
  std::size_t lil_stride = 10;
  std::size_t subsample = 1;
};

struct ExperimentConfig {
  LevyModel model;
  FamilySpec family;
  double horizon = 1e4;
  double step = 0.01;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 1;
  EvalTimesSpec eval_times;
  ExperimentKind experiment = ExperimentKind::kLfqConsistency;
  EstimatorKind estimator = EstimatorKind::kAuto;
  Tolerances tolerances;
  std::string output;  ///< default output directory; may be empty

  /// Throws ConfigInvalid: replicates >= 1, step <= horizon / 100,
  /// sigma^2 > 0, consistent family parameters.
  void validate() const;
  std::vector<double> eval_time_list() const;
  /// Estimator used by lfq_consistency / clt_lfq after resolving kAuto.
  EstimatorKind resolved_estimator() const;
};

/// Parses a JSON document; unknown keys at any level raise ConfigInvalid.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& config);
/// FNV-1a of the canonical JSON form.
std::uint64_t config_hash(const ExperimentConfig& config);

NormalizationFamily make_family(const FamilySpec& spec);

/// splitmix64 finalizer of base + golden * (index + 1); a bijection in index.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::uint64_t index);

struct ReplicateValue {
  double t;
  std::string kind;
  double value;
};

struct ReplicateReport {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<ReplicateValue> values;
};

struct AggregateReport {
  ExperimentConfig config;
  std::uint64_t config_hash = 0;
  std::string conditions_json;
  bool conditions_passed = false;
  std::vector<ReplicateReport> replicates;
  std::string aggregate_json;
  bool gated = true;   ///< false when the experiment only reports
  bool passed = false;

  std::string replicates_csv() const;
  /// Writes replicates.csv, aggregate.json and conditions.json into `dir`.
  void write(const std::string& dir) const;
};

/// Runs all replicates on `threads` workers (0 = hardware concurrency).
/// Throws ConditionsFailed when the family fails its condition check.
AggregateReport run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Condition report on 40 log-spaced times in [max(1, t0), horizon].
ConditionReport family_conditions(const ExperimentConfig& config);

struct CltSummary {
  double variance_est = 0.0;
  double variance_target = 0.0;
  double mean = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ad_statistic = 0.0;
  bool ad_reject = false;
  double ks_statistic = 0.0;
  double ks_p = 1.0;
};

/// Normality tests of statistics against N(0, target).
CltSummary summarize_clt(std::span<const double> stats, double target_variance);

/// Writes one CSV of (t, S_t) per replicate, every `stride`-th grid point.
void simulate_to_dir(const ExperimentConfig& config, const std::string& dir,
                     std::size_t stride, unsigned threads = 1);
/// Writes the estimator series of every replicate as series_<i>.csv.
void estimate_to_dir(const ExperimentConfig& config, const std::string& dir,
                     unsigned threads = 1);

/// Plain-text table of an aggregate.json document.
std::string render_report(const std::string& aggregate_json);

}  // namespace asclt

#endif  // ASCLT_HARNESS_HPP
