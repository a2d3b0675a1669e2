// Copyright 2026 The asclt-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "asclt/c_api.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "asclt/error.hpp"
#include "asclt/harness.hpp"
#include "asclt/linalg.hpp"
#include "asclt/stattests.hpp"

struct asclt_config {
  asclt::ExperimentConfig value;
};

struct asclt_report {
  asclt::AggregateReport value;
};

namespace {

thread_local std::string g_last_error;

asclt_status to_status(asclt::ErrorCode code) {
  using asclt::ErrorCode;
  switch (code) {
    case ErrorCode::kOk: return ASCLT_OK;
    case ErrorCode::kInvalidArgument: return ASCLT_INVALID_ARGUMENT;
    case ErrorCode::kNotStabilizable: return ASCLT_NOT_STABILIZABLE;
    case ErrorCode::kSingular: return ASCLT_SINGULAR;
    case ErrorCode::kDimensionMismatch: return ASCLT_DIMENSION_MISMATCH;
    case ErrorCode::kInvalidHorizon: return ASCLT_INVALID_HORIZON;
    case ErrorCode::kInvalidStep: return ASCLT_INVALID_STEP;
    case ErrorCode::kOutOfHorizon: return ASCLT_OUT_OF_HORIZON;
    case ErrorCode::kWeightNotIntegrable: return ASCLT_WEIGHT_NOT_INTEGRABLE;
    case ErrorCode::kWeightMismatch: return ASCLT_WEIGHT_MISMATCH;
    case ErrorCode::kMissingEvalTime: return ASCLT_MISSING_EVAL_TIME;
    case ErrorCode::kDomainTooSmall: return ASCLT_DOMAIN_TOO_SMALL;
    case ErrorCode::kTooFewAtoms: return ASCLT_TOO_FEW_ATOMS;
    case ErrorCode::kNonScalarMeasure: return ASCLT_NON_SCALAR_MEASURE;
    case ErrorCode::kTooFewSamples: return ASCLT_TOO_FEW_SAMPLES;
    case ErrorCode::kConfigInvalid: return ASCLT_CONFIG_INVALID;
    case ErrorCode::kConditionsFailed: return ASCLT_CONDITIONS_FAILED;
    case ErrorCode::kIoError: return ASCLT_IO_ERROR;
  }
  return ASCLT_INTERNAL;
}

template <class F>
asclt_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return ASCLT_OK;
  } catch (const asclt::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ASCLT_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ASCLT_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return ASCLT_INTERNAL;
  }
}

asclt_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return ASCLT_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* asclt_version(void) { return "0.1.0"; }

const char* asclt_last_error(void) { return g_last_error.c_str(); }

const char* asclt_status_name(asclt_status status) {
  switch (status) {
    case ASCLT_OK: return "Ok";
    case ASCLT_INTERNAL: return "Internal";
    default:
      if (status > ASCLT_OK && status <= ASCLT_IO_ERROR) {
        return asclt::error_code_name(static_cast<asclt::ErrorCode>(status));
      }
      return "Unknown";
  }
}

void asclt_string_free(char* s) { std::free(s); }

asclt_status asclt_config_parse(const char* json, asclt_config** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new asclt_config{asclt::parse_config(json)}; });
}

asclt_status asclt_config_load(const char* path, asclt_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new asclt_config{asclt::load_config(path)}; });
}

void asclt_config_free(asclt_config* config) { delete config; }

asclt_status asclt_config_set_seed(asclt_config* config, uint64_t seed) {
  if (!config) return null_arg("config");
  config->value.base_seed = seed;
  return ASCLT_OK;
}

asclt_status asclt_config_set_replicates(asclt_config* config, uint64_t n) {
  if (!config) return null_arg("config");
  return guarded([&] {
    asclt::ExperimentConfig c = config->value;
    c.replicates = static_cast<std::size_t>(n);
    c.validate();
    config->value = c;
  });
}

asclt_status asclt_config_set_experiment(asclt_config* config, const char* name) {
  if (!config) return null_arg("config");
  if (!name) return null_arg("name");
  return guarded([&] { config->value.experiment = asclt::parse_experiment_kind(name); });
}

asclt_status asclt_config_to_json(const asclt_config* config, char** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup_string(asclt::config_to_json(config->value)); });
}

asclt_status asclt_config_hash(const asclt_config* config, uint64_t* out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] { *out = asclt::config_hash(config->value); });
}

const char* asclt_config_output(const asclt_config* config) {
  return config ? config->value.output.c_str() : "";
}

asclt_status asclt_run(const asclt_config* config, unsigned threads, asclt_report** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded(
      [&] { *out = new asclt_report{asclt::run_experiment(config->value, threads)}; });
}

void asclt_report_free(asclt_report* report) { delete report; }

int asclt_report_passed(const asclt_report* report) {
  return report && report->value.passed ? 1 : 0;
}

int asclt_report_gated(const asclt_report* report) {
  return report && report->value.gated ? 1 : 0;
}

asclt_status asclt_report_aggregate_json(const asclt_report* report, char** out) {
  if (!report) return null_arg("report");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup_string(report->value.aggregate_json); });
}

asclt_status asclt_report_conditions_json(const asclt_report* report, char** out) {
  if (!report) return null_arg("report");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup_string(report->value.conditions_json); });
}

asclt_status asclt_report_write(const asclt_report* report, const char* dir) {
  if (!report) return null_arg("report");
  if (!dir) return null_arg("dir");
  return guarded([&] { report->value.write(dir); });
}

asclt_status asclt_check_family(const asclt_config* config, char** json_out, int* passed) {
  if (!config) return null_arg("config");
  if (!json_out) return null_arg("json_out");
  return guarded([&] {
    const asclt::ConditionReport rep = asclt::family_conditions(config->value);
    *json_out = dup_string(rep.to_json());
    if (passed) *passed = rep.passed() ? 1 : 0;
  });
}

asclt_status asclt_simulate(const asclt_config* config, const char* dir, size_t stride,
                            unsigned threads) {
  if (!config) return null_arg("config");
  if (!dir) return null_arg("dir");
  return guarded([&] { asclt::simulate_to_dir(config->value, dir, stride, threads); });
}

asclt_status asclt_estimate(const asclt_config* config, const char* dir, unsigned threads) {
  if (!config) return null_arg("config");
  if (!dir) return null_arg("dir");
  return guarded([&] { asclt::estimate_to_dir(config->value, dir, threads); });
}

asclt_status asclt_render_report(const char* aggregate_json, char** out) {
  if (!aggregate_json) return null_arg("aggregate_json");
  if (!out) return null_arg("out");
  return guarded([&] { *out = dup_string(asclt::render_report(aggregate_json)); });
}

asclt_status asclt_lyapunov_solve(size_t d, const double* u, double* r) {
  if (!u) return null_arg("u");
  if (!r) return null_arg("r");
  if (d == 0) {
    g_last_error = "dimension must be >= 1";
    return ASCLT_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const auto n = static_cast<Eigen::Index>(d);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                         Eigen::RowMajor>>
        um(u, n, n);
    const asclt::SymmetricMatrix sol = asclt::lyapunov_solve(asclt::SquareMatrix(Eigen::MatrixXd(um)));
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        r, n, n) = sol.matrix();
  });
}

asclt_status asclt_normal_quantile(double p, double mean, double var, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] { *out = asclt::normal_quantile(p, mean, var); });
}

uint64_t asclt_replicate_seed(uint64_t base_seed, uint64_t index) {
  return asclt::replicate_seed(base_seed, index);
}

}  // extern "C"
