/* Copyright 2026 The asclt-lab Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef ASCLT_C_API_H
#define ASCLT_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(ASCLT_BUILDING_LIBRARY)
#define ASCLT_API __attribute__((visibility("default")))
#else
#define ASCLT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum asclt_status {
  ASCLT_OK = 0,
  ASCLT_INVALID_ARGUMENT = 1,
  ASCLT_NOT_STABILIZABLE = 2,
  ASCLT_SINGULAR = 3,
  ASCLT_DIMENSION_MISMATCH = 4,
  ASCLT_INVALID_HORIZON = 5,
  ASCLT_INVALID_STEP = 6,
  ASCLT_OUT_OF_HORIZON = 7,
  ASCLT_WEIGHT_NOT_INTEGRABLE = 8,
  ASCLT_WEIGHT_MISMATCH = 9,
  ASCLT_MISSING_EVAL_TIME = 10,
  ASCLT_DOMAIN_TOO_SMALL = 11,
  ASCLT_TOO_FEW_ATOMS = 12,
  ASCLT_NON_SCALAR_MEASURE = 13,
  ASCLT_TOO_FEW_SAMPLES = 14,
  ASCLT_CONFIG_INVALID = 15,
  ASCLT_CONDITIONS_FAILED = 16,
  ASCLT_IO_ERROR = 17,
  ASCLT_INTERNAL = 99
} asclt_status;

typedef struct asclt_config asclt_config;
typedef struct asclt_report asclt_report;

ASCLT_API const char* asclt_version(void);
/* Message of the last failure on the calling thread; never NULL. */
ASCLT_API const char* asclt_last_error(void);
ASCLT_API const char* asclt_status_name(asclt_status status);
/* Frees strings returned through char** out-parameters. */
ASCLT_API void asclt_string_free(char* s);

/* Configs */
ASCLT_API asclt_status asclt_config_parse(const char* json, asclt_config** out);
ASCLT_API asclt_status asclt_config_load(const char* path, asclt_config** out);
ASCLT_API void asclt_config_free(asclt_config* config);
ASCLT_API asclt_status asclt_config_set_seed(asclt_config* config, uint64_t seed);
ASCLT_API asclt_status asclt_config_set_replicates(asclt_config* config, uint64_t n);
/* name: asclt | lfq_consistency | clt_lfq | lil | conditions */
ASCLT_API asclt_status asclt_config_set_experiment(asclt_config* config, const char* name);
ASCLT_API asclt_status asclt_config_to_json(const asclt_config* config, char** out);
ASCLT_API asclt_status asclt_config_hash(const asclt_config* config, uint64_t* out);
/* Default output directory from the config, or "" */
ASCLT_API const char* asclt_config_output(const asclt_config* config);

/* Experiments; threads = 0 uses all hardware threads */
ASCLT_API asclt_status asclt_run(const asclt_config* config, unsigned threads,
                                 asclt_report** out);
ASCLT_API void asclt_report_free(asclt_report* report);
ASCLT_API int asclt_report_passed(const asclt_report* report);
ASCLT_API int asclt_report_gated(const asclt_report* report);
ASCLT_API asclt_status asclt_report_aggregate_json(const asclt_report* report, char** out);
ASCLT_API asclt_status asclt_report_conditions_json(const asclt_report* report, char** out);
ASCLT_API asclt_status asclt_report_write(const asclt_report* report, const char* dir);

ASCLT_API asclt_status asclt_check_family(const asclt_config* config, char** json_out,
                                          int* passed);
ASCLT_API asclt_status asclt_simulate(const asclt_config* config, const char* dir,
                                      size_t stride, unsigned threads);
ASCLT_API asclt_status asclt_estimate(const asclt_config* config, const char* dir,
                                      unsigned threads);
ASCLT_API asclt_status asclt_render_report(const char* aggregate_json, char** out);

/* Numerics */
/* Solves I = R U + U^T R for row-major d x d U; R is written row-major. */
ASCLT_API asclt_status asclt_lyapunov_solve(size_t d, const double* u, double* r);
ASCLT_API asclt_status asclt_normal_quantile(double p, double mean, double var,
                                             double* out);
ASCLT_API uint64_t asclt_replicate_seed(uint64_t base_seed, uint64_t index);

#ifdef __cplusplus
}
#endif

#endif /* ASCLT_C_API_H */
