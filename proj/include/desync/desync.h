/*
 * Copyright 2026 The desync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef DESYNC_DESYNC_H
#define DESYNC_DESYNC_H

/* C interface to the impulse-coupled oscillator library. All objects are
 * opaque handles owned by the caller and released with the matching
 * *_destroy function. Every fallible call returns a desync_status; on failure
 * desync_last_error() describes the problem (per thread, valid until the
 * next failing call on that thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DESYNC_API __declspec(dllexport)
#else
#define DESYNC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum desync_status {
  DESYNC_OK = 0,
  DESYNC_ERR_INVALID_ARGUMENT = 1,
  DESYNC_ERR_DOMAIN = 2,
  DESYNC_ERR_PRECONDITION = 3,
  DESYNC_ERR_CAPACITY = 4,
  DESYNC_ERR_NUMERICAL = 5,
  DESYNC_ERR_IO = 6,
  DESYNC_ERR_CONFIG = 7,
  DESYNC_ERR_ZENO = 8,
  DESYNC_ERR_INVARIANT_VIOLATION = 9,
  DESYNC_ERR_INTERNAL = 100
} desync_status;

typedef enum desync_policy {
  DESYNC_POLICY_ALL_RESET = 0,
  DESYNC_POLICY_LOWEST_INDEX_RESETS = 1,
  DESYNC_POLICY_RANDOM = 2
} desync_policy;

typedef struct desync_params desync_params;
typedef struct desync_set desync_set;
typedef struct desync_perturbation desync_perturbation;
typedef struct desync_arc desync_arc;

/* Receives a chunk of text output (not NUL-terminated). */
typedef void (*desync_text_sink)(const char* data, size_t size, void* user);

DESYNC_API const char* desync_last_error(void);
DESYNC_API const char* desync_version(void);

/* Parameters. tolerance <= 0 selects the default 1e-9 band. */
DESYNC_API desync_status desync_params_create(size_t n, double threshold, double rate, double coupling,
                                              double tolerance, desync_params** out);
DESYNC_API void desync_params_destroy(desync_params* params);

/* Desynchronization set. */
DESYNC_API desync_status desync_sorted_anchor(const desync_params* params, double* out, size_t n);
DESYNC_API desync_status desync_set_create(const desync_params* params, desync_set** out);
DESYNC_API void desync_set_destroy(desync_set* set);
DESYNC_API size_t desync_set_size(const desync_set* set);
DESYNC_API desync_status desync_set_anchor(const desync_set* set, size_t index, double* out, size_t n);

/* Lyapunov distance: without enumeration, or over an enumerated set. */
DESYNC_API desync_status desync_lyapunov(const desync_params* params, const double* state, size_t n,
                                         double* out);
DESYNC_API desync_status desync_lyapunov_set(const desync_set* set, const double* state, size_t n,
                                             double* out);

DESYNC_API desync_status desync_jump(const desync_params* params, const double* state, size_t n,
                                     desync_policy policy, double* out);
DESYNC_API desync_status desync_in_exclusion(const desync_params* params, const double* state, size_t n,
                                             int* out);

/* Perturbations: kind is none, threshold, reset-offset, bump or flow-rate. */
DESYNC_API desync_status desync_perturbation_create(const desync_params* params, const char* kind,
                                                    const double* magnitudes, size_t count,
                                                    desync_perturbation** out);
DESYNC_API void desync_perturbation_destroy(desync_perturbation* perturbation);

/* Simulation. perturbation may be NULL (nominal). max_flow_time <= 0 or
 * max_jumps == 0 disables that limit (one must remain). sample_interval < 0
 * selects the default step. */
DESYNC_API desync_status desync_simulate(const desync_params* params, const desync_perturbation* perturbation,
                                         const double* initial, size_t n, double max_flow_time,
                                         uint64_t max_jumps, desync_policy policy, uint64_t seed,
                                         double sample_interval, desync_arc** out);
DESYNC_API void desync_arc_destroy(desync_arc* arc);
DESYNC_API size_t desync_arc_sample_count(const desync_arc* arc);
DESYNC_API desync_status desync_arc_sample(const desync_arc* arc, size_t index, double* t, uint64_t* j,
                                           double* state, size_t n);
DESYNC_API size_t desync_arc_jump_count(const desync_arc* arc);
DESYNC_API int desync_arc_aborted(const desync_arc* arc);
/* arc.csv / jumps.csv text through the sink. */
DESYNC_API desync_status desync_arc_write_csv(const desync_arc* arc, const desync_params* params,
                                              desync_text_sink sink, void* user);
DESYNC_API desync_status desync_arc_write_jumps_csv(const desync_arc* arc, desync_text_sink sink, void* user);

/* Bounds. */
DESYNC_API desync_status desync_convergence_bound(const desync_params* params, double c2, double c1,
                                                  int ceiling, double* bound_m, double* jumps_j);
DESYNC_API desync_status desync_flow_cbar(const desync_params* params, const double* delta_rates, size_t n,
                                          double* out);
DESYNC_API desync_status desync_asymptotic_bound(const desync_params* params, double c_bar, double* out);
DESYNC_API desync_status desync_integrable_bound(const desync_params* params, double b_integral, double* out);
DESYNC_API desync_status desync_geometric_sum(double x, long m, long n, double* out);
DESYNC_API desync_status desync_double_geometric_sum(double x, long m, long big_n, double* out);

/* Experiment drivers. command is simulate, batch, desync-set, bound, verify
 * or fig4; config_json is the run configuration document. out_dir (nullable)
 * overrides outputs.directory; seed overrides initial.seed when has_seed is
 * nonzero. Text output (and the list of written files) goes to sink.
 * verify returns DESYNC_ERR_INVARIANT_VIOLATION when a check fails. */
DESYNC_API desync_status desync_run(const char* command, const char* config_json, const char* out_dir,
                                    int has_seed, uint64_t seed, desync_text_sink sink, void* user);

/* Validates and re-serializes a configuration document. */
DESYNC_API desync_status desync_config_normalize(const char* config_json, desync_text_sink sink, void* user);

#ifdef __cplusplus
}
#endif

#endif /* DESYNC_DESYNC_H */
