// Copyright 2026 The minlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the minlab library. Every function returns a status code;
 * on failure the message is available from minlab_last_error() on the same
 * thread. Strings returned through `char**` are owned by the caller and
 * released with minlab_string_free(). */

#ifndef MINLAB_MINLAB_H_
#define MINLAB_MINLAB_H_

#include <stdint.h>

#if defined(_WIN32)
#define MINLAB_API __declspec(dllexport)
#else
#define MINLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum minlab_status {
  MINLAB_OK = 0,
  MINLAB_ERR_INVALID_ARGUMENT = 1,
  MINLAB_ERR_CONFIG = 2,
  MINLAB_ERR_MODE_UNSUPPORTED = 3,
  MINLAB_ERR_NO_FIXED_POINT = 4,
  MINLAB_ERR_IO = 5,
  MINLAB_ERR_UNKNOWN_SUITE = 6,
  MINLAB_ERR_INTERNAL = 7
} minlab_status;

typedef struct minlab_config minlab_config;
typedef struct minlab_result minlab_result;
typedef struct minlab_chain minlab_chain;

MINLAB_API const char* minlab_version(void);
MINLAB_API const char* minlab_last_error(void);
MINLAB_API void minlab_string_free(char* s);

/* Experiment configuration (JSON document). */
MINLAB_API minlab_status minlab_config_parse(const char* json,
                                             minlab_config** out);
/* Sets one field; `value_json` is a JSON value such as "5000" or
 * "\"sequential\"". The whole configuration is re-validated. */
MINLAB_API minlab_status minlab_config_set(minlab_config* cfg, const char* key,
                                           const char* value_json);
MINLAB_API minlab_status minlab_config_to_json(const minlab_config* cfg,
                                               char** out);
MINLAB_API void minlab_config_free(minlab_config* cfg);

/* Runs every trial of `cfg`. threads <= 0 selects MINLAB_THREADS or the
 * hardware concurrency. */
MINLAB_API minlab_status minlab_simulate(const minlab_config* cfg, int threads,
                                         minlab_result** out);
MINLAB_API minlab_status minlab_result_summary_json(const minlab_result* res,
                                                   int include_wall_clock,
                                                   char** out);
/* Empty header-only table unless the configuration records trajectories. */
MINLAB_API minlab_status minlab_result_trajectory_csv(const minlab_result* res,
                                                     char** out);
MINLAB_API minlab_status minlab_result_counts(const minlab_result* res,
                                              int64_t* trials,
                                              int64_t* converged,
                                              int64_t* censored);
MINLAB_API void minlab_result_free(minlab_result* res);

/* Birth-death chain of the sequential dynamics, or the escape chain from the
 * central band when `z_chain` is nonzero. `rule` is "minority", "majority"
 * or "voter"; `sampling` is "with-replacement" or "exclusive". */
MINLAB_API minlab_status minlab_chain_build(const char* rule, int64_t n,
                                            int64_t k, const char* sampling,
                                            int z_chain, minlab_chain** out);
/* Columns i,p,q,r,tau_edge,E_absorb. */
MINLAB_API minlab_status minlab_chain_csv(const minlab_chain* chain,
                                          char** out);
MINLAB_API minlab_status minlab_chain_summary_json(const minlab_chain* chain,
                                                   char** out);
MINLAB_API void minlab_chain_free(minlab_chain* chain);

/* Area thresholds, integer ranges and the two unstable fixed points. */
MINLAB_API minlab_status minlab_areas_json(int64_t n, int64_t k, char** out);

/* Suites: "appendix-bounds", "whp-thresholds", "orange-drift",
 * "yellow-instability", "bit-dissemination", "all". n, k <= 0 select each
 * suite's default parameters. */
MINLAB_API minlab_status minlab_verify(const char* suite, int64_t n, int64_t k,
                                       int threads, int* passed,
                                       char** report_json);

MINLAB_API minlab_status minlab_sweep(const char* spec_json, int threads,
                                      char** csv, char** report_json);

/* Numeric kernels. */
MINLAB_API minlab_status minlab_log_binomial_tail_geq(int64_t k, double p,
                                                      int64_t j, double* out);
MINLAB_API minlab_status minlab_expected_u(int64_t n, int64_t k, int64_t m,
                                           double* out);
MINLAB_API minlab_status minlab_expected_w(int64_t n, int64_t k, int64_t m,
                                           double* out);

#ifdef __cplusplus
}
#endif

#endif  /* MINLAB_MINLAB_H_ */
