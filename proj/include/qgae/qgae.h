// Copyright 2026 The qgae Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QGAE_QGAE_H_
#define QGAE_QGAE_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QGAE_API __declspec(dllexport)
#else
#define QGAE_API __attribute__((visibility("default")))
#endif

/* Status codes; values match qgae::ErrorCode. */
typedef enum qgae_status {
  QGAE_OK = 0,
  QGAE_INVALID_ARGUMENT = 1,
  QGAE_PARSE = 2,
  QGAE_OUT_OF_RANGE = 3,
  QGAE_STALE_ACTION = 4,
  QGAE_DIMENSION = 5,
  QGAE_IO = 6,
  QGAE_CONFIG = 7,
  QGAE_CYCLE = 8,
  QGAE_EMPTY = 9,
  QGAE_INTERNAL = 10
} qgae_status;

/* Message of the last failed call on this thread; "" after a success. */
QGAE_API const char* qgae_last_error(void);
QGAE_API const char* qgae_status_name(qgae_status s);
QGAE_API const char* qgae_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
QGAE_API void qgae_string_free(char* s);

/* ---- configuration ---- */

typedef struct qgae_config qgae_config;

/* Defaults, then the file at `path` (may be NULL), then the n key/value
 * overrides. The result is resolved and validated. */
QGAE_API qgae_status qgae_config_load(const char* path, const char* const* keys,
                                      const char* const* values, size_t n, qgae_config** out);
QGAE_API void qgae_config_free(qgae_config* cfg);
QGAE_API qgae_status qgae_config_render(const qgae_config* cfg, char** out);
QGAE_API qgae_status qgae_config_get(const qgae_config* cfg, const char* key, char** out);

/* ---- circuits ---- */

QGAE_API qgae_status qgae_bv_qasm(int n_data, uint64_t secret, char** out);
QGAE_API qgae_status qgae_qasm_depth(const char* qasm, int* depth);

/* ---- property suites ---- */

typedef struct qgae_verify_result {
  int circuits;
  long actions;
  long unitary_failures;
  long dag_failures;
  double max_deviation;
} qgae_verify_result;

/* `messages` (may be NULL) receives up to ten failure descriptions, one per line. */
QGAE_API qgae_status qgae_verify(int circuits, uint64_t seed, qgae_verify_result* out,
                                 char** messages);
QGAE_API qgae_status qgae_grad_check(int dags, uint64_t seed, double* max_rel_error);

/* ---- training runs ---- */

typedef void (*qgae_progress_fn)(const char* line, void* user);

typedef struct qgae_run_result {
  size_t states;   /* l_s for a baseline run, l_a for an encoded run */
  int epochs;
  int best_depth;
  int episodes_at_target;
} qgae_run_result;

/* Writes qtable.tsv, corpus.txt, trace.csv, best.qasm and config.txt. */
QGAE_API qgae_status qgae_train_baseline(const qgae_config* cfg, const char* out_dir,
                                         qgae_run_result* out);

typedef struct qgae_vae_result {
  size_t corpus_size;
  size_t trained_on;
  double final_loss;
  double reconstruction_accuracy;
} qgae_vae_result;

/* Reads a corpus.txt and writes model.ckpt, model.json and config.txt. */
QGAE_API qgae_status qgae_train_vae(const qgae_config* cfg, const char* corpus_path,
                                    const char* out_dir, qgae_vae_result* out);

/* Uses the model in `model_dir`; writes qtable.tsv, trace.csv, best.qasm and config.txt. */
QGAE_API qgae_status qgae_train_encoded(const qgae_config* cfg, const char* model_dir,
                                        const char* out_dir, qgae_run_result* out);

typedef struct qgae_compare_result {
  int seeds;
  double median_l_s;
  double median_l_a;
  double median_improvement;
  int optimal_qasm;
  int optimal_encoder;
} qgae_compare_result;

/* Full protocol; writes states.csv, depth_trace.csv, report.txt, config.txt
 * and the per-seed encoders under models/. `progress` may be NULL. */
QGAE_API qgae_status qgae_compare(const qgae_config* cfg, const char* out_dir,
                                  qgae_progress_fn progress, void* user,
                                  qgae_compare_result* out);

#ifdef __cplusplus
}
#endif

#endif  // QGAE_QGAE_H_
