// Copyright 2026 The Clarify Authors.
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

#ifndef CLARIFY_CLARIFY_H_
#define CLARIFY_CLARIFY_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CLARIFY_API __declspec(dllexport)
#else
#define CLARIFY_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum clarify_status {
  CLARIFY_OK = 0,
  CLARIFY_ERR_INVALID_ARGUMENT = 1,
  CLARIFY_ERR_BACKEND_UNAVAILABLE = 2,
  CLARIFY_ERR_NOT_FOUND = 3,
  CLARIFY_ERR_TURN_LIMIT = 4,
  CLARIFY_ERR_IO = 5,
  CLARIFY_ERR_SCHEMA = 6,
  CLARIFY_ERR_NON_FINITE = 7,
  CLARIFY_ERR_INTERNAL = 8
} clarify_status;

typedef struct clarify_engine clarify_engine;
typedef struct clarify_server clarify_server;

CLARIFY_API const char* clarify_version(void);
CLARIFY_API const char* clarify_status_name(clarify_status status);

/* Message of the last failed call on this thread; "" after a success. */
CLARIFY_API const char* clarify_last_error(void);

/* Every char* returned through an out parameter is released with this. */
CLARIFY_API void clarify_string_free(char* s);

/* backend may be NULL to use the config's default profile. */
CLARIFY_API clarify_status clarify_engine_open(const char* config_path, const char* backend,
                                               uint64_t seed, clarify_engine** out);
CLARIFY_API clarify_status clarify_engine_create(const char* config_json, const char* base_dir,
                                                 const char* backend, uint64_t seed,
                                                 clarify_engine** out);
CLARIFY_API void clarify_engine_free(clarify_engine* engine);

/* Command entry points. Results are JSON strings. */
CLARIFY_API clarify_status clarify_estimate_stats(clarify_engine* engine,
                                                  const char* situations_path, char** out_json);
/* stats_path may be NULL. */
CLARIFY_API clarify_status clarify_train(clarify_engine* engine, const char* situations_path,
                                         const char* stats_path, const char* out_dir,
                                         char** out_json);
CLARIFY_API clarify_status clarify_rank(clarify_engine* engine, const char* method,
                                        const char* situations_path, char** out_json);
CLARIFY_API clarify_status clarify_evaluate(clarify_engine* engine, const char* eval_path,
                                            char** out_json);
/* kind is "gold" or "silver". */
CLARIFY_API clarify_status clarify_corpus_stats(const char* path, const char* kind,
                                                char** out_json);

CLARIFY_API clarify_status clarify_session_create(clarify_engine* engine, const char* situation,
                                                  char** out_json);
CLARIFY_API clarify_status clarify_session_answer(clarify_engine* engine, const char* session_id,
                                                  const char* answer, char** out_json);
CLARIFY_API clarify_status clarify_session_get(clarify_engine* engine, const char* session_id,
                                               char** out_json);

/* Serves the session API on a background thread. port 0 binds an ephemeral
   port; the bound port is written to *bound_port. The engine must outlive
   the server. */
CLARIFY_API clarify_status clarify_server_start(clarify_engine* engine, const char* host,
                                                int port, clarify_server** out,
                                                int* bound_port);
/* Blocks until the server stops. */
CLARIFY_API clarify_status clarify_server_wait(clarify_server* server);
CLARIFY_API void clarify_server_stop(clarify_server* server);
CLARIFY_API void clarify_server_free(clarify_server* server);

/* Distributions are (bad, ok, good). */
CLARIFY_API clarify_status clarify_jsd(const double p[3], const double q[3], double* out);
/* 0 = bad, 1 = ok, 2 = good. */
CLARIFY_API clarify_status clarify_argmax_judgment(const double p[3], int* out);
CLARIFY_API clarify_status clarify_bleu4(const char* candidate, const char* const* references,
                                         size_t n_references, int smoothing, double* out);
CLARIFY_API clarify_status clarify_rouge_l(const char* candidate, const char* reference,
                                           double* out);

#ifdef __cplusplus
}
#endif

#endif  // CLARIFY_CLARIFY_H_
