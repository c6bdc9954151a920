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

#include "clarify/clarify.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "core/divergence.hpp"
#include "core/error.hpp"
#include "eval/metrics.hpp"
#include "service/engine.hpp"
#include "service/http.hpp"

struct clarify_engine {
  std::unique_ptr<clarify::service::Engine> engine;
};

struct clarify_server {
  std::unique_ptr<clarify::service::HttpService> http;
  std::thread thread;
};

namespace {

using clarify::ErrorCode;
using nlohmann::json;

thread_local std::string g_last_error;

clarify_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return CLARIFY_ERR_INVALID_ARGUMENT;
    case ErrorCode::kBackendUnavailable: return CLARIFY_ERR_BACKEND_UNAVAILABLE;
    case ErrorCode::kNotFound: return CLARIFY_ERR_NOT_FOUND;
    case ErrorCode::kTurnLimitExceeded: return CLARIFY_ERR_TURN_LIMIT;
    case ErrorCode::kIo: return CLARIFY_ERR_IO;
    case ErrorCode::kSchema: return CLARIFY_ERR_SCHEMA;
    case ErrorCode::kNonFinite: return CLARIFY_ERR_NON_FINITE;
  }
  return CLARIFY_ERR_INTERNAL;
}

template <typename F>
clarify_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return CLARIFY_OK;
  } catch (const clarify::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return CLARIFY_ERR_SCHEMA;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CLARIFY_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CLARIFY_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) clarify::fail(ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

clarify::service::Engine& engine_of(clarify_engine* e) {
  require(e, "engine");
  return *e->engine;
}

void emit(const json& j, char** out) {
  require(out, "output pointer");
  *out = dup_string(j.dump());
}

clarify::JudgmentDistribution dist(const double p[3]) {
  return clarify::JudgmentDistribution(p[0], p[1], p[2]);
}

}  // namespace

extern "C" {

const char* clarify_version(void) { return "0.1.0"; }

const char* clarify_status_name(clarify_status status) {
  switch (status) {
    case CLARIFY_OK: return "ok";
    case CLARIFY_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CLARIFY_ERR_BACKEND_UNAVAILABLE: return "backend-unavailable";
    case CLARIFY_ERR_NOT_FOUND: return "not-found";
    case CLARIFY_ERR_TURN_LIMIT: return "turn-limit-exceeded";
    case CLARIFY_ERR_IO: return "io";
    case CLARIFY_ERR_SCHEMA: return "schema";
    case CLARIFY_ERR_NON_FINITE: return "non-finite";
    case CLARIFY_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* clarify_last_error(void) { return g_last_error.c_str(); }

void clarify_string_free(char* s) { std::free(s); }

clarify_status clarify_engine_open(const char* config_path, const char* backend, uint64_t seed,
                                   clarify_engine** out) {
  return guard([&] {
    require(config_path, "config path");
    require(out, "output pointer");
    auto e = std::make_unique<clarify_engine>();
    e->engine = clarify::service::Engine::open(config_path, backend ? backend : "", seed);
    *out = e.release();
  });
}

clarify_status clarify_engine_create(const char* config_json, const char* base_dir,
                                     const char* backend, uint64_t seed, clarify_engine** out) {
  return guard([&] {
    require(config_json, "config");
    require(out, "output pointer");
    auto e = std::make_unique<clarify_engine>();
    e->engine = std::make_unique<clarify::service::Engine>(
        json::parse(config_json), base_dir ? base_dir : ".", backend ? backend : "", seed);
    *out = e.release();
  });
}

void clarify_engine_free(clarify_engine* engine) { delete engine; }

clarify_status clarify_estimate_stats(clarify_engine* engine, const char* situations_path,
                                      char** out_json) {
  return guard([&] {
    require(situations_path, "situations path");
    emit(engine_of(engine).estimate_stats(situations_path), out_json);
  });
}

clarify_status clarify_train(clarify_engine* engine, const char* situations_path,
                             const char* stats_path, const char* out_dir, char** out_json) {
  return guard([&] {
    require(situations_path, "situations path");
    require(out_dir, "output directory");
    std::optional<std::filesystem::path> stats;
    if (stats_path) stats = stats_path;
    emit(engine_of(engine).train(situations_path, stats, out_dir), out_json);
  });
}

clarify_status clarify_rank(clarify_engine* engine, const char* method,
                            const char* situations_path, char** out_json) {
  return guard([&] {
    require(method, "method");
    require(situations_path, "situations path");
    emit(engine_of(engine).rank(method, situations_path), out_json);
  });
}

clarify_status clarify_evaluate(clarify_engine* engine, const char* eval_path, char** out_json) {
  return guard([&] {
    require(eval_path, "eval path");
    emit(engine_of(engine).evaluate(eval_path), out_json);
  });
}

clarify_status clarify_corpus_stats(const char* path, const char* kind, char** out_json) {
  return guard([&] {
    require(path, "path");
    require(kind, "kind");
    emit(clarify::service::corpus_stats(path, kind), out_json);
  });
}

clarify_status clarify_session_create(clarify_engine* engine, const char* situation,
                                      char** out_json) {
  return guard([&] {
    require(situation, "situation");
    emit(engine_of(engine).sessions().create_session(situation).to_json(), out_json);
  });
}

clarify_status clarify_session_answer(clarify_engine* engine, const char* session_id,
                                      const char* answer, char** out_json) {
  return guard([&] {
    require(session_id, "session id");
    require(answer, "answer");
    emit(engine_of(engine).sessions().answer_turn(session_id, answer).to_json(), out_json);
  });
}

clarify_status clarify_session_get(clarify_engine* engine, const char* session_id,
                                   char** out_json) {
  return guard([&] {
    require(session_id, "session id");
    emit(engine_of(engine).sessions().get_session(session_id).to_json(), out_json);
  });
}

clarify_status clarify_server_start(clarify_engine* engine, const char* host, int port,
                                    clarify_server** out, int* bound_port) {
  return guard([&] {
    require(out, "output pointer");
    const std::string h = host ? host : "127.0.0.1";
    auto server = std::make_unique<clarify_server>();
    server->http = std::make_unique<clarify::service::HttpService>(engine_of(engine).sessions());
    int bound = port;
    if (port == 0) {
      bound = server->http->bind_to_any_port(h);
      if (bound <= 0) clarify::fail(ErrorCode::kIo, "cannot bind " + h);
    } else if (!server->http->bind_to_port(h, port)) {
      clarify::fail(ErrorCode::kIo, "cannot bind " + h + ":" + std::to_string(port));
    }
    auto* http = server->http.get();
    server->thread = std::thread([http] { http->listen_after_bind(); });
    http->wait_until_ready();
    if (bound_port) *bound_port = bound;
    *out = server.release();
  });
}

clarify_status clarify_server_wait(clarify_server* server) {
  return guard([&] {
    require(server, "server");
    if (server->thread.joinable()) server->thread.join();
  });
}

void clarify_server_stop(clarify_server* server) {
  if (server && server->http) server->http->stop();
}

void clarify_server_free(clarify_server* server) {
  if (!server) return;
  clarify_server_stop(server);
  if (server->thread.joinable()) server->thread.join();
  delete server;
}

clarify_status clarify_jsd(const double p[3], const double q[3], double* out) {
  return guard([&] {
    require(p, "p");
    require(q, "q");
    require(out, "output pointer");
    *out = clarify::jsd(dist(p), dist(q));
  });
}

clarify_status clarify_argmax_judgment(const double p[3], int* out) {
  return guard([&] {
    require(p, "p");
    require(out, "output pointer");
    *out = static_cast<int>(clarify::argmax_judgment(dist(p)));
  });
}

clarify_status clarify_bleu4(const char* candidate, const char* const* references,
                             size_t n_references, int smoothing, double* out) {
  return guard([&] {
    require(candidate, "candidate");
    require(out, "output pointer");
    if (n_references > 0) require(references, "references");
    std::vector<std::string> refs;
    for (size_t i = 0; i < n_references; ++i) {
      require(references[i], "reference");
      refs.emplace_back(references[i]);
    }
    *out = clarify::eval::bleu4(candidate, refs, {smoothing != 0});
  });
}

clarify_status clarify_rouge_l(const char* candidate, const char* reference, double* out) {
  return guard([&] {
    require(candidate, "candidate");
    require(reference, "reference");
    require(out, "output pointer");
    *out = clarify::eval::rouge_l(candidate, reference);
  });
}

}  // extern "C"
