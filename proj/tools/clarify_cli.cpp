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

#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "clarify/clarify.h"

namespace {

using nlohmann::json;

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string backend;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("-c,--config", c.config, "config file (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "run seed");
  cmd->add_option("--backend", c.backend, "backend profile from the config");
  cmd->add_option("--out", c.out, "output path (stdout when omitted; run directory for train)");
}

int report(clarify_status st) {
  std::cerr << "error (" << clarify_status_name(st) << "): " << clarify_last_error() << '\n';
  return static_cast<int>(st) + 1;
}

// Writes `text` to --out, or stdout.
int deliver(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text << '\n';
    return 0;
  }
  std::ofstream f(c.out);
  if (!f) {
    std::cerr << "error: cannot write " << c.out << '\n';
    return 1;
  }
  f << text << '\n';
  return 0;
}

class EngineHandle {
 public:
  ~EngineHandle() { clarify_engine_free(e_); }
  clarify_status open(const Common& c) {
    return clarify_engine_open(c.config.c_str(), c.backend.empty() ? nullptr : c.backend.c_str(),
                               c.seed, &e_);
  }
  clarify_engine* get() const { return e_; }

 private:
  clarify_engine* e_ = nullptr;
};

// Runs one JSON-returning call and prints or stores the result.
template <typename F>
int run_json(const Common& c, F&& call, bool jsonl = false) {
  char* raw = nullptr;
  const auto st = call(&raw);
  if (st != CLARIFY_OK) return report(st);
  const auto result = json::parse(raw);
  clarify_string_free(raw);
  if (jsonl && result.is_array()) {
    std::string lines;
    for (const auto& r : result) lines += r.dump() + '\n';
    if (!lines.empty()) lines.pop_back();
    return deliver(c, lines);
  }
  return deliver(c, result.dump(2));
}

clarify_server* g_server = nullptr;

void on_signal(int) {
  if (g_server) clarify_server_stop(g_server);
}

std::string judgment_line(const json& j) {
  return "bad " + std::to_string(j["bad"].get<double>()) + "  ok " +
         std::to_string(j["ok"].get<double>()) + "  good " +
         std::to_string(j["good"].get<double>());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clarify: defeasible clarification questions for moral judgment"};
  app.require_subcommand(1);

  Common c;
  std::string situations, stats_path, method = "finetuned", eval_path, corpus, kind = "gold";
  std::string host = "127.0.0.1";
  int port = 8080;

  auto* train = app.add_subcommand("train", "PPO training of the question policy");
  add_common(train, c);
  train->add_option("--situations", situations, "situations JSONL")->required();
  train->add_option("--stats", stats_path, "reward stats JSON from estimate-stats");

  auto* est = app.add_subcommand("estimate-stats", "reward normalization statistics");
  add_common(est, c);
  est->add_option("--situations", situations, "situations JSONL")->required();

  auto* rank = app.add_subcommand("rank", "one question per situation");
  add_common(rank, c);
  rank->add_option("--situations", situations, "situations JSONL")->required();
  rank->add_option("--method", method)
      ->check(CLI::IsMember({"finetuned", "discriminator", "pipeline", "pipeline-nli", "why"}));

  auto* ev = app.add_subcommand("eval", "automatic metrics over an evaluation corpus");
  add_common(ev, c);
  ev->add_option("--items", eval_path, "evaluation JSONL")->required();

  auto* st = app.add_subcommand("stats", "question-start statistics of a corpus");
  add_common(st, c, false);
  st->add_option("--corpus", corpus, "gold or silver JSONL")->required();
  st->add_option("--kind", kind)->check(CLI::IsMember({"gold", "silver"}));

  auto* serve = app.add_subcommand("serve", "HTTP session API");
  add_common(serve, c);
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  auto* interact = app.add_subcommand("interact", "terminal judgment session");
  add_common(interact, c);

  CLI11_PARSE(app, argc, argv);

  if (*st)
    return run_json(c, [&](char** out) {
      return clarify_corpus_stats(corpus.c_str(), kind.c_str(), out);
    });

  EngineHandle engine;
  if (const auto s = engine.open(c); s != CLARIFY_OK) return report(s);

  if (*train) {
    // --out names the run directory here; the summary goes to stdout.
    Common summary = c;
    summary.out.clear();
    const std::string dir = c.out.empty() ? "runs/train" : c.out;
    return run_json(summary, [&](char** out) {
      return clarify_train(engine.get(), situations.c_str(),
                           stats_path.empty() ? nullptr : stats_path.c_str(), dir.c_str(), out);
    });
  }
  if (*est)
    return run_json(c, [&](char** out) {
      return clarify_estimate_stats(engine.get(), situations.c_str(), out);
    });
  if (*rank)
    return run_json(
        c,
        [&](char** out) {
          return clarify_rank(engine.get(), method.c_str(), situations.c_str(), out);
        },
        true);
  if (*ev)
    return run_json(c, [&](char** out) {
      return clarify_evaluate(engine.get(), eval_path.c_str(), out);
    });

  if (*serve) {
    int bound = 0;
    if (const auto s = clarify_server_start(engine.get(), host.c_str(), port, &g_server, &bound);
        s != CLARIFY_OK)
      return report(s);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cerr << "listening on http://" << host << ':' << bound << '\n';
    clarify_server_wait(g_server);
    clarify_server_free(g_server);
    return 0;
  }

  // interact
  std::ofstream transcript;
  if (!c.out.empty()) transcript.open(c.out);
  std::cout << "situation> " << std::flush;
  std::string line;
  if (!std::getline(std::cin, line)) return 0;
  char* raw = nullptr;
  if (const auto s = clarify_session_create(engine.get(), line.c_str(), &raw); s != CLARIFY_OK)
    return report(s);
  auto state = json::parse(raw);
  clarify_string_free(raw);
  const std::string id = state["session_id"];
  std::cout << judgment_line(state["initial_judgment"]) << '\n';
  while (!state["terminal"].get<bool>()) {
    std::cout << state["question"].get<std::string>() << "\nanswer> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (const auto s = clarify_session_answer(engine.get(), id.c_str(), line.c_str(), &raw);
        s != CLARIFY_OK) {
      report(s);
      continue;
    }
    state = json::parse(raw);
    clarify_string_free(raw);
    std::cout << judgment_line(state["turns"].back()["judgment"]) << '\n';
  }
  if (transcript) transcript << state.dump(2) << '\n';
  return 0;
}
