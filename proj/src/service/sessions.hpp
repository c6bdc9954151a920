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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "backends/registry.hpp"
#include "core/types.hpp"

namespace clarify::service {

inline constexpr std::size_t kDefaultTurnLimit = 3;

struct Turn {
  Question question;
  std::string user_answer;
  UpdatedSituation fused;
  JudgmentDistribution judgment;
};

/// One interactive judgment conversation. `current_situation` is the base
/// text until the first turn, then the latest fused text.
struct SessionState {
  std::string session_id;
  Situation base;
  JudgmentDistribution initial_judgment;
  std::vector<Turn> turns;
  std::string current_situation;
  std::optional<Question> next_question;
  std::size_t turn_limit = kDefaultTurnLimit;
  bool terminal = false;

  const JudgmentDistribution& latest_judgment() const;
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const JudgmentDistribution& j);

struct SessionOptions {
  std::size_t turn_limit = kDefaultTurnLimit;
  // Completed sessions are appended here as JSONL when set.
  std::optional<std::filesystem::path> persist_path;
  // Seeds session ids; unset draws from std::random_device.
  std::optional<std::uint64_t> seed;
};

/// In-memory session store. Distinct sessions proceed concurrently; calls on
/// one session are serialized.
class SessionManager {
 public:
  explicit SessionManager(backends::BackendSet backends, SessionOptions options = {});

  // Judges the situation and asks the first question.
  SessionState create_session(std::string_view situation_text);
  // Fuses the answer into the current situation, judges it and either asks
  // the next question or closes the session at the turn limit.
  SessionState answer_turn(const std::string& session_id, std::string_view user_answer);
  SessionState get_session(const std::string& session_id) const;

  std::size_t size() const;
  const backends::BackendSet& backends() const { return backends_; }

 private:
  struct Entry {
    explicit Entry(SessionState s) : state(std::move(s)) {}
    std::mutex mu;
    SessionState state;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  Question ask(const std::string& situation_text, std::size_t turn) const;
  std::string new_id();
  void persist(const SessionState& state);

  backends::BackendSet backends_;
  SessionOptions options_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mu_;
  std::mt19937_64 id_rng_;
  std::uint64_t counter_ = 0;
  std::mutex persist_mu_;
};

/// Recomputes every recorded turn through fusion and judgment with `backends`
/// and reports whether the judgments come out identical.
bool replay_matches(const SessionState& state, const backends::BackendSet& backends);

}  // namespace clarify::service
