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

#include "service/sessions.hpp"

#include <cstdio>
#include <fstream>

#include "core/divergence.hpp"
#include "core/error.hpp"
#include "defeasibility/reward.hpp"

namespace clarify::service {

namespace {

// The user's answer supports the current judgment if it pushes the
// (p_good - p_bad) lean further in the direction of the current argmax.
UpdateType classify_update(const JudgmentDistribution& before, const JudgmentDistribution& after) {
  const double delta = (after.p_good() - after.p_bad()) - (before.p_good() - before.p_bad());
  const bool toward_good = delta >= 0.0;
  const bool before_bad = argmax_judgment(before) == JudgmentClass::kBad;
  return toward_good != before_bad ? UpdateType::kStrengthener : UpdateType::kWeakener;
}

}  // namespace

const JudgmentDistribution& SessionState::latest_judgment() const {
  return turns.empty() ? initial_judgment : turns.back().judgment;
}

nlohmann::json to_json(const JudgmentDistribution& j) {
  return {{"bad", j.p_bad()}, {"ok", j.p_ok()}, {"good", j.p_good()}};
}

nlohmann::json SessionState::to_json() const {
  nlohmann::json ts = nlohmann::json::array();
  for (const auto& t : turns) {
    ts.push_back({{"question", t.question.text},
                  {"user_answer", t.user_answer},
                  {"update_type", clarify::to_string(t.fused.answer.update_type)},
                  {"fused", t.fused.text},
                  {"judgment", service::to_json(t.judgment)}});
  }
  nlohmann::json out = {{"session_id", session_id},
                        {"situation", base.text()},
                        {"initial_judgment", service::to_json(initial_judgment)},
                        {"turns", ts},
                        {"current_situation", current_situation},
                        {"turn_limit", turn_limit},
                        {"terminal", terminal}};
  out["question"] = next_question ? nlohmann::json(next_question->text) : nlohmann::json(nullptr);
  return out;
}

SessionManager::SessionManager(backends::BackendSet backends, SessionOptions options)
    : backends_(std::move(backends)),
      options_(std::move(options)),
      id_rng_(options_.seed ? *options_.seed : std::random_device{}()) {
  if (options_.turn_limit == 0) fail(ErrorCode::kInvalidArgument, "turn limit must be positive");
  if (!backends_.policy || !backends_.oracle)
    fail(ErrorCode::kBackendUnavailable, "session service needs a policy and an oracle");
}

std::string SessionManager::new_id() {
  std::lock_guard lock(id_mu_);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx-%llu", static_cast<unsigned long long>(id_rng_()),
                static_cast<unsigned long long>(++counter_));
  return buf;
}

Question SessionManager::ask(const std::string& situation_text, std::size_t turn) const {
  auto req = backends_.decoding;
  req.seed = req.seed.value_or(0) + turn;
  return backends::generate_question(*backends_.policy, Situation(situation_text), req);
}

SessionState SessionManager::create_session(std::string_view situation_text) {
  Situation base{std::string(situation_text)};
  auto initial = backends::judge(*backends_.oracle, base.text());
  auto question = ask(base.text(), 0);
  auto entry = std::make_shared<Entry>(SessionState{
      new_id(), base, initial, {}, base.text(), std::move(question), options_.turn_limit, false});
  std::unique_lock lock(mu_);
  sessions_.emplace(entry->state.session_id, entry);
  return entry->state;
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& session_id) const {
  std::shared_lock lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) fail(ErrorCode::kNotFound, "unknown session: " + session_id);
  return it->second;
}

SessionState SessionManager::answer_turn(const std::string& session_id,
                                         std::string_view user_answer) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mu);
  auto& st = entry->state;
  if (st.terminal || st.turns.size() >= st.turn_limit)
    fail(ErrorCode::kTurnLimitExceeded,
         "session " + session_id + " reached its limit of " + std::to_string(st.turn_limit) + " turns");
  if (trim(user_answer).empty()) fail(ErrorCode::kInvalidArgument, "answer is empty");

  const Situation current(st.current_situation);
  const Question asked = st.next_question.value_or(Question{});
  Answer answer(trim(user_answer), UpdateType::kStrengthener);
  auto fused = defeasibility::fuse(current, asked, answer, backends_.fusion.get(),
                                   backends_.decoding);
  auto judgment = backends::judge(*backends_.oracle, fused.text);
  fused.answer.update_type = classify_update(st.latest_judgment(), judgment);

  // Everything that can fail runs before the state is touched.
  std::optional<Question> next;
  if (st.turns.size() + 1 < st.turn_limit) next = ask(fused.text, st.turns.size() + 1);

  st.current_situation = fused.text;
  st.turns.push_back({asked, std::string(user_answer), std::move(fused), judgment});
  st.next_question = std::move(next);
  st.terminal = st.turns.size() == st.turn_limit;
  if (st.terminal) persist(st);
  return st;
}

SessionState SessionManager::get_session(const std::string& session_id) const {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mu);
  return entry->state;
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

void SessionManager::persist(const SessionState& state) {
  if (!options_.persist_path) return;
  std::lock_guard lock(persist_mu_);
  std::ofstream out(*options_.persist_path, std::ios::app);
  if (!out) fail(ErrorCode::kIo, "cannot append to " + options_.persist_path->string());
  out << state.to_json().dump() << '\n';
}

bool replay_matches(const SessionState& state, const backends::BackendSet& backends) {
  std::string current = state.base.text();
  for (const auto& turn : state.turns) {
    const Situation s(current);
    const Answer a(trim(turn.user_answer), UpdateType::kStrengthener);
    const auto fused = defeasibility::fuse(s, turn.question, a, backends.fusion.get(),
                                           backends.decoding);
    const auto judgment = backends::judge(*backends.oracle, fused.text);
    if (fused.text != turn.fused.text || !(judgment == turn.judgment)) return false;
    current = fused.text;
  }
  return current == state.current_situation;
}

}  // namespace clarify::service
