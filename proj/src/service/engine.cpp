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

#include "service/engine.hpp"

#include <fstream>
#include <set>

#include "core/error.hpp"
#include "data/corpus.hpp"
#include "eval/metrics.hpp"
#include "pipelines/baselines.hpp"
#include "ppo/checkpoint.hpp"

namespace clarify::service {

using nlohmann::json;

Engine::Engine(json config, std::filesystem::path base_dir, const std::string& backend,
               std::uint64_t seed)
    : config_(std::move(config)),
      base_dir_(std::move(base_dir)),
      backends_(backends::build_backends(config_, base_dir_, backend)),
      seed_(seed) {
  backends_.decoding.seed = seed_;
  if (config_.contains("reward") && config_["reward"].contains("cache"))
    cache_ = std::make_unique<defeasibility::RewardCache>(
        resolve(config_["reward"]["cache"].get<std::string>()));
}

std::unique_ptr<Engine> Engine::open(const std::filesystem::path& config_path,
                                     const std::string& backend, std::uint64_t seed) {
  std::ifstream in(config_path);
  if (!in) fail(ErrorCode::kIo, "cannot read config " + config_path.string());
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kSchema, config_path.string() + ": " + e.what());
  }
  return std::make_unique<Engine>(std::move(config), config_path.parent_path(), backend, seed);
}

std::filesystem::path Engine::resolve(const std::string& p) const {
  std::filesystem::path path(p);
  return path.is_relative() ? base_dir_ / path : path;
}

defeasibility::AnswerPipeline Engine::answer_pipeline() const {
  const auto reward = config_.value("reward", json::object());
  return {backends_.answerer.get(),
          backends_.nli.get(),
          backends_.fusion.get(),
          backends_.oracle.get(),
          reward.value("k", defeasibility::kDefaultAnswerBudget),
          reward.value("filter", true),
          backends_.decoding,
          cache_.get()};
}

ppo::PpoConfig Engine::ppo_config() const {
  return ppo::PpoConfig::from_json(config_.value("ppo", json::object()));
}

json Engine::estimate_stats(const std::filesystem::path& situations_path) {
  const auto situations = data::load_situations(situations_path);
  const auto stats =
      defeasibility::estimate_stats(situations, *backends_.policy, answer_pipeline(), seed_);
  return ppo::to_json(stats);
}

json Engine::train(const std::filesystem::path& situations_path,
                   const std::optional<std::filesystem::path>& stats_path,
                   const std::filesystem::path& out_dir) {
  if (!backends_.trainable_policy || !backends_.value)
    fail(ErrorCode::kInvalidArgument,
         "backend profile \"" + backends_.name + "\" has no trainable policy");
  const auto cfg = ppo_config();
  const auto situations = data::load_situations(situations_path);
  const auto pipeline = answer_pipeline();

  defeasibility::RewardStats stats;
  if (stats_path) {
    std::ifstream in(*stats_path);
    if (!in) fail(ErrorCode::kIo, "cannot read reward stats " + stats_path->string());
    stats = ppo::reward_stats_from_json(json::parse(in));
  } else {
    stats = defeasibility::estimate_stats(situations, *backends_.policy, pipeline, seed_);
  }

  std::filesystem::create_directories(out_dir);
  std::ofstream log_out(out_dir / "train_log.jsonl");
  if (!log_out) fail(ErrorCode::kIo, "cannot write training log in " + out_dir.string());

  const ppo::RewardFn reward = [&](const Situation& s, const Question& q) {
    return defeasibility::raw_reward(defeasibility::simulate_pair(s, q, pipeline));
  };
  const auto result = ppo::train(situations, *backends_.trainable_policy, *backends_.value, reward,
                                 stats, cfg, seed_, [&](const ppo::StepLog& step) {
                                   log_out << step.to_json().dump() << '\n';
                                 });
  log_out.flush();

  ppo::save_checkpoint(out_dir / "checkpoint",
                       {result.log.size(), ppo::config_hash(config_), stats},
                       *backends_.trainable_policy, *backends_.value);

  json summary = {{"steps", result.log.size()},
                  {"aborted", result.aborted},
                  {"reward_stats", ppo::to_json(stats)},
                  {"log", (out_dir / "train_log.jsonl").string()},
                  {"checkpoint", (out_dir / "checkpoint").string()}};
  if (result.aborted) summary["diagnostic"] = result.diagnostic;
  if (!result.log.empty()) summary["last"] = result.log.back().to_json();
  return summary;
}

json Engine::rank(const std::string& method, const std::filesystem::path& situations_path) {
  const auto m = pipelines::method_from_string(method);
  pipelines::RankOptions options;
  if (config_.contains("wh_starts"))
    options.starts = config_["wh_starts"].get<std::vector<std::string>>();
  options.answer_budget = answer_pipeline().k;
  options.cache = cache_.get();
  json out = json::array();
  for (const auto& s : data::load_situations(situations_path)) {
    const auto q = pipelines::rank(m, s, backends_, options);
    out.push_back({{"situation", s.text()}, {"method", method}, {"question", q.text}});
  }
  return out;
}

json Engine::evaluate(const std::filesystem::path& eval_path) {
  const auto items = eval::load_eval_items(eval_path);
  eval::EvalOptions options;
  options.answer_budget = answer_pipeline().k;
  options.bleu.smoothing = config_.value("eval", json::object()).value("bleu_smoothing", false);
  options.cache = cache_.get();
  auto report = eval::evaluate(items, backends_, options).to_json();
  std::set<std::string> ids = {backends_.policy->id(), backends_.answerer->id(),
                               backends_.fusion->id(),  backends_.oracle->id(),
                               backends_.nli->id(),     backends_.qa->id(),
                               backends_.similarity->id()};
  report["provenance"] = {{"corpus_path", eval_path.string()},
                          {"backend_ids", ids},
                          {"config_hash", ppo::config_hash(config_)}};
  return report;
}

SessionManager& Engine::sessions() {
  if (!sessions_) {
    const auto sc = config_.value("session", json::object());
    SessionOptions options;
    options.turn_limit = sc.value("turn_limit", kDefaultTurnLimit);
    if (sc.contains("persist")) options.persist_path = resolve(sc["persist"].get<std::string>());
    options.seed = seed_;
    sessions_ = std::make_unique<SessionManager>(backends_, options);
  }
  return *sessions_;
}

json corpus_stats(const std::filesystem::path& path, const std::string& kind) {
  json out;
  if (kind == "gold") {
    const auto loaded = data::load_gold(path);
    out = data::question_start_stats(loaded.records).to_json();
    out["errors"] = loaded.errors;
  } else if (kind == "silver") {
    const auto loaded = data::load_silver(path);
    out = data::question_start_stats(loaded.records).to_json();
    const auto subset = data::defeasible_question_subset(loaded.records);
    std::set<std::string> with_defeasible;
    for (const auto& [s, q] : subset) with_defeasible.insert(s);
    out["defeasible_questions"] = subset.size();
    out["defeasible_situation_fraction"] =
        out["situations"].get<std::size_t>() == 0
            ? 0.0
            : static_cast<double>(with_defeasible.size()) / out["situations"].get<double>();
    out["errors"] = loaded.errors;
  } else {
    fail(ErrorCode::kInvalidArgument, "corpus kind must be gold or silver");
  }
  return out;
}

}  // namespace clarify::service
