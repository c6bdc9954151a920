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
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "backends/registry.hpp"
#include "defeasibility/reward.hpp"
#include "ppo/ppo.hpp"
#include "service/sessions.hpp"

namespace clarify::service {

/// Everything a CLI subcommand needs: the parsed config, the selected backend
/// profile and the run seed. Command methods return JSON results.
class Engine {
 public:
  Engine(nlohmann::json config, std::filesystem::path base_dir, const std::string& backend,
         std::uint64_t seed);

  static std::unique_ptr<Engine> open(const std::filesystem::path& config_path,
                                      const std::string& backend, std::uint64_t seed);

  const nlohmann::json& config() const { return config_; }
  const backends::BackendSet& backends() const { return backends_; }
  std::uint64_t seed() const { return seed_; }

  defeasibility::AnswerPipeline answer_pipeline() const;
  ppo::PpoConfig ppo_config() const;

  nlohmann::json estimate_stats(const std::filesystem::path& situations_path);

  /// PPO training on a trainable policy backend. Writes train_log.jsonl and a
  /// checkpoint into out_dir. Reward stats come from `stats_path` when given,
  /// otherwise they are estimated first.
  nlohmann::json train(const std::filesystem::path& situations_path,
                       const std::optional<std::filesystem::path>& stats_path,
                       const std::filesystem::path& out_dir);

  // One JSON object per situation: {situation, method, question}.
  nlohmann::json rank(const std::string& method, const std::filesystem::path& situations_path);

  nlohmann::json evaluate(const std::filesystem::path& eval_path);

  SessionManager& sessions();

 private:
  std::filesystem::path resolve(const std::string& p) const;

  nlohmann::json config_;
  std::filesystem::path base_dir_;
  backends::BackendSet backends_;
  std::uint64_t seed_;
  std::unique_ptr<defeasibility::RewardCache> cache_;
  std::unique_ptr<SessionManager> sessions_;
};

// Start-word statistics for a gold or silver corpus file.
nlohmann::json corpus_stats(const std::filesystem::path& path, const std::string& kind);

}  // namespace clarify::service
