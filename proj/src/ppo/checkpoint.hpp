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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "backends/trainable.hpp"
#include "defeasibility/reward.hpp"

namespace clarify::ppo {

struct CheckpointManifest {
  std::size_t step = 0;
  std::string config_hash;
  defeasibility::RewardStats reward_stats;
};

// Hex FNV-1a of the compact JSON dump.
std::string config_hash(const nlohmann::json& config);

// Writes policy.bin / value.bin (raw little-endian doubles) and manifest.json.
void save_checkpoint(const std::filesystem::path& dir, const CheckpointManifest& manifest,
                     const backends::TokenPolicy& policy, const backends::ValueModel& value);

CheckpointManifest load_checkpoint(const std::filesystem::path& dir, backends::TokenPolicy& policy,
                                   backends::ValueModel& value);

nlohmann::json to_json(const defeasibility::RewardStats& stats);
defeasibility::RewardStats reward_stats_from_json(const nlohmann::json& j);

}  // namespace clarify::ppo
