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

#include "ppo/checkpoint.hpp"

#include <cstdio>
#include <fstream>

#include "core/error.hpp"

namespace clarify::ppo {

namespace {

void write_blob(const std::filesystem::path& path, std::span<const double> params) {
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size_bytes()));
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

void read_blob(const std::filesystem::path& path, std::span<double> params) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  if (static_cast<std::size_t>(in.tellg()) != params.size_bytes())
    fail(ErrorCode::kSchema, path.string() + " does not match the model's parameter count");
  in.seekg(0);
  in.read(reinterpret_cast<char*>(params.data()), static_cast<std::streamsize>(params.size_bytes()));
}

}  // namespace

std::string config_hash(const nlohmann::json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(backends::fnv1a64(config.dump())));
  return buf;
}

nlohmann::json to_json(const defeasibility::RewardStats& stats) {
  return {{"mu0", stats.mu0}, {"sigma0", stats.sigma0}, {"sample_size", stats.sample_size}};
}

defeasibility::RewardStats reward_stats_from_json(const nlohmann::json& j) {
  defeasibility::RewardStats s{j.at("mu0").get<double>(), j.at("sigma0").get<double>(),
                               j.at("sample_size").get<std::size_t>()};
  if (!(s.sigma0 > 0.0) || s.sample_size == 0)
    fail(ErrorCode::kSchema, "reward stats need sigma0 > 0 and sample_size > 0");
  return s;
}

void save_checkpoint(const std::filesystem::path& dir, const CheckpointManifest& manifest,
                     const backends::TokenPolicy& policy, const backends::ValueModel& value) {
  std::filesystem::create_directories(dir);
  write_blob(dir / "policy.bin", policy.parameters());
  write_blob(dir / "value.bin", value.parameters());
  std::ofstream out(dir / "manifest.json");
  out << nlohmann::json{{"step", manifest.step},
                        {"config_hash", manifest.config_hash},
                        {"reward_stats", to_json(manifest.reward_stats)}}
             .dump(2)
      << '\n';
  if (!out) fail(ErrorCode::kIo, "cannot write checkpoint manifest in " + dir.string());
}

CheckpointManifest load_checkpoint(const std::filesystem::path& dir, backends::TokenPolicy& policy,
                                   backends::ValueModel& value) {
  std::ifstream in(dir / "manifest.json");
  if (!in) fail(ErrorCode::kIo, "no checkpoint manifest in " + dir.string());
  const auto j = nlohmann::json::parse(in);
  CheckpointManifest m{j.at("step").get<std::size_t>(), j.at("config_hash").get<std::string>(),
                       reward_stats_from_json(j.at("reward_stats"))};
  read_blob(dir / "policy.bin", policy.mutable_parameters());
  read_blob(dir / "value.bin", value.mutable_parameters());
  return m;
}

}  // namespace clarify::ppo
