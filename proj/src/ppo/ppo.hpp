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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "backends/trainable.hpp"
#include "core/types.hpp"
#include "defeasibility/reward.hpp"

namespace clarify::ppo {

using backends::TokenId;

enum class KlPlacement {
  kPerToken,  // r_t = -beta * kl_t, terminal reward added at the last token
  kTerminal,  // whole-sequence KL subtracted at the last token only
};

struct PpoConfig {
  double gamma = 1.0;
  double lam = 0.95;
  double clip_eps = 0.2;
  double value_coef = 0.5;
  double kl_coef = 0.2;
  std::size_t batch_size = 64;
  std::size_t total_steps = 6000;
  std::size_t inner_epochs = 4;
  std::size_t max_question_tokens = 32;
  double learning_rate = 1e-5;
  double top_p = backends::kDefaultTopP;
  double temperature = backends::kDefaultTemperature;
  bool whiten_advantages = true;
  KlPlacement kl_placement = KlPlacement::kPerToken;

  void validate() const;
  static PpoConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// One question-generation episode of T tokens. State t is
/// (situation, tokens[0..t)); action t is tokens[t].
struct Trajectory {
  Situation situation;
  std::string question;
  std::vector<TokenId> tokens;
  std::vector<double> logprobs_behavior;
  std::vector<double> logprobs_initial;
  std::vector<double> values;
  std::vector<double> kl_penalties;
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<double> returns;
  double raw_reward = 0.0;
  double terminal_reward = 0.0;
  bool truncated = false;

  explicit Trajectory(Situation s) : situation(std::move(s)) {}
  std::size_t length() const { return tokens.size(); }
};

// Raw defeasibility reward of a finished question.
using RewardFn = std::function<double(const Situation&, const Question&)>;

Trajectory rollout(const backends::TokenPolicy& policy, const backends::TokenPolicy& initial_policy,
                   const backends::ValueModel& value, const Situation& s, const PpoConfig& cfg,
                   const RewardFn& reward_fn, const defeasibility::RewardStats& stats,
                   backends::Rng& rng);

// Fills `rewards` from terminal_reward and kl_penalties.
void assign_rewards(Trajectory& traj, const PpoConfig& cfg);

// Truncated GAE with V(s_T) = 0; returns = advantages + values.
Trajectory compute_gae(Trajectory traj, const PpoConfig& cfg);

double clipped_surrogate(double ratio, double advantage, double clip_eps);

double value_loss(std::span<const double> values_pred, std::span<const double> returns);

struct PpoLoss {
  double total = 0.0;
  double policy_part = 0.0;
  double value_part = 0.0;
};

struct PpoGradients {
  std::vector<double> policy;
  std::vector<double> value;
};

/// loss = value_coef * value_part + policy_part, averaged over every token in
/// the batch. When `grads` is given it receives the exact gradient.
PpoLoss ppo_loss(std::span<const Trajectory> batch, const backends::TokenPolicy& policy,
                 const backends::ValueModel& value, const PpoConfig& cfg,
                 PpoGradients* grads = nullptr);

struct StepLog {
  std::size_t step = 0;
  double mean_raw_reward = 0.0;
  double mean_norm_reward = 0.0;
  double mean_kl = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  std::vector<StepLog> log;
  bool aborted = false;
  std::string diagnostic;
};

/// Runs cfg.total_steps PPO iterations. Each samples a minibatch of
/// situations (with replacement), rolls out the current policy, computes
/// advantages and takes cfg.inner_epochs optimizer steps on ppo_loss. A
/// non-finite loss stops training with `aborted` set.
TrainResult train(std::span<const Situation> situations, backends::TokenPolicy& policy,
                  backends::ValueModel& value, const RewardFn& reward_fn,
                  const defeasibility::RewardStats& stats, const PpoConfig& cfg,
                  std::uint64_t seed, const std::function<void(const StepLog&)>& on_step = {});

}  // namespace clarify::ppo
