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

#include "ppo/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace clarify::ppo {

void PpoConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kInvalidArgument, std::string("invalid PPO config: ") + what);
  };
  require(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0,1]");
  require(lam >= 0.0 && lam <= 1.0, "lam must be in [0,1]");
  require(clip_eps > 0.0, "clip_eps must be > 0");
  require(value_coef >= 0.0, "value_coef must be >= 0");
  require(kl_coef >= 0.0, "kl_coef must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(inner_epochs >= 1, "inner_epochs must be >= 1");
  require(max_question_tokens >= 1, "max_question_tokens must be >= 1");
  require(learning_rate > 0.0, "learning_rate must be > 0");
  require(top_p > 0.0 && top_p <= 1.0, "top_p must be in (0,1]");
  require(temperature > 0.0, "temperature must be > 0");
}

PpoConfig PpoConfig::from_json(const nlohmann::json& j) {
  PpoConfig c;
  c.gamma = j.value("gamma", c.gamma);
  c.lam = j.value("lam", c.lam);
  c.clip_eps = j.value("clip_eps", c.clip_eps);
  c.value_coef = j.value("value_coef", c.value_coef);
  c.kl_coef = j.value("kl_coef", c.kl_coef);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.total_steps = j.value("total_steps", c.total_steps);
  c.inner_epochs = j.value("inner_epochs", c.inner_epochs);
  c.max_question_tokens = j.value("max_question_tokens", c.max_question_tokens);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.top_p = j.value("top_p", c.top_p);
  c.temperature = j.value("temperature", c.temperature);
  c.whiten_advantages = j.value("whiten_advantages", c.whiten_advantages);
  const auto placement = j.value("kl_placement", std::string("per_token"));
  if (placement == "per_token") {
    c.kl_placement = KlPlacement::kPerToken;
  } else if (placement == "terminal") {
    c.kl_placement = KlPlacement::kTerminal;
  } else {
    fail(ErrorCode::kInvalidArgument, "kl_placement must be per_token or terminal");
  }
  c.validate();
  return c;
}

nlohmann::json PpoConfig::to_json() const {
  return {{"gamma", gamma},
          {"lam", lam},
          {"clip_eps", clip_eps},
          {"value_coef", value_coef},
          {"kl_coef", kl_coef},
          {"batch_size", batch_size},
          {"total_steps", total_steps},
          {"inner_epochs", inner_epochs},
          {"max_question_tokens", max_question_tokens},
          {"learning_rate", learning_rate},
          {"top_p", top_p},
          {"temperature", temperature},
          {"whiten_advantages", whiten_advantages},
          {"kl_placement", kl_placement == KlPlacement::kPerToken ? "per_token" : "terminal"}};
}

void assign_rewards(Trajectory& traj, const PpoConfig& cfg) {
  const std::size_t n = traj.length();
  if (n == 0 || traj.kl_penalties.size() != n)
    fail(ErrorCode::kInvalidArgument, "trajectory is empty or has mismatched KL terms");
  traj.rewards.assign(n, 0.0);
  if (cfg.kl_placement == KlPlacement::kPerToken) {
    for (std::size_t t = 0; t < n; ++t) traj.rewards[t] = -cfg.kl_coef * traj.kl_penalties[t];
    traj.rewards[n - 1] += traj.terminal_reward;
  } else {
    double total_kl = 0.0;
    for (double k : traj.kl_penalties) total_kl += k;
    traj.rewards[n - 1] = traj.terminal_reward - cfg.kl_coef * total_kl;
  }
}

Trajectory rollout(const backends::TokenPolicy& policy, const backends::TokenPolicy& initial_policy,
                   const backends::ValueModel& value, const Situation& s, const PpoConfig& cfg,
                   const RewardFn& reward_fn, const defeasibility::RewardStats& stats,
                   backends::Rng& rng) {
  Trajectory traj(s);
  auto seq = backends::sample_sequence(policy, s, cfg.max_question_tokens, cfg.top_p,
                                       cfg.temperature, rng);
  traj.tokens = std::move(seq.tokens);
  traj.logprobs_behavior = std::move(seq.logprobs);
  traj.truncated = seq.truncated;
  traj.logprobs_initial =
      backends::score_sequence(initial_policy, s, traj.tokens, cfg.temperature);
  const std::span<const TokenId> tokens(traj.tokens);
  traj.values.reserve(tokens.size());
  traj.kl_penalties.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    traj.values.push_back(value.value(s, tokens.first(t)));
    traj.kl_penalties.push_back(traj.logprobs_behavior[t] - traj.logprobs_initial[t]);
  }
  traj.question = policy.detokenize(traj.tokens);
  traj.raw_reward = reward_fn(s, Question(traj.question));
  traj.terminal_reward = defeasibility::normalize_reward(traj.raw_reward, stats);
  assign_rewards(traj, cfg);
  return traj;
}

Trajectory compute_gae(Trajectory traj, const PpoConfig& cfg) {
  const std::size_t n = traj.length();
  if (traj.rewards.size() != n || traj.values.size() != n)
    fail(ErrorCode::kInvalidArgument, "GAE needs rewards and values for every token");
  traj.advantages.assign(n, 0.0);
  traj.returns.assign(n, 0.0);
  double next_value = 0.0;
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double delta = traj.rewards[i] + cfg.gamma * next_value - traj.values[i];
    running = delta + cfg.gamma * cfg.lam * running;
    traj.advantages[i] = running;
    traj.returns[i] = running + traj.values[i];
    next_value = traj.values[i];
  }
  return traj;
}

double clipped_surrogate(double ratio, double advantage, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * advantage, clipped * advantage);
}

double value_loss(std::span<const double> values_pred, std::span<const double> returns) {
  if (values_pred.size() != returns.size())
    fail(ErrorCode::kInvalidArgument, "value_loss length mismatch");
  if (values_pred.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values_pred.size(); ++i) {
    const double d = values_pred[i] - returns[i];
    acc += d * d;
  }
  return acc / static_cast<double>(values_pred.size());
}

PpoLoss ppo_loss(std::span<const Trajectory> batch, const backends::TokenPolicy& policy,
                 const backends::ValueModel& value, const PpoConfig& cfg, PpoGradients* grads) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "ppo_loss on an empty batch");

  std::vector<double> adv;
  for (const auto& traj : batch) {
    if (traj.advantages.size() != traj.length() || traj.returns.size() != traj.length())
      fail(ErrorCode::kInvalidArgument, "advantages must be computed before ppo_loss");
    adv.insert(adv.end(), traj.advantages.begin(), traj.advantages.end());
  }
  const double n = static_cast<double>(adv.size());
  if (cfg.whiten_advantages) {
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    for (double& a : adv) a = sd > 0.0 ? (a - mean) / (sd + 1e-8) : a - mean;
  }

  if (grads) {
    grads->policy.assign(policy.parameters().size(), 0.0);
    grads->value.assign(value.parameters().size(), 0.0);
  }

  double surrogate_sum = 0.0;
  double value_sq_sum = 0.0;
  std::size_t k = 0;
  for (const auto& traj : batch) {
    const std::span<const TokenId> tokens(traj.tokens);
    for (std::size_t t = 0; t < tokens.size(); ++t, ++k) {
      const auto prefix = tokens.first(t);
      const double logp =
          policy.next_token_logprobs(traj.situation, prefix, cfg.temperature)[tokens[t]];
      const double ratio = std::exp(logp - traj.logprobs_behavior[t]);
      const double a = adv[k];
      const double unclipped = ratio * a;
      const double cso = clipped_surrogate(ratio, a, cfg.clip_eps);
      surrogate_sum += cso;

      const double v = value.value(traj.situation, prefix);
      const double diff = v - traj.returns[t];
      value_sq_sum += diff * diff;

      if (grads) {
        // The min selects the unclipped term whenever it is not larger; only
        // then does the surrogate depend on the policy parameters.
        if (unclipped <= cso) {
          policy.accumulate_logprob_gradient(traj.situation, prefix, tokens[t], cfg.temperature,
                                             -a * ratio / n, grads->policy);
        }
        value.accumulate_gradient(traj.situation, prefix, cfg.value_coef * 2.0 * diff / n,
                                  grads->value);
      }
    }
  }

  PpoLoss loss;
  loss.policy_part = -surrogate_sum / n;
  loss.value_part = value_sq_sum / n;
  loss.total = cfg.value_coef * loss.value_part + loss.policy_part;
  return loss;
}

nlohmann::json StepLog::to_json() const {
  return {{"step", step},
          {"mean_raw_reward", mean_raw_reward},
          {"mean_norm_reward", mean_norm_reward},
          {"mean_kl", mean_kl},
          {"policy_loss", policy_loss},
          {"value_loss", value_loss}};
}

TrainResult train(std::span<const Situation> situations, backends::TokenPolicy& policy,
                  backends::ValueModel& value, const RewardFn& reward_fn,
                  const defeasibility::RewardStats& stats, const PpoConfig& cfg,
                  std::uint64_t seed, const std::function<void(const StepLog&)>& on_step) {
  cfg.validate();
  TrainResult result;
  if (cfg.total_steps == 0) return result;
  if (situations.empty()) fail(ErrorCode::kInvalidArgument, "train needs situations");

  const auto initial_policy = policy.clone();
  backends::AdamOptimizer policy_opt(cfg.learning_rate);
  backends::AdamOptimizer value_opt(cfg.learning_rate);
  backends::Rng rng(seed);

  for (std::size_t step = 0; step < cfg.total_steps; ++step) {
    std::vector<Trajectory> batch;
    batch.reserve(cfg.batch_size);
    StepLog log;
    log.step = step;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      const auto idx = static_cast<std::size_t>(backends::uniform01(rng) *
                                                static_cast<double>(situations.size()));
      auto traj = rollout(policy, *initial_policy, value, situations[idx], cfg, reward_fn, stats,
                          rng);
      log.mean_raw_reward += traj.raw_reward;
      log.mean_norm_reward += traj.terminal_reward;
      for (double k : traj.kl_penalties) log.mean_kl += k;
      batch.push_back(compute_gae(std::move(traj), cfg));
    }
    const double bs = static_cast<double>(cfg.batch_size);
    log.mean_raw_reward /= bs;
    log.mean_norm_reward /= bs;
    log.mean_kl /= bs;

    PpoGradients grads;
    for (std::size_t epoch = 0; epoch < cfg.inner_epochs; ++epoch) {
      const auto loss = ppo_loss(batch, policy, value, cfg, &grads);
      const bool grads_finite =
          std::all_of(grads.policy.begin(), grads.policy.end(), [](double g) { return std::isfinite(g); }) &&
          std::all_of(grads.value.begin(), grads.value.end(), [](double g) { return std::isfinite(g); });
      if (!std::isfinite(loss.total) || !grads_finite) {
        std::ostringstream diag;
        diag << "non-finite loss at step " << step << " epoch " << epoch
             << ": total=" << loss.total << " policy=" << loss.policy_part
             << " value=" << loss.value_part << " mean_raw_reward=" << log.mean_raw_reward;
        result.aborted = true;
        result.diagnostic = diag.str();
        return result;
      }
      log.policy_loss += loss.policy_part / static_cast<double>(cfg.inner_epochs);
      log.value_loss += loss.value_part / static_cast<double>(cfg.inner_epochs);
      policy_opt.step(policy.mutable_parameters(), grads.policy);
      value_opt.step(value.mutable_parameters(), grads.value);
    }
    result.log.push_back(log);
    if (on_step) on_step(log);
  }
  return result;
}

}  // namespace clarify::ppo
