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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "backends/registry.hpp"
#include "backends/trainable.hpp"
#include "core/error.hpp"
#include "data/corpus.hpp"
#include "defeasibility/reward.hpp"
#include "ppo/checkpoint.hpp"
#include "ppo/ppo.hpp"

using namespace clarify;
using namespace clarify::backends;
using namespace clarify::ppo;

namespace {

// Independent O(T^2) sum: A_t = sum_{k>=t} (gamma*lam)^(k-t) delta_k.
std::vector<double> brute_force_gae(const std::vector<double>& r, const std::vector<double>& v,
                                    double gamma, double lam) {
  const std::size_t n = r.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = t; k < n; ++k) {
      const double next = k + 1 < n ? v[k + 1] : 0.0;
      const double delta = r[k] + gamma * next - v[k];
      adv[t] += std::pow(gamma * lam, static_cast<double>(k - t)) * delta;
    }
  }
  return adv;
}

Trajectory with_rewards(std::vector<double> rewards, std::vector<double> values) {
  Trajectory t(Situation("s"));
  t.tokens.assign(rewards.size(), 0);
  t.rewards = std::move(rewards);
  t.values = std::move(values);
  return t;
}

LinearPolicyOptions tiny_policy(std::uint64_t seed) {
  LinearPolicyOptions o;
  o.vocab = {"<eos>", "why", "who", "what"};
  o.eos = "<eos>";
  o.max_positions = 3;
  o.situation_buckets = 2;
  o.init_scale = 0.3;
  o.init_seed = seed;
  return o;
}

PpoConfig quiet_config() {
  PpoConfig cfg;
  cfg.max_question_tokens = 3;
  cfg.top_p = 1.0;
  cfg.temperature = 1.0;
  return cfg;
}

RewardFn constant_reward(double r) {
  return [r](const Situation&, const Question&) { return r; };
}

}  // namespace

TEST_CASE("clipped surrogate examples") {
  CHECK(clipped_surrogate(1.0, 2.0, 0.2) == 2.0);
  CHECK(clipped_surrogate(1.0, 2.0, 0.7) == 2.0);
  CHECK(clipped_surrogate(1.5, 1.0, 0.2) == doctest::Approx(1.2));
  CHECK(clipped_surrogate(0.5, -1.0, 0.2) == doctest::Approx(-0.8));
}

TEST_CASE("clipped surrogate is a lower bound of the unclipped term") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ratio(0.01, 5.0), adv(-5.0, 5.0), eps(0.01, 0.9);
  for (int i = 0; i < 5000; ++i) {
    const double r = ratio(rng), a = adv(rng);
    CHECK(clipped_surrogate(r, a, eps(rng)) <= r * a);
  }
}

TEST_CASE("value loss examples") {
  const std::vector<double> a = {1, 2, 3};
  CHECK(value_loss(a, a) == 0.0);
  CHECK(value_loss(std::vector<double>{0}, std::vector<double>{2}) == 4.0);
  CHECK(value_loss(std::vector<double>{1, 3}, std::vector<double>{0, 0}) == 5.0);
  CHECK_THROWS_AS(value_loss(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
}

TEST_CASE("gae examples") {
  PpoConfig cfg;
  cfg.gamma = 0.7;
  cfg.lam = 0.3;
  auto one = compute_gae(with_rewards({2.0}, {0.5}), cfg);
  CHECK(one.advantages[0] == doctest::Approx(1.5));

  cfg.lam = 0.0;
  auto zero = compute_gae(with_rewards({1.0, 0.0, 2.0}, {0.1, 0.2, 0.3}), cfg);
  CHECK(zero.advantages[0] == doctest::Approx(1.0 + 0.7 * 0.2 - 0.1));
  CHECK(zero.advantages[1] == doctest::Approx(0.0 + 0.7 * 0.3 - 0.2));
  CHECK(zero.advantages[2] == doctest::Approx(2.0 - 0.3));

  cfg.gamma = 0.99;
  cfg.lam = 0.95;
  auto three = compute_gae(with_rewards({0, 0, 1}, {0.5, 0.5, 0.5}), cfg);
  CHECK(std::abs(three.advantages[0] - 0.432567625) < 1e-12);
  CHECK(std::abs(three.advantages[1] - 0.46525) < 1e-12);
  CHECK(std::abs(three.advantages[2] - 0.5) < 1e-12);
}

TEST_CASE("gae matches brute force and returns are advantages plus values") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0), x(-2.0, 2.0);
  std::uniform_int_distribution<int> len(1, 10);
  for (int e = 0; e < 300; ++e) {
    PpoConfig cfg;
    cfg.gamma = u(rng);
    cfg.lam = u(rng);
    const int n = len(rng);
    std::vector<double> r(n), v(n);
    for (int i = 0; i < n; ++i) {
      r[i] = x(rng);
      v[i] = x(rng);
    }
    const auto out = compute_gae(with_rewards(r, v), cfg);
    const auto ref = brute_force_gae(r, v, cfg.gamma, cfg.lam);
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(out.advantages[i] - ref[i]) < 1e-10);
      CHECK(out.returns[i] == out.advantages[i] + out.values[i]);
    }
  }
}

TEST_CASE("reward placement") {
  PpoConfig cfg;
  cfg.kl_coef = 0.0;
  Trajectory t(Situation("s"));
  t.tokens = {1};
  t.kl_penalties = {0.3};
  t.terminal_reward = 0.8;
  assign_rewards(t, cfg);
  CHECK(t.rewards == std::vector<double>{0.8});

  cfg.kl_coef = 0.5;
  t.tokens = {1, 2, 3};
  t.kl_penalties = {0.2, -0.4, 0.6};
  assign_rewards(t, cfg);
  CHECK(t.rewards[0] == doctest::Approx(-0.1));
  CHECK(t.rewards[1] == doctest::Approx(0.2));
  CHECK(t.rewards[2] == doctest::Approx(0.8 - 0.3));

  cfg.kl_placement = KlPlacement::kTerminal;
  assign_rewards(t, cfg);
  CHECK(t.rewards[0] == 0.0);
  CHECK(t.rewards[1] == 0.0);
  CHECK(t.rewards[2] == doctest::Approx(0.8 - 0.5 * 0.4));
}

TEST_CASE("rollout against the frozen initial policy carries no KL") {
  const LinearSoftmaxPolicy policy(tiny_policy(2));
  const auto initial = policy.clone();
  const LinearValueModel value(4, 3, 2);
  Rng rng(5);
  const auto cfg = quiet_config();
  for (int i = 0; i < 100; ++i) {
    const auto t = rollout(policy, *initial, value, Situation("lying"), cfg, constant_reward(0.4),
                           {0.1, 0.5, 4}, rng);
    REQUIRE(t.length() >= 1);
    double kl = 0.0;
    for (double k : t.kl_penalties) kl += k;
    CHECK(kl == 0.0);
    for (std::size_t j = 0; j + 1 < t.length(); ++j) CHECK(t.rewards[j] == 0.0);
    CHECK(t.rewards.back() == t.terminal_reward);
    CHECK(t.terminal_reward == doctest::Approx((0.4 - 0.1) / 0.5));
    CHECK(t.logprobs_behavior.size() == t.length());
    CHECK(t.values.size() == t.length());
  }
}

TEST_CASE("single-token rollout with unit stats passes the raw reward through") {
  LinearPolicyOptions o;
  o.vocab = {"who"};
  const LinearSoftmaxPolicy policy(o);
  const LinearValueModel value(1, 4, 0);
  PpoConfig cfg = quiet_config();
  cfg.max_question_tokens = 1;
  cfg.kl_coef = 0.0;
  Rng rng(1);
  const auto t = rollout(policy, policy, value, Situation("s"), cfg, constant_reward(1.0),
                         {0.0, 1.0, 1}, rng);
  CHECK(t.question == "who");
  CHECK(t.terminal_reward == 1.0);
  CHECK(t.rewards == std::vector<double>{1.0});
}

TEST_CASE("decodes that hit the token cap are truncated and still rewarded") {
  LinearSoftmaxPolicy policy(tiny_policy(2));
  policy.shift_bias("<eos>", -50.0);
  const LinearValueModel value(4, 3, 2);
  PpoConfig cfg = quiet_config();
  Rng rng(3);
  const auto t = rollout(policy, policy, value, Situation("s"), cfg, constant_reward(0.7),
                         {0.0, 1.0, 1}, rng);
  CHECK(t.length() == cfg.max_question_tokens);
  CHECK(t.truncated);
  CHECK(t.raw_reward == 0.7);
}

TEST_CASE("ppo loss examples") {
  LinearSoftmaxPolicy policy(tiny_policy(3));
  LinearValueModel value(4, 3, 2);
  const auto initial = policy.clone();
  Rng rng(9);
  PpoConfig cfg = quiet_config();
  std::vector<Trajectory> batch;
  for (int i = 0; i < 8; ++i) {
    auto t = rollout(policy, *initial, value, Situation("case " + std::to_string(i)), cfg,
                     [i](const Situation&, const Question&) { return 0.1 * i; }, {}, rng);
    batch.push_back(compute_gae(std::move(t), cfg));
  }

  SUBCASE("same policy with whitened advantages") {
    const auto loss = ppo_loss(batch, policy, value, cfg);
    CHECK(std::abs(loss.policy_part) < 1e-12);
  }
  SUBCASE("alpha zero") {
    cfg.value_coef = 0.0;
    const auto loss = ppo_loss(batch, policy, value, cfg);
    CHECK(loss.total == loss.policy_part);
  }
  SUBCASE("single token, ratio 1.5") {
    Trajectory t(Situation("single"));
    t.tokens = {1};
    const auto lp = policy.next_token_logprobs(t.situation, {}, cfg.temperature)[1];
    t.logprobs_behavior = {lp - std::log(1.5)};
    t.values = {value.value(t.situation, {})};
    t.advantages = {1.0};
    t.returns = t.values;
    cfg.whiten_advantages = false;
    cfg.value_coef = 1.0;
    const std::vector<Trajectory> one = {t};
    const auto loss = ppo_loss(one, policy, value, cfg);
    CHECK(loss.total == doctest::Approx(-1.2));
    CHECK(loss.value_part == 0.0);
  }
  SUBCASE("empty batch") {
    CHECK_THROWS_AS(ppo_loss(std::vector<Trajectory>{}, policy, value, cfg), Error);
  }
}

TEST_CASE("ppo loss gradient matches central differences") {
  LinearSoftmaxPolicy policy(tiny_policy(4));
  LinearValueModel value(4, 3, 2);
  REQUIRE(policy.parameters().size() + value.parameters().size() <= 200);
  std::mt19937_64 noise(13);
  std::normal_distribution<double> n(0.0, 0.3);
  for (double& w : value.mutable_parameters()) w = n(noise);
  const auto behavior = policy.clone();
  for (double& w : policy.mutable_parameters()) w += n(noise) * 0.2;

  PpoConfig cfg = quiet_config();
  cfg.clip_eps = 0.3;
  Rng rng(17);
  std::vector<Trajectory> batch;
  for (int i = 0; i < 6; ++i) {
    auto t = rollout(*behavior, *behavior, value, Situation("b" + std::to_string(i)), cfg,
                     [i](const Situation&, const Question&) { return 0.2 * i; }, {}, rng);
    batch.push_back(compute_gae(std::move(t), cfg));
  }

  PpoGradients g;
  ppo_loss(batch, policy, value, cfg, &g);
  const double h = 1e-6;
  auto check = [&](std::span<double> params, const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      const double up = ppo_loss(batch, policy, value, cfg).total;
      params[i] = keep - h;
      const double down = ppo_loss(batch, policy, value, cfg).total;
      params[i] = keep;
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(analytic[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  };
  check(policy.mutable_parameters(), g.policy);
  check(value.mutable_parameters(), g.value);
}

TEST_CASE("training edge cases") {
  LinearSoftmaxPolicy policy(tiny_policy(1));
  LinearValueModel value(4, 3, 2);
  const std::vector<double> before(policy.parameters().begin(), policy.parameters().end());
  const std::vector<Situation> s = {Situation("a"), Situation("b")};
  PpoConfig cfg = quiet_config();
  cfg.total_steps = 0;
  auto r = train(s, policy, value, constant_reward(0.5), {}, cfg, 1);
  CHECK(r.log.empty());
  CHECK(std::equal(before.begin(), before.end(), policy.parameters().begin()));

  cfg.total_steps = 3;
  cfg.batch_size = 4;
  r = train(s, policy, value,
            [](const Situation&, const Question&) { return std::nan(""); }, {}, cfg, 1);
  CHECK(r.aborted);
  CHECK(r.diagnostic.find("non-finite") != std::string::npos);
  CHECK(r.log.empty());

  CHECK_THROWS_AS(train(std::vector<Situation>{}, policy, value, constant_reward(0), {}, cfg, 1),
                  Error);
}

TEST_CASE("training is deterministic under a seed") {
  const std::vector<Situation> s = {Situation("a"), Situation("b")};
  PpoConfig cfg = quiet_config();
  cfg.total_steps = 20;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.01;
  const RewardFn reward = [](const Situation&, const Question& q) {
    return q.text.find("who") != std::string::npos ? 1.0 : 0.0;
  };
  auto run = [&] {
    LinearSoftmaxPolicy policy(tiny_policy(6));
    LinearValueModel value(4, 3, 2);
    std::vector<std::string> lines;
    train(s, policy, value, reward, {0.1, 0.3, 2}, cfg, 77,
          [&](const StepLog& l) { lines.push_back(l.to_json().dump()); });
    return lines;
  };
  const auto a = run();
  CHECK(a.size() == 20);
  CHECK(a == run());
}

TEST_CASE("config parsing and validation") {
  const PpoConfig d;
  CHECK(d.gamma == 1.0);
  CHECK(d.lam == 0.95);
  CHECK(d.clip_eps == 0.2);
  CHECK(d.value_coef == 0.5);
  CHECK(d.kl_coef == 0.2);
  CHECK(d.batch_size == 64);
  CHECK(d.total_steps == 6000);
  CHECK(d.top_p == 0.6);
  CHECK(d.temperature == 0.7);
  const auto round = PpoConfig::from_json(d.to_json());
  CHECK(round.to_json() == d.to_json());
  CHECK_THROWS_AS(PpoConfig::from_json({{"gamma", 1.5}}), Error);
  CHECK_THROWS_AS(PpoConfig::from_json({{"clip_eps", 0.0}}), Error);
  CHECK_THROWS_AS(PpoConfig::from_json({{"batch_size", 0}}), Error);
  CHECK_THROWS_AS(PpoConfig::from_json({{"kl_placement", "sometimes"}}), Error);
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "clarify_ckpt_test";
  std::filesystem::remove_all(dir);
  LinearSoftmaxPolicy policy(tiny_policy(8));
  LinearValueModel value(4, 3, 2);
  value.mutable_parameters()[3] = 1.25;
  const nlohmann::json config = {{"ppo", {{"batch_size", 4}}}};
  save_checkpoint(dir, {12, config_hash(config), {0.2, 0.1, 5}}, policy, value);

  LinearSoftmaxPolicy p2(tiny_policy(99));
  LinearValueModel v2(4, 3, 2);
  const auto m = load_checkpoint(dir, p2, v2);
  CHECK(m.step == 12);
  CHECK(m.config_hash == config_hash(config));
  CHECK(m.reward_stats.mu0 == 0.2);
  CHECK(m.reward_stats.sample_size == 5);
  CHECK(std::equal(policy.parameters().begin(), policy.parameters().end(), p2.parameters().begin()));
  CHECK(v2.parameters()[3] == 1.25);

  LinearValueModel wrong(3, 3, 2);
  CHECK_THROWS_AS(load_checkpoint(dir, p2, wrong), Error);
  CHECK(config_hash(config).size() == 16);
  CHECK(config_hash(config) != config_hash(nlohmann::json::object()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("toy task: windowed normalized reward strictly increases") {
  const auto dir = std::filesystem::path(CLARIFY_SOURCE_DIR) / "configs";
  std::ifstream in(dir / "toy.json");
  const auto config = nlohmann::json::parse(in);
  auto set = build_backends(config, dir);
  const auto situations = data::load_situations(std::filesystem::path(CLARIFY_SOURCE_DIR) /
                                                "tests" / "data" / "toy_situations.jsonl");
  const defeasibility::AnswerPipeline pipeline{set.answerer.get(), set.nli.get(), set.fusion.get(),
                                               set.oracle.get(), 1, true, set.decoding, nullptr};
  const RewardFn reward = [&](const Situation& s, const Question& q) {
    return defeasibility::raw_reward(defeasibility::simulate_pair(s, q, pipeline));
  };
  const auto stats = defeasibility::estimate_stats(situations, *set.policy, pipeline, 3);
  const auto cfg = PpoConfig::from_json(config["ppo"]);
  const auto result = train(situations, *set.trainable_policy, *set.value, reward, stats, cfg, 3);
  REQUIRE_FALSE(result.aborted);
  REQUIRE(result.log.size() == cfg.total_steps);

  constexpr std::size_t window = 250;
  std::vector<double> means;
  for (std::size_t start = 0; start < result.log.size(); start += window) {
    double sum = 0.0;
    for (std::size_t i = start; i < start + window; ++i) sum += result.log[i].mean_norm_reward;
    means.push_back(sum / window);
  }
  for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i] > means[i - 1]);
}
