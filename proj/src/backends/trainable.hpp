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
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "backends/interfaces.hpp"

namespace clarify::backends {

using TokenId = std::uint32_t;
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Autoregressive token policy with analytic log-prob gradients (the PPO
/// policy slot). Log-probs are those of softmax(logits / temperature).
class TokenPolicy {
 public:
  virtual ~TokenPolicy() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual std::optional<TokenId> eos() const = 0;
  virtual std::string detokenize(std::span<const TokenId> tokens) const = 0;

  virtual std::vector<double> next_token_logprobs(const Situation& s,
                                                  std::span<const TokenId> prefix,
                                                  double temperature) const = 0;
  // grad += scale * d log p(token | s, prefix) / d params
  virtual void accumulate_logprob_gradient(const Situation& s, std::span<const TokenId> prefix,
                                           TokenId token, double temperature, double scale,
                                           std::span<double> grad) const = 0;

  virtual std::span<const double> parameters() const = 0;
  virtual std::span<double> mutable_parameters() = 0;
  virtual std::unique_ptr<TokenPolicy> clone() const = 0;
};

/// Scalar state-value model over (situation, decoded prefix).
class ValueModel {
 public:
  virtual ~ValueModel() = default;

  virtual double value(const Situation& s, std::span<const TokenId> prefix) const = 0;
  // grad += scale * d value / d params
  virtual void accumulate_gradient(const Situation& s, std::span<const TokenId> prefix,
                                   double scale, std::span<double> grad) const = 0;

  virtual std::span<const double> parameters() const = 0;
  virtual std::span<double> mutable_parameters() = 0;
  virtual std::unique_ptr<ValueModel> clone() const = 0;
};

/// Sparse binary state features: bias, previous token (or BOS), position
/// (clamped), and an optional hashed situation bucket.
class StateFeaturizer {
 public:
  StateFeaturizer(std::size_t vocab_size, std::size_t max_positions, std::size_t situation_buckets);

  std::size_t num_features() const;
  std::vector<std::size_t> active(const Situation& s, std::span<const TokenId> prefix) const;

 private:
  std::size_t vocab_size_;
  std::size_t max_positions_;
  std::size_t situation_buckets_;
};

std::uint64_t fnv1a64(std::string_view data);

struct LinearPolicyOptions {
  std::vector<std::string> vocab;
  std::optional<std::string> eos;
  std::size_t max_positions = 4;
  std::size_t situation_buckets = 0;
  double init_scale = 0.0;
  std::uint64_t init_seed = 0;
};

class LinearSoftmaxPolicy : public TokenPolicy {
 public:
  explicit LinearSoftmaxPolicy(LinearPolicyOptions options);

  // Adds `delta` to the bias logit of a vocabulary word.
  void shift_bias(std::string_view word, double delta);

  std::size_t vocab_size() const override { return options_.vocab.size(); }
  std::optional<TokenId> eos() const override { return eos_; }
  std::string detokenize(std::span<const TokenId> tokens) const override;
  std::optional<TokenId> token_id(std::string_view word) const;

  std::vector<double> next_token_logprobs(const Situation& s, std::span<const TokenId> prefix,
                                          double temperature) const override;
  void accumulate_logprob_gradient(const Situation& s, std::span<const TokenId> prefix,
                                   TokenId token, double temperature, double scale,
                                   std::span<double> grad) const override;

  std::span<const double> parameters() const override { return weights_; }
  std::span<double> mutable_parameters() override { return weights_; }
  std::unique_ptr<TokenPolicy> clone() const override;

 private:
  LinearPolicyOptions options_;
  StateFeaturizer features_;
  std::optional<TokenId> eos_;
  std::vector<double> weights_;  // [feature][token]
};

class LinearValueModel : public ValueModel {
 public:
  LinearValueModel(std::size_t vocab_size, std::size_t max_positions,
                   std::size_t situation_buckets);

  double value(const Situation& s, std::span<const TokenId> prefix) const override;
  void accumulate_gradient(const Situation& s, std::span<const TokenId> prefix, double scale,
                           std::span<double> grad) const override;

  std::span<const double> parameters() const override { return weights_; }
  std::span<double> mutable_parameters() override { return weights_; }
  std::unique_ptr<ValueModel> clone() const override;

 private:
  StateFeaturizer features_;
  std::vector<double> weights_;
};

// Nucleus sampling over a next-token log-prob vector.
TokenId sample_top_p(std::span<const double> logprobs, double top_p, Rng& rng);

struct SampledSequence {
  std::vector<TokenId> tokens;
  std::vector<double> logprobs;
  bool truncated = false;
};

// Samples until EOS (kept as the final action) or max_tokens.
SampledSequence sample_sequence(const TokenPolicy& policy, const Situation& s,
                                std::size_t max_tokens, double top_p, double temperature,
                                Rng& rng);

// Log-probs of an existing token sequence under the policy.
std::vector<double> score_sequence(const TokenPolicy& policy, const Situation& s,
                                   std::span<const TokenId> tokens, double temperature);

/// Exposes a TokenPolicy as a text generator (prompt = situation text).
class TokenPolicyGenerator : public TextGenerator {
 public:
  explicit TokenPolicyGenerator(std::shared_ptr<const TokenPolicy> policy);

  Generation generate(const GenerationRequest& request) const override;
  std::string id() const override { return "token-policy"; }

 private:
  std::shared_ptr<const TokenPolicy> policy_;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                         double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace clarify::backends
