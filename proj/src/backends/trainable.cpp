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

#include "backends/trainable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace clarify::backends {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

StateFeaturizer::StateFeaturizer(std::size_t vocab_size, std::size_t max_positions,
                                 std::size_t situation_buckets)
    : vocab_size_(vocab_size), max_positions_(max_positions), situation_buckets_(situation_buckets) {
  if (vocab_size_ == 0 || max_positions_ == 0)
    fail(ErrorCode::kInvalidArgument, "featurizer needs a vocabulary and at least one position");
}

std::size_t StateFeaturizer::num_features() const {
  return 1 + (vocab_size_ + 1) + max_positions_ + situation_buckets_;
}

std::vector<std::size_t> StateFeaturizer::active(const Situation& s,
                                                 std::span<const TokenId> prefix) const {
  std::vector<std::size_t> f;
  f.reserve(4);
  f.push_back(0);
  const std::size_t prev = prefix.empty() ? vocab_size_ : prefix.back();
  f.push_back(1 + prev);
  f.push_back(1 + (vocab_size_ + 1) + std::min(prefix.size(), max_positions_ - 1));
  if (situation_buckets_ > 0) {
    f.push_back(1 + (vocab_size_ + 1) + max_positions_ + fnv1a64(s.text()) % situation_buckets_);
  }
  return f;
}

LinearSoftmaxPolicy::LinearSoftmaxPolicy(LinearPolicyOptions options)
    : options_(std::move(options)),
      features_(options_.vocab.size(), options_.max_positions, options_.situation_buckets) {
  if (options_.eos) {
    eos_ = token_id(*options_.eos);
    if (!eos_) fail(ErrorCode::kInvalidArgument, "eos token is not in the vocabulary");
  }
  weights_.assign(features_.num_features() * vocab_size(), 0.0);
  if (options_.init_scale > 0.0) {
    Rng rng(options_.init_seed);
    for (double& w : weights_) w = options_.init_scale * (2.0 * uniform01(rng) - 1.0);
  }
}

std::optional<TokenId> LinearSoftmaxPolicy::token_id(std::string_view word) const {
  const auto it = std::find(options_.vocab.begin(), options_.vocab.end(), word);
  if (it == options_.vocab.end()) return std::nullopt;
  return static_cast<TokenId>(it - options_.vocab.begin());
}

void LinearSoftmaxPolicy::shift_bias(std::string_view word, double delta) {
  const auto id = token_id(word);
  if (!id) fail(ErrorCode::kInvalidArgument, "unknown vocabulary word: " + std::string(word));
  weights_[*id] += delta;  // feature 0 is the bias
}

std::string LinearSoftmaxPolicy::detokenize(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (eos_ && t == *eos_) break;
    if (!out.empty()) out += ' ';
    out += options_.vocab.at(t);
  }
  return out;
}

std::vector<double> LinearSoftmaxPolicy::next_token_logprobs(const Situation& s,
                                                             std::span<const TokenId> prefix,
                                                             double temperature) const {
  const std::size_t v = vocab_size();
  std::vector<double> logits(v, 0.0);
  for (std::size_t f : features_.active(s, prefix)) {
    const double* row = weights_.data() + f * v;
    for (std::size_t k = 0; k < v; ++k) logits[k] += row[k];
  }
  for (double& l : logits) l /= temperature;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  const double log_z = mx + std::log(z);
  for (double& l : logits) l -= log_z;
  return logits;
}

void LinearSoftmaxPolicy::accumulate_logprob_gradient(const Situation& s,
                                                      std::span<const TokenId> prefix,
                                                      TokenId token, double temperature,
                                                      double scale,
                                                      std::span<double> grad) const {
  const std::size_t v = vocab_size();
  const auto logprobs = next_token_logprobs(s, prefix, temperature);
  for (std::size_t f : features_.active(s, prefix)) {
    double* row = grad.data() + f * v;
    for (std::size_t k = 0; k < v; ++k) {
      const double indicator = k == token ? 1.0 : 0.0;
      row[k] += scale * (indicator - std::exp(logprobs[k])) / temperature;
    }
  }
}

std::unique_ptr<TokenPolicy> LinearSoftmaxPolicy::clone() const {
  return std::make_unique<LinearSoftmaxPolicy>(*this);
}

LinearValueModel::LinearValueModel(std::size_t vocab_size, std::size_t max_positions,
                                   std::size_t situation_buckets)
    : features_(vocab_size, max_positions, situation_buckets),
      weights_(features_.num_features(), 0.0) {}

double LinearValueModel::value(const Situation& s, std::span<const TokenId> prefix) const {
  double v = 0.0;
  for (std::size_t f : features_.active(s, prefix)) v += weights_[f];
  return v;
}

void LinearValueModel::accumulate_gradient(const Situation& s, std::span<const TokenId> prefix,
                                           double scale, std::span<double> grad) const {
  for (std::size_t f : features_.active(s, prefix)) grad[f] += scale;
}

std::unique_ptr<ValueModel> LinearValueModel::clone() const {
  return std::make_unique<LinearValueModel>(*this);
}

TokenId sample_top_p(std::span<const double> logprobs, double top_p, Rng& rng) {
  std::vector<std::size_t> order(logprobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return logprobs[a] > logprobs[b]; });
  std::size_t keep = 0;
  double mass = 0.0;
  while (keep < order.size()) {
    mass += std::exp(logprobs[order[keep]]);
    ++keep;
    if (mass >= top_p) break;
  }
  const double u = uniform01(rng) * mass;
  double acc = 0.0;
  for (std::size_t i = 0; i < keep; ++i) {
    acc += std::exp(logprobs[order[i]]);
    if (u < acc) return static_cast<TokenId>(order[i]);
  }
  return static_cast<TokenId>(order[keep - 1]);
}

SampledSequence sample_sequence(const TokenPolicy& policy, const Situation& s,
                                std::size_t max_tokens, double top_p, double temperature,
                                Rng& rng) {
  SampledSequence out;
  const auto eos = policy.eos();
  while (out.tokens.size() < max_tokens) {
    const auto lp = policy.next_token_logprobs(s, out.tokens, temperature);
    const TokenId t = sample_top_p(lp, top_p, rng);
    out.tokens.push_back(t);
    out.logprobs.push_back(lp[t]);
    if (eos && t == *eos) return out;
  }
  out.truncated = eos.has_value();
  return out;
}

std::vector<double> score_sequence(const TokenPolicy& policy, const Situation& s,
                                   std::span<const TokenId> tokens, double temperature) {
  std::vector<double> out;
  out.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto lp = policy.next_token_logprobs(s, tokens.first(t), temperature);
    out.push_back(lp[tokens[t]]);
  }
  return out;
}

TokenPolicyGenerator::TokenPolicyGenerator(std::shared_ptr<const TokenPolicy> policy)
    : policy_(std::move(policy)) {}

Generation TokenPolicyGenerator::generate(const GenerationRequest& request) const {
  request.validate();
  Rng rng(request.seed.value_or(0));
  const Situation s(request.prompt);
  auto seq = sample_sequence(*policy_, s, request.max_tokens, request.top_p, request.temperature,
                             rng);
  return {policy_->detokenize(seq.tokens), seq.truncated};
}

AdamOptimizer::AdamOptimizer(double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  if (m_.empty()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

}  // namespace clarify::backends
