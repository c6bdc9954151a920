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
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "backends/interfaces.hpp"
#include "core/types.hpp"

namespace clarify::defeasibility {

inline constexpr std::size_t kDefaultAnswerBudget = 4;

/// A question with its simulated weakener/strengthener answers, their fused
/// updated situations and the oracle's judgments. A slot is filled only when
/// an answer for that update type survived filtering.
struct DefeasibleQA {
  Situation situation;
  Question question;
  std::optional<Answer> weakener;
  std::optional<Answer> strengthener;
  std::optional<UpdatedSituation> fused_weakener;
  std::optional<UpdatedSituation> fused_strengthener;
  std::optional<JudgmentDistribution> judgment_weakener;
  std::optional<JudgmentDistribution> judgment_strengthener;

  DefeasibleQA(Situation s, Question q) : situation(std::move(s)), question(std::move(q)) {}
};

struct RewardStats {
  double mu0 = 0.0;
  double sigma0 = 1.0;
  std::size_t sample_size = 1;
};

/// Thread-safe store of kept answers, optionally mirrored to a JSONL file of
/// {situation, question, update_type, answer, fused, judgment:[b,o,g]}.
class RewardCache {
 public:
  struct Entry {
    std::string answer;
    std::string fused;
    JudgmentDistribution judgment;
  };

  RewardCache() = default;
  // Loads existing records and appends new ones to the same file.
  explicit RewardCache(std::filesystem::path path);

  std::optional<Entry> lookup(const std::string& situation, const std::string& question,
                              UpdateType u) const;
  void insert(const std::string& situation, const std::string& question, UpdateType u,
              const Entry& entry);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::string, std::string, UpdateType>;
  mutable std::mutex mu_;
  std::map<Key, Entry> entries_;
  std::optional<std::filesystem::path> path_;
};

/// Backends and knobs of the answer-simulation half of the reward.
struct AnswerPipeline {
  const backends::TextGenerator* answerer = nullptr;
  const backends::NliClassifier* nli = nullptr;
  const backends::TextGenerator* fusion = nullptr;
  const backends::JudgmentOracle* oracle = nullptr;
  std::size_t k = kDefaultAnswerBudget;
  bool filter = true;
  backends::GenerationRequest decoding;
  // Consulted only when `filter` is on.
  RewardCache* cache = nullptr;
};

// Keep iff the answer is neutral w.r.t. the situation.
bool filter_answer(const Situation& s, const Answer& a, const backends::NliClassifier& classifier);

std::string fallback_fusion(const Situation& s, const Answer& a);

// Never throws on backend failure: falls back to fallback_fusion().
UpdatedSituation fuse(const Situation& s, const Question& q, const Answer& a,
                      const backends::TextGenerator* fusion_backend,
                      const backends::GenerationRequest& decoding = {});

DefeasibleQA simulate_pair(const Situation& s, const Question& q, const AnswerPipeline& pipeline);

// JSD between the two judgments; 0 when either side is missing.
double raw_reward(const DefeasibleQA& d);

// Sample mean and (n-1) standard deviation; sigma0 is clamped to 1 when the
// sample has one element or zero variance.
RewardStats stats_from_rewards(std::span<const double> rewards);

RewardStats estimate_stats(std::span<const Situation> situations,
                           const backends::TextGenerator& policy, const AnswerPipeline& pipeline,
                           std::uint64_t seed = 0);

double normalize_reward(double r, const RewardStats& stats);

struct PolarityLabels {
  Answer first;
  Answer second;
  bool ambiguous = false;
};

/// Labels two prompted answers as strengthener/weakener by how far each moves
/// the judgment's (p_good - p_bad) relative to the bare situation. When the
/// base judgment is good or ok, the answer moving further toward good is the
/// strengthener; when it is bad, the one moving toward bad is. Equal movement
/// labels by input order (first = strengthener) and sets `ambiguous`.
PolarityLabels label_answer_polarity(const Situation& s, const std::string& first,
                                     const std::string& second,
                                     const backends::JudgmentOracle& oracle,
                                     const backends::TextGenerator* fusion_backend,
                                     const backends::GenerationRequest& decoding = {});

}  // namespace clarify::defeasibility
