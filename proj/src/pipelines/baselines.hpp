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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "backends/interfaces.hpp"
#include "backends/registry.hpp"
#include "data/corpus.hpp"
#include "defeasibility/reward.hpp"

namespace clarify::pipelines {

// The question starts printed in the footnote of the original start list.
std::vector<std::string> default_wh_starts();

struct Candidate {
  std::string wh_start;
  Question question;
  std::optional<double> score;
};

struct CandidateSet {
  Situation situation;
  std::vector<Candidate> candidates;
  std::vector<std::string> warnings;

  explicit CandidateSet(Situation s) : situation(std::move(s)) {}
};

/// One wh-conditioned question per distinct start. Questions whose first
/// token is not their start word are dropped with a warning.
CandidateSet generate_candidates(const backends::TextGenerator& policy_wh, const Situation& s,
                                 std::span<const std::string> starts,
                                 const backends::GenerationRequest& decoding = {});

// Highest relevant-probability candidate; ties keep the earlier candidate.
// Scores are written back into the set.
Question discriminator_select(CandidateSet& c, const backends::RelevanceScorer& scorer);

struct DiscriminatorExample {
  std::string situation;
  std::string question;
  bool relevant = false;
};

/// Positives are each situation's gold questions. Each positive gets one
/// negative: the most token-F1-similar question from another situation that
/// is not also a gold question of this situation.
std::vector<DiscriminatorExample> build_discriminator_data(
    std::span<const data::GoldRecord> corpus);

using CandidateScorer = std::function<double(const Situation&, const Question&)>;

// Scores every candidate and returns the best; ties keep the earlier one.
Question rank_by_score(CandidateSet& c, const CandidateScorer& scorer);

// rank_by_score with the raw defeasibility reward as the score.
Question divergence_rank(CandidateSet& c, const defeasibility::AnswerPipeline& engine,
                         bool use_nli_filter);

Question why_question(const backends::TextGenerator& policy_wh, const Situation& s,
                      const backends::GenerationRequest& decoding = {});

enum class Method { kFinetuned, kDiscriminator, kPipeline, kPipelineNli, kWhy };

Method method_from_string(std::string_view name);
const char* to_string(Method m);

struct RankOptions {
  std::vector<std::string> starts = default_wh_starts();
  std::size_t answer_budget = defeasibility::kDefaultAnswerBudget;
  defeasibility::RewardCache* cache = nullptr;
};

// One question for a situation with the given baseline.
Question rank(Method method, const Situation& s, const backends::BackendSet& backends,
              const RankOptions& options = {});

}  // namespace clarify::pipelines
