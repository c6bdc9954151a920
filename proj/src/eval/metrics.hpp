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
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "backends/interfaces.hpp"
#include "backends/registry.hpp"
#include "data/corpus.hpp"
#include "defeasibility/reward.hpp"
#include "ppo/ppo.hpp"

namespace clarify::eval {

// Tokenization shared by BLEU and ROUGE-L.
inline constexpr const char* kMetricTokenization = "lowercased-whitespace";
std::vector<std::string> metric_tokens(std::string_view text);

// Fraction of questions the QA model cannot answer from their situation.
double informativeness(std::span<const std::pair<Situation, Question>> questions,
                       const backends::QaModel& qa);

double max_reference_similarity(const Question& candidate, std::span<const Question> references,
                                const backends::SimilarityScorer& scorer);

struct DivergenceReport {
  double mean_jsd = 0.0;
  double pct_flips = 0.0;
  std::size_t flips = 0;
  std::size_t answers = 0;
};

// A flip is a present answer whose fused judgment argmax differs from the
// base situation's argmax; the denominator counts every present answer.
DivergenceReport divergence_report(std::span<const defeasibility::DefeasibleQA> records,
                                   std::span<const JudgmentDistribution> base_judgments);

struct BleuOptions {
  // Add-one smoothing of the n >= 2 precisions.
  bool smoothing = false;
};

/// Sentence BLEU-4: clipped n-gram precisions against all references,
/// uniform weights, brevity penalty from the closest reference length.
/// Orders the candidate is too short to have are left out of the mean.
double bleu4(std::string_view candidate, std::span<const std::string> references,
             BleuOptions options = {});

// LCS F-measure (beta = 1).
double rouge_l(std::string_view candidate, std::string_view reference);

struct EvalReport {
  std::size_t n = 0;
  double pct_unanswerable = 0.0;
  double mean_max_similarity = 0.0;
  double mean_jsd = 0.0;
  double pct_judgment_flips = 0.0;
  double bleu4 = 0.0;
  double rouge_l = 0.0;

  nlohmann::json to_json() const;
};

/// One line of an evaluation corpus: a generated question for a situation,
/// optional gold questions, and optionally a question-guided update with its
/// reference updates.
struct EvalItem {
  Situation situation;
  Question question;
  std::vector<Question> references;
  std::optional<std::string> update;
  std::vector<std::string> update_references;
};

std::vector<EvalItem> load_eval_items(const std::filesystem::path& path);

struct EvalOptions {
  std::size_t answer_budget = defeasibility::kDefaultAnswerBudget;
  BleuOptions bleu;
  defeasibility::RewardCache* cache = nullptr;
};

// Corpus-level report; similarity, BLEU and ROUGE-L average over the items
// that carry references.
EvalReport evaluate(std::span<const EvalItem> items, const backends::BackendSet& backends,
                    const EvalOptions& options = {});

// Seeded subsample of floor(fraction * n) records.
std::vector<data::GoldRecord> subsample(std::span<const data::GoldRecord> records,
                                        double fraction, std::uint64_t seed);

struct AblationCurve {
  double fraction = 0.0;
  std::size_t subset_size = 0;
  // metric name -> mean per window of `window` steps
  std::map<std::string, std::vector<double>> windows;
};

using AblationTrainFn =
    std::function<std::vector<ppo::StepLog>(const std::vector<data::GoldRecord>& subset)>;
using AblationEvalFn = std::function<std::map<std::string, double>(const ppo::StepLog& step)>;

std::vector<AblationCurve> ablation_harness(std::span<const data::GoldRecord> train_set,
                                            std::span<const double> fractions,
                                            std::uint64_t seed, const AblationTrainFn& train_fn,
                                            const AblationEvalFn& eval_fn,
                                            std::size_t window = 1000);

}  // namespace clarify::eval
