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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "core/types.hpp"

namespace clarify::backends {

inline constexpr double kDefaultTopP = 0.6;
inline constexpr double kDefaultTemperature = 0.7;
inline constexpr std::size_t kDefaultMaxTokens = 32;

struct GenerationRequest {
  std::string prompt;
  std::size_t max_tokens = kDefaultMaxTokens;
  double top_p = kDefaultTopP;
  double temperature = kDefaultTemperature;
  std::optional<std::uint64_t> seed;

  void validate() const;
};

struct Generation {
  std::string text;
  bool truncated = false;
};

// Any prompt-to-text model: question policy, answer simulator, fusion model.
class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual Generation generate(const GenerationRequest& request) const = 0;
  virtual std::string id() const = 0;
};

// Produces raw, non-negative scores for (bad, ok, good); judge() normalizes.
class JudgmentOracle {
 public:
  virtual ~JudgmentOracle() = default;
  virtual std::array<double, 3> scores(std::string_view text) const = 0;
  virtual std::string id() const = 0;
};

enum class NliLabel { kEntailment, kContradiction, kNeutral };

const char* to_string(NliLabel label);
NliLabel nli_label_from_string(std::string_view name);

class NliClassifier {
 public:
  virtual ~NliClassifier() = default;
  virtual NliLabel classify(std::string_view premise, std::string_view hypothesis) const = 0;
  virtual std::string id() const = 0;
};

class QaModel {
 public:
  virtual ~QaModel() = default;
  // True when an answer span for the question exists in the context.
  virtual bool answerable(std::string_view context, const Question& question) const = 0;
  virtual std::string id() const = 0;
};

class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual double score(std::string_view candidate, std::string_view reference) const = 0;
  virtual std::string id() const = 0;
};

// Discriminator: probability that a question is relevant to a situation.
class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;
  virtual double relevant_probability(const Situation& situation,
                                      const Question& question) const = 0;
  virtual std::string id() const = 0;
};

// Backend input templates.
std::string answer_prompt(const Situation& s, const Question& q, UpdateType u);
std::string fusion_prompt(const Situation& s, const Question& q, std::string_view answer);
std::string wh_prompt(const Situation& s, std::string_view wh_word);

Question generate_question(const TextGenerator& policy, const Situation& s,
                           GenerationRequest request);
Answer generate_answer(const TextGenerator& answerer, const Situation& s, const Question& q,
                       UpdateType u, GenerationRequest request);
JudgmentDistribution judge(const JudgmentOracle& oracle, std::string_view text);
NliLabel nli(const NliClassifier& classifier, std::string_view premise,
             std::string_view hypothesis);
bool qa_answerable(const QaModel& qa, std::string_view context, const Question& question);
double similarity(const SimilarityScorer& scorer, std::string_view candidate,
                  std::string_view reference);

}  // namespace clarify::backends
