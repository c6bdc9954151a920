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

#include "backends/interfaces.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace clarify::backends {

void GenerationRequest::validate() const {
  if (max_tokens < 1) fail(ErrorCode::kInvalidArgument, "max_tokens must be >= 1");
  if (!(top_p > 0.0 && top_p <= 1.0)) fail(ErrorCode::kInvalidArgument, "top_p must be in (0,1]");
  if (!(temperature > 0.0)) fail(ErrorCode::kInvalidArgument, "temperature must be > 0");
}

const char* to_string(NliLabel label) {
  switch (label) {
    case NliLabel::kEntailment: return "entailment";
    case NliLabel::kContradiction: return "contradiction";
    case NliLabel::kNeutral: return "neutral";
  }
  return "neutral";
}

NliLabel nli_label_from_string(std::string_view name) {
  const auto n = to_lower(name);
  if (n == "entailment") return NliLabel::kEntailment;
  if (n == "contradiction") return NliLabel::kContradiction;
  if (n == "neutral") return NliLabel::kNeutral;
  fail(ErrorCode::kInvalidArgument, "unknown NLI label: " + std::string(name));
}

std::string answer_prompt(const Situation& s, const Question& q, UpdateType u) {
  return s.text() + ", TYPE: " + display_name(u) + ", Q.: " + q.text;
}

std::string fusion_prompt(const Situation& s, const Question& q, std::string_view answer) {
  std::string out = s.text();
  if (!q.text.empty()) out += " Q.: " + q.text;
  out += " A.: ";
  out += answer;
  return out;
}

std::string wh_prompt(const Situation& s, std::string_view wh_word) {
  return s.text() + ". Q.: " + std::string(wh_word);
}

Question generate_question(const TextGenerator& policy, const Situation& s,
                           GenerationRequest request) {
  request.prompt = s.text();
  request.validate();
  auto gen = policy.generate(request);
  Question q(trim(gen.text));
  q.truncated = gen.truncated;
  return q;
}

Answer generate_answer(const TextGenerator& answerer, const Situation& s, const Question& q,
                       UpdateType u, GenerationRequest request) {
  request.prompt = answer_prompt(s, q, u);
  request.validate();
  auto gen = answerer.generate(request);
  auto text = trim(gen.text);
  if (text.empty()) fail(ErrorCode::kBackendUnavailable, answerer.id() + " returned an empty answer");
  return Answer(std::move(text), u);
}

JudgmentDistribution judge(const JudgmentOracle& oracle, std::string_view text) {
  if (trim(text).empty()) fail(ErrorCode::kInvalidArgument, "cannot judge empty text");
  const auto raw = oracle.scores(text);
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0)
      fail(ErrorCode::kBackendUnavailable, oracle.id() + " returned invalid judgment scores");
  }
  if (raw[0] + raw[1] + raw[2] <= 0.0)
    fail(ErrorCode::kBackendUnavailable, oracle.id() + " returned all-zero judgment scores");
  return JudgmentDistribution::from_scores(raw[0], raw[1], raw[2]);
}

NliLabel nli(const NliClassifier& classifier, std::string_view premise,
             std::string_view hypothesis) {
  if (trim(premise).empty() || trim(hypothesis).empty())
    fail(ErrorCode::kInvalidArgument, "NLI premise and hypothesis must be nonempty");
  return classifier.classify(premise, hypothesis);
}

bool qa_answerable(const QaModel& qa, std::string_view context, const Question& question) {
  return qa.answerable(context, question);
}

double similarity(const SimilarityScorer& scorer, std::string_view candidate,
                  std::string_view reference) {
  return std::clamp(scorer.score(candidate, reference), 0.0, 1.0);
}

}  // namespace clarify::backends
