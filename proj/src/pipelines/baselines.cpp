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

#include "pipelines/baselines.hpp"

#include <set>

#include "backends/scripted.hpp"
#include "core/error.hpp"

namespace clarify::pipelines {

std::vector<std::string> default_wh_starts() {
  return {"what", "how", "who", "do", "are", "did", "is", "where", "have", "was", "when", "would"};
}

CandidateSet generate_candidates(const backends::TextGenerator& policy_wh, const Situation& s,
                                 std::span<const std::string> starts,
                                 const backends::GenerationRequest& decoding) {
  if (starts.empty()) fail(ErrorCode::kInvalidArgument, "no question starts given");
  CandidateSet set(s);
  std::set<std::string> used;
  for (const auto& raw : starts) {
    const auto wh = to_lower(trim(raw));
    if (wh.empty() || !used.insert(wh).second) continue;
    backends::GenerationRequest req = decoding;
    req.prompt = backends::wh_prompt(s, wh);
    Question q(trim(policy_wh.generate(req).text));
    if (q.wh_start.value_or("") != wh) {
      set.warnings.push_back("dropped \"" + q.text + "\": does not start with \"" + wh + "\"");
      continue;
    }
    set.candidates.push_back({wh, std::move(q), std::nullopt});
  }
  return set;
}

Question rank_by_score(CandidateSet& c, const CandidateScorer& scorer) {
  if (c.candidates.empty()) fail(ErrorCode::kInvalidArgument, "candidate set is empty");
  std::size_t best = 0;
  for (std::size_t i = 0; i < c.candidates.size(); ++i) {
    auto& cand = c.candidates[i];
    cand.score = scorer(c.situation, cand.question);
    if (*cand.score > *c.candidates[best].score) best = i;
  }
  return c.candidates[best].question;
}

Question discriminator_select(CandidateSet& c, const backends::RelevanceScorer& scorer) {
  return rank_by_score(c, [&](const Situation& s, const Question& q) {
    return scorer.relevant_probability(s, q);
  });
}

std::vector<DiscriminatorExample> build_discriminator_data(
    std::span<const data::GoldRecord> corpus) {
  std::set<std::string> distinct;
  for (const auto& r : corpus) distinct.insert(r.situation.text());
  if (distinct.size() < 2)
    fail(ErrorCode::kInvalidArgument, "discriminator data needs at least two situations");

  std::vector<DiscriminatorExample> out;
  for (const auto& rec : corpus) {
    std::set<std::string> gold;
    for (const auto& q : rec.questions) gold.insert(q.text);
    for (const auto& positive : gold) {
      const std::string* best = nullptr;
      double best_score = -1.0;
      for (const auto& other : corpus) {
        if (other.situation.text() == rec.situation.text()) continue;
        for (const auto& q : other.questions) {
          if (gold.count(q.text)) continue;
          const double f1 = backends::token_f1(positive, q.text);
          if (f1 > best_score) {
            best_score = f1;
            best = &q.text;
          }
        }
      }
      if (!best) continue;  // keep the 1:1 balance
      out.push_back({rec.situation.text(), positive, true});
      out.push_back({rec.situation.text(), *best, false});
    }
  }
  return out;
}

Question divergence_rank(CandidateSet& c, const defeasibility::AnswerPipeline& engine,
                         bool use_nli_filter) {
  auto pipeline = engine;
  pipeline.filter = use_nli_filter;
  return rank_by_score(c, [&](const Situation& s, const Question& q) {
    return defeasibility::raw_reward(defeasibility::simulate_pair(s, q, pipeline));
  });
}

Question why_question(const backends::TextGenerator& policy_wh, const Situation& s,
                      const backends::GenerationRequest& decoding) {
  const std::string why[] = {"why"};
  auto set = generate_candidates(policy_wh, s, why, decoding);
  if (set.candidates.empty())
    fail(ErrorCode::kBackendUnavailable,
         "why-baseline produced no why-question: " + set.warnings.front());
  return set.candidates.front().question;
}

Method method_from_string(std::string_view name) {
  if (name == "finetuned") return Method::kFinetuned;
  if (name == "discriminator") return Method::kDiscriminator;
  if (name == "pipeline") return Method::kPipeline;
  if (name == "pipeline-nli") return Method::kPipelineNli;
  if (name == "why") return Method::kWhy;
  fail(ErrorCode::kInvalidArgument, "unknown ranking method: " + std::string(name));
}

const char* to_string(Method m) {
  switch (m) {
    case Method::kFinetuned: return "finetuned";
    case Method::kDiscriminator: return "discriminator";
    case Method::kPipeline: return "pipeline";
    case Method::kPipelineNli: return "pipeline-nli";
    case Method::kWhy: return "why";
  }
  return "finetuned";
}

Question rank(Method method, const Situation& s, const backends::BackendSet& b,
              const RankOptions& options) {
  switch (method) {
    case Method::kFinetuned:
      return backends::generate_question(*b.policy, s, b.decoding);
    case Method::kWhy:
      return why_question(*b.wh_policy, s, b.decoding);
    case Method::kDiscriminator: {
      auto set = generate_candidates(*b.wh_policy, s, options.starts, b.decoding);
      return discriminator_select(set, *b.relevance);
    }
    case Method::kPipeline:
    case Method::kPipelineNli: {
      auto set = generate_candidates(*b.wh_policy, s, options.starts, b.decoding);
      defeasibility::AnswerPipeline engine{b.answerer.get(), b.nli.get(), b.fusion.get(),
                                           b.oracle.get(), options.answer_budget, true,
                                           b.decoding, options.cache};
      return divergence_rank(set, engine, method == Method::kPipelineNli);
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown ranking method");
}

}  // namespace clarify::pipelines
