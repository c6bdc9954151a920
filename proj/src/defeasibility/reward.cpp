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

#include "defeasibility/reward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "core/divergence.hpp"
#include "core/error.hpp"

namespace clarify::defeasibility {

using backends::GenerationRequest;

RewardCache::RewardCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  std::string line;
  while (in && std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto rec = nlohmann::json::parse(line);
    const auto j = rec.at("judgment").get<std::array<double, 3>>();
    entries_.insert_or_assign(
        Key{rec.at("situation").get<std::string>(), rec.at("question").get<std::string>(),
            update_type_from_string(rec.at("update_type").get<std::string>())},
        Entry{rec.at("answer").get<std::string>(), rec.at("fused").get<std::string>(),
              JudgmentDistribution(j[0], j[1], j[2])});
  }
}

std::optional<RewardCache::Entry> RewardCache::lookup(const std::string& situation,
                                                      const std::string& question,
                                                      UpdateType u) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(Key{situation, question, u});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RewardCache::insert(const std::string& situation, const std::string& question, UpdateType u,
                         const Entry& entry) {
  std::lock_guard lock(mu_);
  const bool fresh = entries_.insert_or_assign(Key{situation, question, u}, entry).second;
  if (!path_ || !fresh) return;
  std::ofstream out(*path_, std::ios::app);
  if (!out) fail(ErrorCode::kIo, "cannot append to reward cache " + path_->string());
  const auto& p = entry.judgment.probabilities();
  out << nlohmann::json{{"situation", situation},
                        {"question", question},
                        {"update_type", to_string(u)},
                        {"answer", entry.answer},
                        {"fused", entry.fused},
                        {"judgment", {p[0], p[1], p[2]}}}
             .dump()
      << '\n';
}

std::size_t RewardCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

bool filter_answer(const Situation& s, const Answer& a, const backends::NliClassifier& classifier) {
  return backends::nli(classifier, s.text(), a.text) == backends::NliLabel::kNeutral;
}

std::string fallback_fusion(const Situation& s, const Answer& a) {
  return s.text() + ", given that " + a.text;
}

UpdatedSituation fuse(const Situation& s, const Question& q, const Answer& a,
                      const backends::TextGenerator* fusion_backend,
                      const GenerationRequest& decoding) {
  std::string text;
  if (fusion_backend) {
    GenerationRequest req = decoding;
    req.prompt = backends::fusion_prompt(s, q, a.text);
    try {
      text = trim(fusion_backend->generate(req).text);
    } catch (const std::exception&) {
      text.clear();
    }
  }
  if (text.empty()) text = fallback_fusion(s, a);
  return UpdatedSituation{std::move(text), s, q, a};
}

namespace {

struct Slot {
  std::optional<Answer> answer;
  std::optional<UpdatedSituation> fused;
  std::optional<JudgmentDistribution> judgment;
};

Slot simulate_one(const Situation& s, const Question& q, UpdateType u,
                  const AnswerPipeline& pipeline) {
  Slot slot;
  // Cached entries are filtered answers; unfiltered runs bypass the cache.
  RewardCache* cache = pipeline.filter ? pipeline.cache : nullptr;
  if (cache) {
    if (auto hit = cache->lookup(s.text(), q.text, u)) {
      Answer a(hit->answer, u);
      slot.fused = UpdatedSituation{hit->fused, s, q, a};
      slot.answer = std::move(a);
      slot.judgment = hit->judgment;
      return slot;
    }
  }
  for (std::size_t i = 0; i < pipeline.k; ++i) {
    GenerationRequest req = pipeline.decoding;
    req.seed = pipeline.decoding.seed.value_or(0) + i;
    auto a = backends::generate_answer(*pipeline.answerer, s, q, u, req);
    if (pipeline.filter && !filter_answer(s, a, *pipeline.nli)) continue;
    slot.answer = std::move(a);
    break;
  }
  if (!slot.answer) return slot;
  slot.fused = fuse(s, q, *slot.answer, pipeline.fusion, pipeline.decoding);
  slot.judgment = backends::judge(*pipeline.oracle, slot.fused->text);
  if (cache)
    cache->insert(s.text(), q.text, u,
                           {slot.answer->text, slot.fused->text, *slot.judgment});
  return slot;
}

}  // namespace

DefeasibleQA simulate_pair(const Situation& s, const Question& q, const AnswerPipeline& pipeline) {
  if (!pipeline.answerer || !pipeline.oracle || (pipeline.filter && !pipeline.nli))
    fail(ErrorCode::kBackendUnavailable, "answer pipeline is missing a backend");
  if (pipeline.k == 0) fail(ErrorCode::kInvalidArgument, "answer budget k must be positive");
  DefeasibleQA d(s, q);
  auto w = simulate_one(s, q, UpdateType::kWeakener, pipeline);
  auto st = simulate_one(s, q, UpdateType::kStrengthener, pipeline);
  d.weakener = std::move(w.answer);
  d.fused_weakener = std::move(w.fused);
  d.judgment_weakener = w.judgment;
  d.strengthener = std::move(st.answer);
  d.fused_strengthener = std::move(st.fused);
  d.judgment_strengthener = st.judgment;
  return d;
}

double raw_reward(const DefeasibleQA& d) {
  if (!d.judgment_weakener || !d.judgment_strengthener) return 0.0;
  return jsd(*d.judgment_weakener, *d.judgment_strengthener);
}

RewardStats stats_from_rewards(std::span<const double> rewards) {
  if (rewards.empty()) fail(ErrorCode::kInvalidArgument, "reward sample is empty");
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  RewardStats stats{mean, 1.0, rewards.size()};
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (rewards.size() < 2 || *lo == *hi) return stats;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  if (sd > 0.0 && std::isfinite(sd)) stats.sigma0 = sd;
  return stats;
}

RewardStats estimate_stats(std::span<const Situation> situations,
                           const backends::TextGenerator& policy, const AnswerPipeline& pipeline,
                           std::uint64_t seed) {
  if (situations.empty()) fail(ErrorCode::kInvalidArgument, "estimate_stats needs situations");
  std::vector<double> rewards;
  rewards.reserve(situations.size());
  for (std::size_t i = 0; i < situations.size(); ++i) {
    GenerationRequest req = pipeline.decoding;
    req.seed = seed + i;
    const auto q = backends::generate_question(policy, situations[i], req);
    rewards.push_back(raw_reward(simulate_pair(situations[i], q, pipeline)));
  }
  return stats_from_rewards(rewards);
}

double normalize_reward(double r, const RewardStats& stats) {
  if (!(stats.sigma0 > 0.0)) fail(ErrorCode::kInvalidArgument, "sigma0 must be positive");
  return (r - stats.mu0) / stats.sigma0;
}

PolarityLabels label_answer_polarity(const Situation& s, const std::string& first,
                                     const std::string& second,
                                     const backends::JudgmentOracle& oracle,
                                     const backends::TextGenerator* fusion_backend,
                                     const GenerationRequest& decoding) {
  const auto base = backends::judge(oracle, s.text());
  const auto lean = [](const JudgmentDistribution& j) { return j.p_good() - j.p_bad(); };
  const Question none;
  const auto movement = [&](const std::string& text) {
    const Answer probe(text, UpdateType::kStrengthener);
    return lean(backends::judge(oracle, fuse(s, none, probe, fusion_backend, decoding).text)) -
           lean(base);
  };
  const double d_first = movement(first);
  const double d_second = movement(second);
  if (d_first == d_second) {
    return {Answer(first, UpdateType::kStrengthener), Answer(second, UpdateType::kWeakener), true};
  }
  const bool base_bad = argmax_judgment(base) == JudgmentClass::kBad;
  // Toward good supports a good/ok default; toward bad supports a bad one.
  const bool first_strengthens = base_bad ? d_first < d_second : d_first > d_second;
  const UpdateType u_first = first_strengthens ? UpdateType::kStrengthener : UpdateType::kWeakener;
  return {Answer(first, u_first), Answer(second, opposite(u_first)), false};
}

}  // namespace clarify::defeasibility
