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

#include "eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/divergence.hpp"
#include "core/error.hpp"

namespace clarify::eval {

std::vector<std::string> metric_tokens(std::string_view text) {
  return split_whitespace(to_lower(text));
}

double informativeness(std::span<const std::pair<Situation, Question>> questions,
                       const backends::QaModel& qa) {
  if (questions.empty()) fail(ErrorCode::kInvalidArgument, "informativeness needs questions");
  std::size_t unanswerable = 0;
  for (const auto& [s, q] : questions) {
    if (!backends::qa_answerable(qa, s.text(), q)) ++unanswerable;
  }
  return static_cast<double>(unanswerable) / static_cast<double>(questions.size());
}

double max_reference_similarity(const Question& candidate, std::span<const Question> references,
                                const backends::SimilarityScorer& scorer) {
  if (references.empty()) fail(ErrorCode::kInvalidArgument, "no reference questions");
  double best = 0.0;
  for (const auto& ref : references)
    best = std::max(best, backends::similarity(scorer, candidate.text, ref.text));
  return best;
}

DivergenceReport divergence_report(std::span<const defeasibility::DefeasibleQA> records,
                                   std::span<const JudgmentDistribution> base_judgments) {
  if (records.size() != base_judgments.size())
    fail(ErrorCode::kInvalidArgument, "records and base judgments differ in length");
  DivergenceReport r;
  if (records.empty()) return r;
  for (std::size_t i = 0; i < records.size(); ++i) {
    r.mean_jsd += defeasibility::raw_reward(records[i]);
    const auto base = argmax_judgment(base_judgments[i]);
    for (const auto* j : {&records[i].judgment_weakener, &records[i].judgment_strengthener}) {
      if (!j->has_value()) continue;
      ++r.answers;
      if (argmax_judgment(**j) != base) ++r.flips;
    }
  }
  r.mean_jsd /= static_cast<double>(records.size());
  if (r.answers > 0) r.pct_flips = static_cast<double>(r.flips) / static_cast<double>(r.answers);
  return r;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[std::vector<std::string>(tokens.begin() + static_cast<long>(i),
                                   tokens.begin() + static_cast<long>(i + n))];
  return out;
}

}  // namespace

double bleu4(std::string_view candidate, std::span<const std::string> references,
             BleuOptions options) {
  if (references.empty()) fail(ErrorCode::kInvalidArgument, "BLEU needs a reference");
  const auto cand = metric_tokens(candidate);
  if (cand.empty()) return 0.0;
  std::vector<std::vector<std::string>> refs;
  for (const auto& r : references) refs.push_back(metric_tokens(r));

  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand_counts = ngrams(cand, n);
    if (cand_counts.empty()) break;
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [g, c] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], c);
    }
    int matched = 0, total = 0;
    for (const auto& [g, c] : cand_counts) {
      total += c;
      const auto it = max_ref.find(g);
      if (it != max_ref.end()) matched += std::min(c, it->second);
    }
    double num = matched, den = total;
    if (options.smoothing && n >= 2) {
      num += 1.0;
      den += 1.0;
    }
    if (num <= 0.0) return 0.0;
    log_sum += std::log(num / den);
    ++orders;
  }

  // Closest reference length, ties to the shorter one.
  const auto c = static_cast<double>(cand.size());
  double r = static_cast<double>(refs.front().size());
  for (const auto& ref : refs) {
    const auto len = static_cast<double>(ref.size());
    if (std::fabs(len - c) < std::fabs(r - c) || (std::fabs(len - c) == std::fabs(r - c) && len < r))
      r = len;
  }
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / orders);
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  const auto c = metric_tokens(candidate);
  const auto r = metric_tokens(reference);
  if (c.empty() || r.empty()) return 0.0;
  std::vector<std::vector<std::size_t>> dp(c.size() + 1, std::vector<std::size_t>(r.size() + 1, 0));
  for (std::size_t i = 1; i <= c.size(); ++i) {
    for (std::size_t j = 1; j <= r.size(); ++j) {
      dp[i][j] = c[i - 1] == r[j - 1] ? dp[i - 1][j - 1] + 1 : std::max(dp[i - 1][j], dp[i][j - 1]);
    }
  }
  const double lcs = static_cast<double>(dp[c.size()][r.size()]);
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(c.size());
  const double rec = lcs / static_cast<double>(r.size());
  return 2.0 * p * rec / (p + rec);
}

nlohmann::json EvalReport::to_json() const {
  return {{"n", n},
          {"pct_unanswerable", pct_unanswerable},
          {"mean_max_similarity", mean_max_similarity},
          {"mean_jsd", mean_jsd},
          {"pct_judgment_flips", pct_judgment_flips},
          {"bleu4", bleu4},
          {"rouge_l", rouge_l},
          {"tokenization", kMetricTokenization}};
}

std::vector<EvalItem> load_eval_items(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<EvalItem> items;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      EvalItem item{Situation(rec.at("situation").get<std::string>()),
                    Question(rec.at("question").get<std::string>()), {}, std::nullopt, {}};
      for (const auto& q : rec.value("references", nlohmann::json::array()))
        item.references.emplace_back(q.get<std::string>());
      if (rec.contains("update")) item.update = rec["update"].get<std::string>();
      for (const auto& u : rec.value("update_references", nlohmann::json::array()))
        item.update_references.push_back(u.get<std::string>());
      items.push_back(std::move(item));
    } catch (const std::exception& e) {
      fail(ErrorCode::kSchema, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return items;
}

EvalReport evaluate(std::span<const EvalItem> items, const backends::BackendSet& b,
                    const EvalOptions& options) {
  EvalReport report;
  report.n = items.size();
  if (items.empty()) return report;

  std::vector<std::pair<Situation, Question>> pairs;
  std::vector<defeasibility::DefeasibleQA> records;
  std::vector<JudgmentDistribution> bases;
  defeasibility::AnswerPipeline pipeline{b.answerer.get(), b.nli.get(), b.fusion.get(),
                                         b.oracle.get(), options.answer_budget, true,
                                         b.decoding, options.cache};
  double sim_sum = 0.0, bleu_sum = 0.0, rouge_sum = 0.0;
  std::size_t sim_n = 0, update_n = 0;
  for (const auto& item : items) {
    pairs.emplace_back(item.situation, item.question);
    records.push_back(defeasibility::simulate_pair(item.situation, item.question, pipeline));
    bases.push_back(backends::judge(*b.oracle, item.situation.text()));
    if (!item.references.empty()) {
      sim_sum += max_reference_similarity(item.question, item.references, *b.similarity);
      ++sim_n;
    }
    if (item.update && !item.update_references.empty()) {
      bleu_sum += bleu4(*item.update, item.update_references, options.bleu);
      double best_rouge = 0.0;
      for (const auto& ref : item.update_references)
        best_rouge = std::max(best_rouge, rouge_l(*item.update, ref));
      rouge_sum += best_rouge;
      ++update_n;
    }
  }
  report.pct_unanswerable = informativeness(pairs, *b.qa);
  const auto div = divergence_report(records, bases);
  report.mean_jsd = div.mean_jsd;
  report.pct_judgment_flips = div.pct_flips;
  if (sim_n) report.mean_max_similarity = sim_sum / static_cast<double>(sim_n);
  if (update_n) {
    report.bleu4 = bleu_sum / static_cast<double>(update_n);
    report.rouge_l = rouge_sum / static_cast<double>(update_n);
  }
  return report;
}

std::vector<data::GoldRecord> subsample(std::span<const data::GoldRecord> records,
                                        double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    fail(ErrorCode::kInvalidArgument, "ablation fraction must be in (0,1]");
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  backends::Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(backends::uniform01(rng) * static_cast<double>(i));
    std::swap(idx[i - 1], idx[j]);
  }
  const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(records.size())));
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<data::GoldRecord> out;
  out.reserve(keep);
  for (auto i : idx) out.push_back(records[i]);
  return out;
}

std::vector<AblationCurve> ablation_harness(std::span<const data::GoldRecord> train_set,
                                            std::span<const double> fractions,
                                            std::uint64_t seed, const AblationTrainFn& train_fn,
                                            const AblationEvalFn& eval_fn, std::size_t window) {
  if (window == 0) fail(ErrorCode::kInvalidArgument, "ablation window must be positive");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) fail(ErrorCode::kInvalidArgument, "ablation fraction must be in (0,1]");
  }
  std::vector<AblationCurve> curves;
  for (double f : fractions) {
    const auto subset = subsample(train_set, f, seed);
    const auto log = train_fn(subset);
    AblationCurve curve{f, subset.size(), {}};
    std::map<std::string, double> sums;
    std::size_t in_window = 0;
    auto flush = [&] {
      for (auto& [name, total] : sums) curve.windows[name].push_back(total / static_cast<double>(in_window));
      sums.clear();
      in_window = 0;
    };
    for (const auto& step : log) {
      for (const auto& [name, v] : eval_fn(step)) sums[name] += v;
      if (++in_window == window) flush();
    }
    if (in_window > 0) flush();
    curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace clarify::eval
