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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include "backends/registry.hpp"
#include "backends/scripted.hpp"
#include "core/divergence.hpp"
#include "core/error.hpp"
#include "defeasibility/reward.hpp"

using namespace clarify;
using namespace clarify::backends;
using namespace clarify::defeasibility;
using nlohmann::json;

namespace {

// Answerer that cycles through fixed answers by seed, per update type.
class SequenceAnswerer : public TextGenerator {
 public:
  SequenceAnswerer(std::vector<std::string> weak, std::vector<std::string> strong)
      : weak_(std::move(weak)), strong_(std::move(strong)) {}
  Generation generate(const GenerationRequest& r) const override {
    const auto& pool = contains_ci(r.prompt, "TYPE: Weakener") ? weak_ : strong_;
    return {pool[r.seed.value_or(0) % pool.size()], false};
  }
  std::string id() const override { return "sequence"; }

 private:
  std::vector<std::string> weak_, strong_;
};

struct Fixture {
  std::shared_ptr<TextGenerator> answerer;
  ScriptedNli nli;
  ScriptedGenerator fusion{RuleTable{}};
  ScriptedOracle oracle;

  Fixture(std::shared_ptr<TextGenerator> a, RuleTable nli_rules, RuleTable oracle_rules)
      : answerer(std::move(a)), nli(std::move(nli_rules)), oracle(std::move(oracle_rules)) {}

  AnswerPipeline pipeline(std::size_t k, bool filter = true) const {
    return {answerer.get(), &nli, &fusion, &oracle, k, filter, {}, nullptr};
  }
};

RuleTable polar_oracle() {
  RuleTable o;
  o.add("weak", json::array({1, 0, 0}));
  o.add("strong", json::array({0, 0, 1}));
  return o;
}

}  // namespace

TEST_CASE("filter keeps only neutral answers") {
  RuleTable rules;
  rules.add("entailed", "entailment");
  rules.add("contradicted", "contradiction");
  const ScriptedNli nli(rules);
  const Situation s("lie to my friend");
  CHECK_FALSE(filter_answer(s, Answer("entailed fact", UpdateType::kWeakener), nli));
  CHECK_FALSE(filter_answer(s, Answer("contradicted fact", UpdateType::kWeakener), nli));
  CHECK(filter_answer(s, Answer("new fact", UpdateType::kWeakener), nli));
}

TEST_CASE("fusion uses the table and falls back to the template") {
  const auto set = build_backends(
      json::parse(R"({"backends":{"f":{"policy":{"type":"scripted"},"answerer":{"type":"scripted"},
        "fusion":{"type":"scripted","table":"fixtures/fusion.jsonl"},"oracle":{"type":"scripted"}}}})"),
      std::filesystem::path(CLARIFY_SOURCE_DIR) / "configs");
  const auto hit = fuse(Situation("refraining from doing something bad"),
                        Question("When do you do something bad?"),
                        Answer("when I'm angry", UpdateType::kWeakener), set.fusion.get());
  CHECK(hit.text == "refraining from doing something bad when you're angry");
  CHECK(hit.answer.text == "when I'm angry");

  const auto miss = fuse(Situation("tipping people decently"), Question("Why?"),
                         Answer("the service was awful", UpdateType::kWeakener), set.fusion.get());
  CHECK(miss.text == "tipping people decently, given that the service was awful");
  const auto none = fuse(Situation("tipping people decently"), Question("Why?"),
                         Answer("the service was awful", UpdateType::kWeakener), nullptr);
  CHECK(none.text == miss.text);
}

TEST_CASE("fuse never raises and keeps its inputs visible") {
  RuleTable t;
  t.add("blank", "   ");
  const ScriptedGenerator blank(t);
  std::mt19937_64 rng(4);
  const std::vector<std::string> words = {"blank", "tip", "lie", "x", "a b"};
  for (int i = 0; i < 200; ++i) {
    const Situation s(words[rng() % words.size()] + " situation");
    const Answer a(words[rng() % words.size()], UpdateType::kStrengthener);
    const auto out = fuse(s, Question("q?"), a, &blank);
    CHECK_FALSE(trim(out.text).empty());
    CHECK(out.text.find(s.text()) != std::string::npos);
  }
}

TEST_CASE("simulate_pair slot contracts") {
  RuleTable nli_rules;
  nli_rules.add("entailed", "entailment");
  nli_rules.add("contra", "contradiction");
  const Situation s("borrowing a car");
  const Question q("Why?");

  SUBCASE("both answers pass") {
    Fixture f(std::make_shared<SequenceAnswerer>(std::vector<std::string>{"weak"},
                                                 std::vector<std::string>{"strong"}),
              nli_rules, polar_oracle());
    const auto d = simulate_pair(s, q, f.pipeline(1));
    CHECK(d.judgment_weakener.has_value());
    CHECK(d.judgment_strengthener.has_value());
    CHECK(raw_reward(d) == doctest::Approx(1.0));
  }
  SUBCASE("weakener filtered as entailed") {
    Fixture f(std::make_shared<SequenceAnswerer>(std::vector<std::string>{"entailed weak"},
                                                 std::vector<std::string>{"strong"}),
              nli_rules, polar_oracle());
    const auto d = simulate_pair(s, q, f.pipeline(1));
    CHECK_FALSE(d.weakener.has_value());
    CHECK_FALSE(d.fused_weakener.has_value());
    CHECK_FALSE(d.judgment_weakener.has_value());
    CHECK(d.judgment_strengthener.has_value());
    CHECK(raw_reward(d) == 0.0);
  }
  SUBCASE("third weakener sample is the first neutral one") {
    Fixture f(std::make_shared<SequenceAnswerer>(
                  std::vector<std::string>{"contra one", "contra two", "weak three"},
                  std::vector<std::string>{"strong"}),
              nli_rules, polar_oracle());
    const auto d = simulate_pair(s, q, f.pipeline(3));
    REQUIRE(d.weakener.has_value());
    CHECK(d.weakener->text == "weak three");
  }
  SUBCASE("filter disabled keeps the first sample") {
    Fixture f(std::make_shared<SequenceAnswerer>(std::vector<std::string>{"contra one", "weak"},
                                                 std::vector<std::string>{"strong"}),
              nli_rules, polar_oracle());
    const auto d = simulate_pair(s, q, f.pipeline(3, false));
    REQUIRE(d.weakener.has_value());
    CHECK(d.weakener->text == "contra one");
  }
}

TEST_CASE("raw reward examples") {
  DefeasibleQA d(Situation("s"), Question("q"));
  CHECK(raw_reward(d) == 0.0);
  d.judgment_weakener = JudgmentDistribution(1, 0, 0);
  CHECK(raw_reward(d) == 0.0);
  d.judgment_strengthener = JudgmentDistribution(0, 0, 1);
  CHECK(raw_reward(d) == doctest::Approx(1.0));
  d.judgment_strengthener = d.judgment_weakener;
  CHECK(raw_reward(d) == 0.0);
}

TEST_CASE("raw reward is symmetric in the slots and bounded") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> e(1.0);
  for (int i = 0; i < 500; ++i) {
    DefeasibleQA d(Situation("s"), Question("q"));
    d.judgment_weakener = JudgmentDistribution::from_scores(e(rng), e(rng), e(rng));
    d.judgment_strengthener = JudgmentDistribution::from_scores(e(rng), e(rng), e(rng));
    const double r = raw_reward(d);
    std::swap(d.judgment_weakener, d.judgment_strengthener);
    CHECK(std::abs(raw_reward(d) - r) <= 1e-12);
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("reward statistics") {
  const std::vector<double> r = {0.1, 0.2, 0.3};
  const auto st = stats_from_rewards(r);
  CHECK(std::abs(st.mu0 - 0.2) < 1e-12);
  CHECK(std::abs(st.sigma0 - 0.1) < 1e-12);
  CHECK(st.sample_size == 3);

  CHECK(stats_from_rewards(std::vector<double>{0.7}).sigma0 == 1.0);
  CHECK(stats_from_rewards(std::vector<double>{0.4, 0.4, 0.4}).sigma0 == 1.0);
  CHECK_THROWS_AS(stats_from_rewards(std::vector<double>{}), Error);

  CHECK(normalize_reward(st.mu0, st) == 0.0);
  CHECK(normalize_reward(st.mu0 + st.sigma0, st) == doctest::Approx(1.0));
  CHECK(normalize_reward(0.5, {0.2, 0.1, 3}) == doctest::Approx(3.0));
}

TEST_CASE("estimate_stats asks one question per situation") {
  RuleTable policy_rules;
  policy_rules.add("a", "why a?");
  const ScriptedGenerator policy(policy_rules, std::string("why?"));
  Fixture f(std::make_shared<SequenceAnswerer>(std::vector<std::string>{"weak"},
                                               std::vector<std::string>{"strong"}),
            {}, polar_oracle());
  const std::vector<Situation> one = {Situation("a")};
  const auto st = estimate_stats(one, policy, f.pipeline(1));
  CHECK(st.sample_size == 1);
  CHECK(st.mu0 == doctest::Approx(1.0));
  CHECK(st.sigma0 == 1.0);
  CHECK_THROWS_AS(estimate_stats(std::vector<Situation>{}, policy, f.pipeline(1)), Error);
}

TEST_CASE("polarity labeling by judgment movement") {
  RuleTable o;
  o.add("base", json::array({0.2, 0.3, 0.5}));
  o.add("answer A", json::array({0.1, 0.2, 0.7}));
  o.add("answer B", json::array({0.6, 0.3, 0.1}));
  o.add("badbase", json::array({0.6, 0.3, 0.1}));
  o.add("more bad", json::array({0.8, 0.15, 0.05}));
  o.add("less bad", json::array({0.3, 0.3, 0.4}));
  // The fallback fusion appends the answer, so each fused text hits the answer rule first.
  RuleTable ordered;
  for (const auto& key : {"answer A", "answer B", "more bad", "less bad", "badbase", "base"})
    for (const auto& r : o.rules())
      if (r.key == key) ordered.add(r.key, r.value);
  const ScriptedOracle oracle(ordered);

  auto l = label_answer_polarity(Situation("base"), "answer A", "answer B", oracle, nullptr);
  CHECK(l.first.update_type == UpdateType::kStrengthener);
  CHECK(l.second.update_type == UpdateType::kWeakener);
  CHECK_FALSE(l.ambiguous);

  l = label_answer_polarity(Situation("base"), "same", "same too", oracle, nullptr);
  CHECK(l.ambiguous);
  CHECK(l.first.update_type == UpdateType::kStrengthener);

  l = label_answer_polarity(Situation("badbase"), "less bad", "more bad", oracle, nullptr);
  CHECK(l.second.update_type == UpdateType::kStrengthener);
  CHECK(l.first.update_type == UpdateType::kWeakener);
}

TEST_CASE("reward cache persists kept answers") {
  const auto path = std::filesystem::temp_directory_path() / "clarify_cache_test.jsonl";
  std::filesystem::remove(path);
  {
    RewardCache cache(path);
    Fixture f(std::make_shared<SequenceAnswerer>(std::vector<std::string>{"weak"},
                                                 std::vector<std::string>{"strong"}),
              {}, polar_oracle());
    auto p = f.pipeline(1);
    p.cache = &cache;
    simulate_pair(Situation("s"), Question("q?"), p);
    CHECK(cache.size() == 2);
  }
  RewardCache reloaded(path);
  CHECK(reloaded.size() == 2);
  const auto hit = reloaded.lookup("s", "q?", UpdateType::kWeakener);
  REQUIRE(hit.has_value());
  CHECK(hit->answer == "weak");
  CHECK(hit->judgment.p_bad() == 1.0);
  std::filesystem::remove(path);
}

TEST_CASE("reward cache tolerates concurrent insertion") {
  RewardCache cache;
  std::vector<std::thread> workers;
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([&cache, w] {
      for (int i = 0; i < 200; ++i)
        cache.insert("s" + std::to_string(w), "q" + std::to_string(i), UpdateType::kWeakener,
                     {"a", "f", JudgmentDistribution::uniform()});
    });
  }
  for (auto& t : workers) t.join();
  CHECK(cache.size() == 1600);
}
