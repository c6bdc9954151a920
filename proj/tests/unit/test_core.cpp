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
#include <random>

#include "core/divergence.hpp"
#include "core/error.hpp"
#include "core/types.hpp"

using namespace clarify;

namespace {

// Direct evaluation of 0.5 KL(p||m) + 0.5 KL(q||m) in bits.
double jsd_reference(const std::array<double, 3>& p, const std::array<double, 3>& q) {
  double out = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0) out += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0) out += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return out;
}

JudgmentDistribution random_dist(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  return JudgmentDistribution::from_scores(e(rng), e(rng), e(rng));
}

}  // namespace

TEST_CASE("situation text must not be blank") {
  CHECK_NOTHROW(Situation("lie to my friend"));
  CHECK_THROWS_AS(Situation(""), Error);
  CHECK_THROWS_AS(Situation(" \t\n"), Error);
  Situation s("tipping", JudgmentClass::kGood);
  CHECK(s.default_judgment() == JudgmentClass::kGood);
}

TEST_CASE("judgment distribution validates and renormalizes") {
  const JudgmentDistribution d(0.2, 0.3, 0.5);
  CHECK(d.p_bad() + d.p_ok() + d.p_good() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_NOTHROW(JudgmentDistribution(0.2, 0.3, 0.5 + 5e-7));
  CHECK_THROWS_AS(JudgmentDistribution(0.2, 0.3, 0.6), Error);
  CHECK_THROWS_AS(JudgmentDistribution(-0.1, 0.6, 0.5), Error);
  CHECK_THROWS_AS(JudgmentDistribution(NAN, 0.5, 0.5), Error);

  const auto n = JudgmentDistribution::from_scores(2, 1, 1);
  CHECK(n.p_bad() == 0.5);
  CHECK(n.p_ok() == 0.25);
  CHECK(n.p_good() == 0.25);
  CHECK_THROWS_AS(JudgmentDistribution::from_scores(0, 0, 0), Error);
}

TEST_CASE("question start token") {
  CHECK(Question("Why did you lie?").wh_start == "why");
  CHECK(Question("\"What, exactly?\"").wh_start == "what");
  CHECK(first_token("  WHO's there") == "who's");
  CHECK(first_token("") == "");
  CHECK_FALSE(Question("").wh_start.has_value());
}

TEST_CASE("answer text must not be empty") {
  CHECK_THROWS_AS(Answer("", UpdateType::kWeakener), Error);
  CHECK(Answer("x", UpdateType::kStrengthener).update_type == UpdateType::kStrengthener);
  CHECK(opposite(UpdateType::kWeakener) == UpdateType::kStrengthener);
  CHECK(std::string(display_name(UpdateType::kWeakener)) == "Weakener");
  CHECK(update_type_from_string("strengthener") == UpdateType::kStrengthener);
  CHECK_THROWS_AS(update_type_from_string("both"), Error);
}

TEST_CASE("jsd examples") {
  const JudgmentDistribution a(1, 0, 0), b(0, 1, 0);
  CHECK(jsd(a, a) == 0.0);
  CHECK(jsd(a, b) == doctest::Approx(1.0).epsilon(1e-15));
  const JudgmentDistribution p(0.8, 0.1, 0.1), q(0.1, 0.1, 0.8);
  CHECK(std::abs(jsd(p, q) - 0.44706749870191898) < 1e-12);
}

TEST_CASE("jsd matches direct evaluation and its properties hold") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto p = random_dist(rng), q = random_dist(rng);
    const double d = jsd(p, q);
    CHECK(std::abs(d - jsd_reference(p.probabilities(), q.probabilities())) < 1e-12);
    CHECK(std::abs(d - jsd(q, p)) <= 1e-12);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    CHECK(jsd(p, p) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("argmax ties follow bad < ok < good") {
  CHECK(argmax_judgment({0.1, 0.2, 0.7}) == JudgmentClass::kGood);
  CHECK(argmax_judgment({0.4, 0.4, 0.2}) == JudgmentClass::kBad);
  CHECK(argmax_judgment({1.0 / 3, 1.0 / 3, 1.0 / 3}) == JudgmentClass::kBad);
  CHECK(argmax_judgment({0.2, 0.4, 0.4}) == JudgmentClass::kOk);
}

TEST_CASE("argmax is scale invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 500; ++i) {
    const auto p = random_dist(rng);
    const double c = scale(rng);
    const auto scaled = JudgmentDistribution::from_scores(c * p.p_bad(), c * p.p_ok(), c * p.p_good());
    CHECK(argmax_judgment(scaled) == argmax_judgment(p));
  }
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(split_whitespace(" a  b\tc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(contains_ci("Lie To My Friend", "to my"));
  CHECK_FALSE(contains_ci("abc", "abd"));
  CHECK(std::string(to_string(ErrorCode::kTurnLimitExceeded)) == "turn-limit-exceeded");
}
