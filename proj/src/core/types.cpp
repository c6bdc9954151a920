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

#include "core/types.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace clarify {

namespace {

constexpr double kInputSumTolerance = 1e-6;

bool is_punct(unsigned char c) { return std::ispunct(c) != 0; }

}  // namespace

const char* to_string(JudgmentClass j) {
  switch (j) {
    case JudgmentClass::kBad: return "bad";
    case JudgmentClass::kOk: return "ok";
    case JudgmentClass::kGood: return "good";
  }
  return "bad";
}

JudgmentClass judgment_class_from_string(std::string_view name) {
  const auto n = to_lower(name);
  if (n == "bad") return JudgmentClass::kBad;
  if (n == "ok") return JudgmentClass::kOk;
  if (n == "good") return JudgmentClass::kGood;
  fail(ErrorCode::kInvalidArgument, "unknown judgment class: " + std::string(name));
}

const char* to_string(UpdateType u) {
  return u == UpdateType::kWeakener ? "weakener" : "strengthener";
}

const char* display_name(UpdateType u) {
  return u == UpdateType::kWeakener ? "Weakener" : "Strengthener";
}

UpdateType update_type_from_string(std::string_view name) {
  const auto n = to_lower(name);
  if (n == "weakener") return UpdateType::kWeakener;
  if (n == "strengthener") return UpdateType::kStrengthener;
  fail(ErrorCode::kInvalidArgument, "unknown update type: " + std::string(name));
}

UpdateType opposite(UpdateType u) {
  return u == UpdateType::kWeakener ? UpdateType::kStrengthener : UpdateType::kWeakener;
}

Situation::Situation(std::string text, std::optional<JudgmentClass> default_judgment)
    : text_(std::move(text)), default_judgment_(default_judgment) {
  if (trim(text_).empty()) fail(ErrorCode::kInvalidArgument, "situation text is empty");
}

JudgmentDistribution::JudgmentDistribution(double p_bad, double p_ok, double p_good)
    : p_{p_bad, p_ok, p_good} {
  double sum = 0.0;
  for (double p : p_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0 + kInputSumTolerance)
      fail(ErrorCode::kInvalidArgument, "judgment probability outside [0,1]");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kInputSumTolerance)
    fail(ErrorCode::kInvalidArgument, "judgment distribution does not sum to 1");
  for (double& p : p_) p /= sum;
}

JudgmentDistribution JudgmentDistribution::uniform() {
  return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
}

JudgmentDistribution JudgmentDistribution::from_scores(double bad, double ok, double good) {
  for (double s : {bad, ok, good}) {
    if (!std::isfinite(s) || s < 0.0)
      fail(ErrorCode::kInvalidArgument, "raw judgment scores must be finite and non-negative");
  }
  const double sum = bad + ok + good;
  if (sum <= 0.0) fail(ErrorCode::kInvalidArgument, "raw judgment scores sum to zero");
  return {bad / sum, ok / sum, good / sum};
}

Question::Question(std::string t) : text(std::move(t)) {
  auto first = first_token(text);
  if (!first.empty()) wh_start = std::move(first);
}

Answer::Answer(std::string t, UpdateType u) : text(std::move(t)), update_type(u) {
  if (trim(text).empty()) fail(ErrorCode::kInvalidArgument, "answer text is empty");
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string tok; in >> tok;) out.push_back(std::move(tok));
  return out;
}

std::string first_token(std::string_view text) {
  const auto tokens = split_whitespace(text);
  for (const auto& tok : tokens) {
    std::size_t b = 0, e = tok.size();
    while (b < e && is_punct(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && is_punct(static_cast<unsigned char>(tok[e - 1]))) --e;
    if (b < e) return to_lower(std::string_view(tok).substr(b, e - b));
  }
  return {};
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

}  // namespace clarify
