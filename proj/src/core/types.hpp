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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clarify {

enum class JudgmentClass { kBad = 0, kOk = 1, kGood = 2 };

const char* to_string(JudgmentClass j);
JudgmentClass judgment_class_from_string(std::string_view name);

enum class UpdateType { kWeakener, kStrengthener };

const char* to_string(UpdateType u);
// "Weakener" / "Strengthener", as used in backend input templates.
const char* display_name(UpdateType u);
UpdateType update_type_from_string(std::string_view name);
UpdateType opposite(UpdateType u);

/// A social or moral situation. The text is never blank.
class Situation {
 public:
  explicit Situation(std::string text,
                     std::optional<JudgmentClass> default_judgment = std::nullopt);

  const std::string& text() const { return text_; }
  const std::optional<JudgmentClass>& default_judgment() const { return default_judgment_; }

  bool operator==(const Situation&) const = default;

 private:
  std::string text_;
  std::optional<JudgmentClass> default_judgment_;
};

/// Probabilities over {bad, ok, good}. Construction validates the sum to 1e-6
/// and renormalizes so the stored components sum to 1.
class JudgmentDistribution {
 public:
  JudgmentDistribution(double p_bad, double p_ok, double p_good);

  static JudgmentDistribution uniform();
  // Normalizes non-negative raw scores by their sum.
  static JudgmentDistribution from_scores(double bad, double ok, double good);

  double p_bad() const { return p_[0]; }
  double p_ok() const { return p_[1]; }
  double p_good() const { return p_[2]; }
  double operator[](JudgmentClass j) const { return p_[static_cast<int>(j)]; }
  const std::array<double, 3>& probabilities() const { return p_; }

  bool operator==(const JudgmentDistribution&) const = default;

 private:
  std::array<double, 3> p_;
};

struct Question {
  std::string text;
  std::optional<std::string> wh_start;
  // Set by generators that cut the decode at max_tokens.
  bool truncated = false;

  Question() = default;
  explicit Question(std::string t);

  bool operator==(const Question& o) const { return text == o.text; }
};

struct Answer {
  std::string text;
  UpdateType update_type;

  Answer(std::string t, UpdateType u);
};

struct UpdatedSituation {
  std::string text;
  Situation situation;
  Question question;
  Answer answer;
};

// Lowercased first whitespace token with surrounding punctuation removed;
// empty when the text has no tokens.
std::string first_token(std::string_view text);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);

}  // namespace clarify
