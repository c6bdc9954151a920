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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "backends/interfaces.hpp"

namespace clarify::backends {

/// Ordered lookup table behind every fixture backend.
///
/// Records are `{"key": ..., "value": ...}`. A string key is a single
/// case-insensitive substring pattern, an array key requires all of its
/// patterns to occur, and an object key is left to the owning fixture to
/// interpret. A rule whose single pattern equals the whole text wins over
/// substring hits; otherwise the first matching rule in file order wins.
class RuleTable {
 public:
  struct Rule {
    nlohmann::json key;
    nlohmann::json value;
  };

  RuleTable() = default;

  static RuleTable from_jsonl(const std::filesystem::path& path);
  // Accepts an array of {"key","value"} records.
  static RuleTable from_json(const nlohmann::json& records);

  void add(nlohmann::json key, nlohmann::json value);

  const nlohmann::json* match(std::string_view text) const;

  bool empty() const { return rules_.empty(); }
  const std::vector<Rule>& rules() const { return rules_; }

 private:
  std::vector<Rule> rules_;
};

// Picks `value` itself, or element seed % size when value is an array.
std::string pick_value(const nlohmann::json& value, std::optional<std::uint64_t> seed);

/// Deterministic generator driven by a RuleTable.
///
/// With no matching rule the optional default template is expanded; the
/// placeholders are {prompt}, {wh} and {Wh} (the word after a trailing
/// "Q.: " marker). No rule and no default means the backend is unavailable.
class ScriptedGenerator : public TextGenerator {
 public:
  explicit ScriptedGenerator(RuleTable rules, std::optional<std::string> default_template = {},
                             std::string name = "scripted-generator");

  Generation generate(const GenerationRequest& request) const override;
  std::string id() const override { return name_; }

 private:
  RuleTable rules_;
  std::optional<std::string> default_template_;
  std::string name_;
};

// Values are raw [bad, ok, good] scores; unmatched text scores uniform.
class ScriptedOracle : public JudgmentOracle {
 public:
  explicit ScriptedOracle(RuleTable rules, std::array<double, 3> fallback = {1.0, 1.0, 1.0});

  std::array<double, 3> scores(std::string_view text) const override;
  std::string id() const override { return "scripted-oracle"; }

 private:
  RuleTable rules_;
  std::array<double, 3> fallback_;
};

// premise == hypothesis is entailment. Keys may be {"premise","hypothesis"}
// objects (premise optional, exact match after trimming) or hypothesis
// patterns. Everything else is neutral.
class ScriptedNli : public NliClassifier {
 public:
  explicit ScriptedNli(RuleTable rules = {});

  NliLabel classify(std::string_view premise, std::string_view hypothesis) const override;
  std::string id() const override { return "scripted-nli"; }

 private:
  RuleTable rules_;
};

/// A question is answerable when its wh-argument occurs in the context.
/// The argument comes from the table (question pattern -> span or spans) or,
/// failing that, from a per-wh-word cue lexicon matched on whole words.
class ScriptedQa : public QaModel {
 public:
  explicit ScriptedQa(RuleTable spans = {});
  ScriptedQa(RuleTable spans, std::map<std::string, std::vector<std::string>> lexicon);

  static std::map<std::string, std::vector<std::string>> default_lexicon();

  bool answerable(std::string_view context, const Question& question) const override;
  std::string id() const override { return "scripted-qa"; }

 private:
  RuleTable spans_;
  std::map<std::string, std::vector<std::string>> lexicon_;
};

// Unigram-multiset F1 over lowercased, punctuation-trimmed tokens.
class TokenF1Similarity : public SimilarityScorer {
 public:
  double score(std::string_view candidate, std::string_view reference) const override;
  std::string id() const override { return "token-f1"; }
};

double token_f1(std::string_view candidate, std::string_view reference);
std::vector<std::string> normalized_tokens(std::string_view text);

// Keyed on "<situation> Q.: <question>"; unmatched pairs score `fallback`.
class ScriptedRelevance : public RelevanceScorer {
 public:
  explicit ScriptedRelevance(RuleTable rules = {}, double fallback = 0.5);

  double relevant_probability(const Situation& situation,
                              const Question& question) const override;
  std::string id() const override { return "scripted-relevance"; }

 private:
  RuleTable rules_;
  double fallback_;
};

}  // namespace clarify::backends
