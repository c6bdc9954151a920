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

#include "backends/scripted.hpp"

#include <cctype>
#include <fstream>

#include "core/error.hpp"

namespace clarify::backends {

namespace {

bool key_matches(const nlohmann::json& key, std::string_view text) {
  if (key.is_string()) return contains_ci(text, key.get<std::string>());
  if (key.is_array() && !key.empty()) {
    for (const auto& p : key) {
      if (!p.is_string() || !contains_ci(text, p.get<std::string>())) return false;
    }
    return true;
  }
  return false;
}

std::string trailing_wh(std::string_view prompt) {
  constexpr std::string_view kMarker = "Q.: ";
  const auto pos = prompt.rfind(kMarker);
  if (pos == std::string_view::npos) return {};
  return trim(prompt.substr(pos + kMarker.size()));
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

std::string expand_template(std::string tmpl, std::string_view prompt) {
  const auto wh = trailing_wh(prompt);
  std::string cap = wh;
  if (!cap.empty()) cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
  replace_all(tmpl, "{prompt}", prompt);
  replace_all(tmpl, "{Wh}", cap);
  replace_all(tmpl, "{wh}", wh);
  return tmpl;
}

Generation truncate_tokens(std::string text, std::size_t max_tokens) {
  const auto tokens = split_whitespace(text);
  if (tokens.size() <= max_tokens) return {std::move(text), false};
  std::string out;
  for (std::size_t i = 0; i < max_tokens; ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return {std::move(out), true};
}

bool contains_word(std::string_view text, std::string_view phrase) {
  const auto hay = to_lower(text);
  const auto needle = to_lower(phrase);
  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1)) {
    const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(hay[pos - 1]));
    const std::size_t end = pos + needle.size();
    const bool right = end >= hay.size() || !std::isalnum(static_cast<unsigned char>(hay[end]));
    if (left && right) return true;
  }
  return false;
}

}  // namespace

RuleTable RuleTable::from_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open fixture table " + path.string());
  RuleTable table;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kSchema, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("key") || !rec.contains("value"))
      fail(ErrorCode::kSchema,
           path.string() + ":" + std::to_string(lineno) + ": expected {\"key\", \"value\"}");
    table.add(rec["key"], rec["value"]);
  }
  return table;
}

RuleTable RuleTable::from_json(const nlohmann::json& records) {
  if (!records.is_array()) fail(ErrorCode::kSchema, "fixture rules must be an array");
  RuleTable table;
  for (const auto& rec : records) {
    if (!rec.is_object() || !rec.contains("key") || !rec.contains("value"))
      fail(ErrorCode::kSchema, "fixture rule must be {\"key\", \"value\"}");
    table.add(rec["key"], rec["value"]);
  }
  return table;
}

void RuleTable::add(nlohmann::json key, nlohmann::json value) {
  rules_.push_back({std::move(key), std::move(value)});
}

const nlohmann::json* RuleTable::match(std::string_view text) const {
  const auto lowered = to_lower(trim(text));
  for (const auto& r : rules_) {
    if (r.key.is_string() && to_lower(trim(r.key.get<std::string>())) == lowered) return &r.value;
  }
  for (const auto& r : rules_) {
    if (key_matches(r.key, text)) return &r.value;
  }
  return nullptr;
}

std::string pick_value(const nlohmann::json& value, std::optional<std::uint64_t> seed) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array() && !value.empty()) {
    const auto idx = static_cast<std::size_t>(seed.value_or(0) % value.size());
    if (value[idx].is_string()) return value[idx].get<std::string>();
  }
  fail(ErrorCode::kSchema, "fixture value must be a string or array of strings");
}

ScriptedGenerator::ScriptedGenerator(RuleTable rules, std::optional<std::string> default_template,
                                     std::string name)
    : rules_(std::move(rules)),
      default_template_(std::move(default_template)),
      name_(std::move(name)) {}

Generation ScriptedGenerator::generate(const GenerationRequest& request) const {
  request.validate();
  if (const auto* value = rules_.match(request.prompt)) {
    return truncate_tokens(expand_template(pick_value(*value, request.seed), request.prompt),
                           request.max_tokens);
  }
  if (default_template_)
    return truncate_tokens(expand_template(*default_template_, request.prompt),
                           request.max_tokens);
  fail(ErrorCode::kBackendUnavailable, name_ + ": no rule for prompt \"" + request.prompt + "\"");
}

ScriptedOracle::ScriptedOracle(RuleTable rules, std::array<double, 3> fallback)
    : rules_(std::move(rules)), fallback_(fallback) {}

std::array<double, 3> ScriptedOracle::scores(std::string_view text) const {
  const auto* value = rules_.match(text);
  if (!value) return fallback_;
  if (value->is_array() && value->size() == 3)
    return {(*value)[0].get<double>(), (*value)[1].get<double>(), (*value)[2].get<double>()};
  if (value->is_object())
    return {value->value("bad", 0.0), value->value("ok", 0.0), value->value("good", 0.0)};
  fail(ErrorCode::kSchema, "oracle fixture value must be [bad, ok, good]");
}

ScriptedNli::ScriptedNli(RuleTable rules) : rules_(std::move(rules)) {}

NliLabel ScriptedNli::classify(std::string_view premise, std::string_view hypothesis) const {
  const auto p = trim(premise);
  const auto h = trim(hypothesis);
  if (p == h) return NliLabel::kEntailment;
  for (const auto& r : rules_.rules()) {
    if (!r.key.is_object()) continue;
    if (r.key.contains("premise") && trim(r.key["premise"].get<std::string>()) != p) continue;
    if (trim(r.key.value("hypothesis", std::string{})) != h) continue;
    return nli_label_from_string(r.value.get<std::string>());
  }
  for (const auto& r : rules_.rules()) {
    if (!r.key.is_object() && key_matches(r.key, h))
      return nli_label_from_string(r.value.get<std::string>());
  }
  return NliLabel::kNeutral;
}

ScriptedQa::ScriptedQa(RuleTable spans) : ScriptedQa(std::move(spans), default_lexicon()) {}

ScriptedQa::ScriptedQa(RuleTable spans, std::map<std::string, std::vector<std::string>> lexicon)
    : spans_(std::move(spans)), lexicon_(std::move(lexicon)) {}

std::map<std::string, std::vector<std::string>> ScriptedQa::default_lexicon() {
  return {
      {"when", {"yesterday", "today", "tonight", "tomorrow", "morning", "afternoon", "evening",
                "night", "week", "weekend", "year", "o'clock", "during", "before", "after"}},
      {"where", {"home", "work", "school", "office", "house", "park", "store", "restaurant",
                 "party", "church", "hospital"}},
      {"who", {"friend", "colleague", "coworker", "mother", "father", "mom", "dad", "parent",
               "child", "kid", "toddler", "brother", "sister", "boss", "neighbor", "partner",
               "wife", "husband", "stranger"}},
      {"why", {"because", "since", "so that", "in order to"}},
  };
}

bool ScriptedQa::answerable(std::string_view context, const Question& question) const {
  if (const auto* value = spans_.match(question.text)) {
    if (value->is_string()) return contains_ci(context, value->get<std::string>());
    for (const auto& span : *value) {
      if (contains_ci(context, span.get<std::string>())) return true;
    }
    return false;
  }
  const auto wh = question.wh_start.value_or(first_token(question.text));
  const auto it = lexicon_.find(wh);
  if (it == lexicon_.end()) return false;
  for (const auto& cue : it->second) {
    if (contains_word(context, cue)) return true;
  }
  return false;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& tok : split_whitespace(text)) {
    std::size_t b = 0, e = tok.size();
    while (b < e && std::ispunct(static_cast<unsigned char>(tok[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(tok[e - 1]))) --e;
    if (b < e) out.push_back(to_lower(std::string_view(tok).substr(b, e - b)));
  }
  return out;
}

double token_f1(std::string_view candidate, std::string_view reference) {
  const auto c = normalized_tokens(candidate);
  const auto r = normalized_tokens(reference);
  if (c.empty() || r.empty()) return 0.0;
  std::map<std::string, int> ref_counts;
  for (const auto& t : r) ++ref_counts[t];
  int overlap = 0;
  for (const auto& t : c) {
    auto it = ref_counts.find(t);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(c.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(r.size());
  return 2.0 * precision * recall / (precision + recall);
}

double TokenF1Similarity::score(std::string_view candidate, std::string_view reference) const {
  if (candidate == reference) return 1.0;
  return token_f1(candidate, reference);
}

ScriptedRelevance::ScriptedRelevance(RuleTable rules, double fallback)
    : rules_(std::move(rules)), fallback_(fallback) {}

double ScriptedRelevance::relevant_probability(const Situation& situation,
                                               const Question& question) const {
  const auto key = situation.text() + " Q.: " + question.text;
  if (const auto* value = rules_.match(key)) return value->get<double>();
  return fallback_;
}

}  // namespace clarify::backends
