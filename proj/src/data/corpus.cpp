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

#include "data/corpus.hpp"

#include <fstream>
#include <set>

#include "core/error.hpp"

namespace clarify::data {

using nlohmann::json;

const char* to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  fail(ErrorCode::kSchema, "unknown split: " + std::string(name));
}

namespace {

template <typename Record, typename Parse>
LoadResult<Record> load_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  LoadResult<Record> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (trim(line).empty()) continue;
    try {
      out.records.push_back(parse(json::parse(line)));
    } catch (const std::exception& e) {
      out.errors.push_back(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string string_field(const json& rec, const char* name) {
  if (!rec.is_object() || !rec.contains(name) || !rec[name].is_string())
    fail(ErrorCode::kSchema, std::string("missing string field \"") + name + "\"");
  return rec[name].get<std::string>();
}

template <typename Record>
void save_jsonl(const std::filesystem::path& path, std::span<const Record> records) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

struct QuestionGroup {
  std::vector<std::string> questions;
};

QuestionStartStats stats_over(const std::vector<QuestionGroup>& groups) {
  QuestionStartStats st;
  std::map<std::string, std::size_t> counts;
  std::size_t identical = 0, same_wh = 0;
  for (const auto& g : groups) {
    if (g.questions.empty()) continue;
    ++st.situations;
    std::set<std::string> seen, starts;
    bool dup = false;
    for (const auto& q : g.questions) {
      ++st.questions;
      const auto start = first_token(q);
      ++counts[start];
      starts.insert(start);
      if (!seen.insert(q).second) dup = true;
    }
    if (dup) ++identical;
    if (starts.size() == 1) ++same_wh;
  }
  for (const auto& [start, c] : counts)
    st.start_distribution[start] = static_cast<double>(c) / static_cast<double>(st.questions);
  if (st.situations > 0) {
    st.identical_question_fraction =
        static_cast<double>(identical) / static_cast<double>(st.situations);
    st.same_wh_fraction = static_cast<double>(same_wh) / static_cast<double>(st.situations);
  }
  return st;
}

}  // namespace

json to_json(const GoldRecord& record) {
  json qs = json::array();
  for (const auto& q : record.questions) qs.push_back(q.text);
  return {{"situation", record.situation.text()}, {"questions", qs}, {"split", to_string(record.split)}};
}

LoadResult<GoldRecord> load_gold(const std::filesystem::path& path) {
  return load_jsonl<GoldRecord>(path, [](const json& rec) {
    Situation s(string_field(rec, "situation"));
    if (!rec.contains("questions") || !rec["questions"].is_array())
      fail(ErrorCode::kSchema, "missing array field \"questions\"");
    std::vector<Question> questions;
    for (const auto& q : rec["questions"]) {
      if (!q.is_string() || trim(q.get<std::string>()).empty())
        fail(ErrorCode::kSchema, "questions must be nonempty strings");
      questions.emplace_back(q.get<std::string>());
    }
    if (questions.empty()) fail(ErrorCode::kSchema, "record has no questions");
    return GoldRecord{std::move(s), std::move(questions), split_from_string(string_field(rec, "split"))};
  });
}

void save_gold(const std::filesystem::path& path, std::span<const GoldRecord> records) {
  save_jsonl(path, records);
}

json to_json(const SilverRecord& record) {
  return {{"situation", record.situation.text()},
          {"update_type", to_string(record.update_type)},
          {"question", record.question.text},
          {"answer", record.answer.text}};
}

LoadResult<SilverRecord> load_silver(const std::filesystem::path& path) {
  return load_jsonl<SilverRecord>(path, [](const json& rec) {
    const auto u = update_type_from_string(string_field(rec, "update_type"));
    const auto q = string_field(rec, "question");
    if (trim(q).empty()) fail(ErrorCode::kSchema, "question is empty");
    return SilverRecord{Situation(string_field(rec, "situation")), u, Question(q),
                        Answer(string_field(rec, "answer"), u)};
  });
}

void save_silver(const std::filesystem::path& path, std::span<const SilverRecord> records) {
  save_jsonl(path, records);
}

std::vector<Situation> load_situations(const std::filesystem::path& path) {
  auto loaded = load_jsonl<Situation>(path, [](const json& rec) {
    std::optional<JudgmentClass> j;
    if (rec.contains("default_judgment"))
      j = judgment_class_from_string(rec["default_judgment"].get<std::string>());
    return Situation(string_field(rec, "situation"), j);
  });
  if (!loaded.errors.empty()) fail(ErrorCode::kSchema, loaded.errors.front());
  return std::move(loaded.records);
}

std::vector<SilverExemplar> default_silver_exemplars() {
  return {
      {"It is good to protect your kids", UpdateType::kStrengthener, "Your child is in danger.",
       "What are you protecting your child from?"},
      {"It's bad to be a snitch", UpdateType::kWeakener, "Doing so would save someone's life.",
       "Why would being a snitch be beneficial?"},
      {"Offering a cup of coffee", UpdateType::kWeakener, "I offered it to a toddler.",
       "Who did you offer it to?"},
      {"Tipping people decently", UpdateType::kStrengthener, "The service was excellent.",
       "Was the service good?"},
      {"Learning how to take a joke", UpdateType::kWeakener, "It was an offensive joke.",
       "What was the joke?"},
  };
}

std::vector<PromptRecord> build_silver_prompts(std::span<const SilverTriple> triples,
                                               std::span<const SilverExemplar> exemplars) {
  const auto defaults = default_silver_exemplars();
  if (exemplars.empty()) exemplars = defaults;
  if (exemplars.size() != kSilverShots)
    fail(ErrorCode::kInvalidArgument, "silver prompts need exactly 5 exemplars");

  std::string shots;
  for (const auto& ex : exemplars) {
    shots += "Situation: " + ex.situation + "\n";
    shots += std::string("Update type: ") + display_name(ex.update_type) + "\n";
    shots += "Answer: " + ex.update + "\n";
    shots += "Question: " + ex.question + "\n\n";
  }
  std::vector<PromptRecord> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    std::string prompt = shots;
    prompt += "Situation: " + t.situation + "\n";
    prompt += std::string("Update type: ") + display_name(t.update_type) + "\n";
    prompt += "Answer: " + t.update + "\n";
    prompt += "Question:";
    out.push_back({std::move(prompt), t.situation, t.update_type, t.update});
  }
  return out;
}

SilverRecord join_completion(const PromptRecord& prompt, const std::string& completion) {
  // Completions may run on into a new block; keep the first line only.
  auto text = trim(completion.substr(0, completion.find('\n')));
  if (text.empty()) fail(ErrorCode::kInvalidArgument, "empty completion");
  return {Situation(prompt.situation), prompt.update_type, Question(text),
          Answer(prompt.update, prompt.update_type)};
}

json QuestionStartStats::to_json() const {
  return {{"start_distribution", start_distribution},
          {"identical_question_fraction", identical_question_fraction},
          {"same_wh_fraction", same_wh_fraction},
          {"situations", situations},
          {"questions", questions}};
}

QuestionStartStats question_start_stats(std::span<const GoldRecord> records) {
  std::vector<QuestionGroup> groups;
  for (const auto& r : records) {
    QuestionGroup g;
    for (const auto& q : r.questions) g.questions.push_back(q.text);
    groups.push_back(std::move(g));
  }
  return stats_over(groups);
}

QuestionStartStats question_start_stats(std::span<const SilverRecord> records) {
  std::map<std::string, std::size_t> index;
  std::vector<QuestionGroup> groups;
  for (const auto& r : records) {
    auto [it, fresh] = index.try_emplace(r.situation.text(), groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].questions.push_back(r.question.text);
  }
  return stats_over(groups);
}

std::vector<std::pair<std::string, std::string>> defeasible_question_subset(
    std::span<const SilverRecord> records) {
  std::map<std::pair<std::string, std::string>, unsigned> seen;  // bit per update type
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : records) {
    const auto key = std::make_pair(r.situation.text(), r.question.text);
    auto [it, fresh] = seen.try_emplace(key, 0u);
    if (fresh) order.push_back(key);
    it->second |= r.update_type == UpdateType::kWeakener ? 1u : 2u;
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& key : order) {
    if (seen[key] == 3u) out.push_back(key);
  }
  return out;
}

}  // namespace clarify::data
