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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/types.hpp"

namespace clarify::data {

enum class Split { kTrain, kDev, kTest };

const char* to_string(Split split);
Split split_from_string(std::string_view name);

// A situation with its crowdsourced clarification questions (normally five).
struct GoldRecord {
  Situation situation;
  std::vector<Question> questions;
  Split split = Split::kTrain;
};

// A generated (situation, update type, question, answer) tuple.
struct SilverRecord {
  Situation situation;
  UpdateType update_type;
  Question question;
  Answer answer;
};

template <typename Record>
struct LoadResult {
  std::vector<Record> records;
  // "<path>:<line>: <reason>" for every rejected line.
  std::vector<std::string> errors;
};

// JSONL {situation, questions:[...], split}. Malformed lines are reported,
// never silently dropped; an unreadable file throws.
LoadResult<GoldRecord> load_gold(const std::filesystem::path& path);
void save_gold(const std::filesystem::path& path, std::span<const GoldRecord> records);
nlohmann::json to_json(const GoldRecord& record);

// JSONL {situation, update_type, question, answer}.
LoadResult<SilverRecord> load_silver(const std::filesystem::path& path);
void save_silver(const std::filesystem::path& path, std::span<const SilverRecord> records);
nlohmann::json to_json(const SilverRecord& record);

// Situations from a JSONL file whose records carry a "situation" field.
std::vector<Situation> load_situations(const std::filesystem::path& path);

struct SilverTriple {
  std::string situation;
  UpdateType update_type;
  std::string update;
};

struct SilverExemplar {
  std::string situation;
  UpdateType update_type;
  std::string update;
  std::string question;
};

struct PromptRecord {
  std::string prompt;
  std::string situation;
  UpdateType update_type;
  std::string update;
};

inline constexpr std::size_t kSilverShots = 5;

std::vector<SilverExemplar> default_silver_exemplars();

/// One few-shot prompt per triple: the exemplar blocks, then the target
/// block ending in an empty "Question:" slot for the completion backend.
std::vector<PromptRecord> build_silver_prompts(
    std::span<const SilverTriple> triples,
    std::span<const SilverExemplar> exemplars = {});

// Joins a completion back onto its prompt's metadata.
SilverRecord join_completion(const PromptRecord& prompt, const std::string& completion);

struct QuestionStartStats {
  std::map<std::string, double> start_distribution;
  double identical_question_fraction = 0.0;
  double same_wh_fraction = 0.0;
  std::size_t situations = 0;
  std::size_t questions = 0;

  nlohmann::json to_json() const;
};

// Question groups are per situation; silver records are grouped by text.
QuestionStartStats question_start_stats(std::span<const GoldRecord> records);
QuestionStartStats question_start_stats(std::span<const SilverRecord> records);

// (situation, question) pairs generated for both update types.
std::vector<std::pair<std::string, std::string>> defeasible_question_subset(
    std::span<const SilverRecord> records);

}  // namespace clarify::data
