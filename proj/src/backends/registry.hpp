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
#include <memory>
#include <string>

#include <json.hpp>

#include "backends/interfaces.hpp"
#include "backends/trainable.hpp"

namespace clarify::backends {

/// Every learned component the framework talks to. `policy` and `wh_policy`
/// are text-level; when the policy is trainable, `trainable_policy` and
/// `value` expose the token-level models behind it.
struct BackendSet {
  std::string name;
  std::shared_ptr<const TextGenerator> policy;
  std::shared_ptr<const TextGenerator> wh_policy;
  std::shared_ptr<const TextGenerator> answerer;
  std::shared_ptr<const TextGenerator> fusion;
  std::shared_ptr<const JudgmentOracle> oracle;
  std::shared_ptr<const NliClassifier> nli;
  std::shared_ptr<const QaModel> qa;
  std::shared_ptr<const SimilarityScorer> similarity;
  std::shared_ptr<const RelevanceScorer> relevance;

  std::shared_ptr<TokenPolicy> trainable_policy;
  std::shared_ptr<ValueModel> value;

  // Decoding defaults for every generation request.
  GenerationRequest decoding;
};

/// Builds a backend set from the "backends" section of a config. The section
/// maps profile names to component settings; `profile` selects one (empty picks
/// "default_backend", then the first profile). Relative table paths resolve
/// against `base_dir`.
BackendSet build_backends(const nlohmann::json& config, const std::filesystem::path& base_dir,
                          const std::string& profile = {});

// All-fixture set with empty tables; tests fill in what they need.
BackendSet fixture_backends();

}  // namespace clarify::backends
