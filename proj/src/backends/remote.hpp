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

#include <string>

#include <json.hpp>

#include "backends/interfaces.hpp"

namespace clarify::backends {

/// JSON-over-HTTP endpoint shared by the remote backends. Transport failures,
/// non-2xx statuses and malformed bodies all surface as backend-unavailable.
class RemoteEndpoint {
 public:
  RemoteEndpoint(std::string base_url, std::string path, int timeout_seconds = 30);

  nlohmann::json post(const nlohmann::json& body) const;
  std::string describe() const { return base_url_ + path_; }

 private:
  std::string base_url_;
  std::string path_;
  int timeout_seconds_;
};

// POST {prompt, max_tokens, top_p, temperature[, seed]} -> {"text"[, "truncated"]}
class RemoteGenerator : public TextGenerator {
 public:
  explicit RemoteGenerator(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  Generation generate(const GenerationRequest& request) const override;
  std::string id() const override { return "remote:" + endpoint_.describe(); }

 private:
  RemoteEndpoint endpoint_;
};

// POST {text} -> {"bad", "ok", "good"}
class RemoteOracle : public JudgmentOracle {
 public:
  explicit RemoteOracle(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  std::array<double, 3> scores(std::string_view text) const override;
  std::string id() const override { return "remote:" + endpoint_.describe(); }

 private:
  RemoteEndpoint endpoint_;
};

// POST {premise, hypothesis} -> {"label"}
class RemoteNli : public NliClassifier {
 public:
  explicit RemoteNli(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  NliLabel classify(std::string_view premise, std::string_view hypothesis) const override;
  std::string id() const override { return "remote:" + endpoint_.describe(); }

 private:
  RemoteEndpoint endpoint_;
};

// POST {context, question} -> {"answerable"}
class RemoteQa : public QaModel {
 public:
  explicit RemoteQa(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  bool answerable(std::string_view context, const Question& question) const override;
  std::string id() const override { return "remote:" + endpoint_.describe(); }

 private:
  RemoteEndpoint endpoint_;
};

// POST {candidate, reference} -> {"score"}
class RemoteSimilarity : public SimilarityScorer {
 public:
  explicit RemoteSimilarity(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  double score(std::string_view candidate, std::string_view reference) const override;
  std::string id() const override { return "remote:" + endpoint_.describe(); }

 private:
  RemoteEndpoint endpoint_;
};

// POST {situation, question} -> {"relevant"}
class RemoteRelevance : public RelevanceScorer {
 public:
  explicit RemoteRelevance(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}
  double relevant_probability(const Situation& situation,
                              const Question& question) const override;
  std::string id() const override { return "remote:" + endpoint_.describe(); }

 private:
  RemoteEndpoint endpoint_;
};

}  // namespace clarify::backends
