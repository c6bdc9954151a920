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

#include "backends/registry.hpp"

#include "backends/remote.hpp"
#include "backends/scripted.hpp"
#include "core/error.hpp"

namespace clarify::backends {

namespace {

using nlohmann::json;

RuleTable load_rules(const json& node, const std::filesystem::path& base_dir) {
  RuleTable table;
  if (node.contains("table")) {
    std::filesystem::path p = node["table"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    table = RuleTable::from_jsonl(p);
  }
  if (node.contains("rules")) {
    const auto inline_rules = RuleTable::from_json(node["rules"]);
    for (const auto& r : inline_rules.rules()) table.add(r.key, r.value);
  }
  return table;
}

RemoteEndpoint endpoint(const json& node, const char* default_path) {
  if (!node.contains("url")) fail(ErrorCode::kSchema, "remote backend needs a \"url\"");
  return RemoteEndpoint(node["url"].get<std::string>(), node.value("path", default_path),
                        node.value("timeout_seconds", 30));
}

std::string type_of(const json& node, const char* component) {
  if (!node.is_object() || !node.contains("type"))
    fail(ErrorCode::kSchema, std::string("backend \"") + component + "\" needs a \"type\"");
  return node["type"].get<std::string>();
}

std::shared_ptr<const TextGenerator> make_generator(const json& node, const char* component,
                                                    const std::filesystem::path& base_dir) {
  const auto type = type_of(node, component);
  if (type == "scripted") {
    std::optional<std::string> dflt;
    if (node.contains("default")) dflt = node["default"].get<std::string>();
    return std::make_shared<ScriptedGenerator>(load_rules(node, base_dir), dflt,
                                               std::string("scripted-") + component);
  }
  if (type == "remote") return std::make_shared<RemoteGenerator>(endpoint(node, "/generate"));
  fail(ErrorCode::kSchema, std::string("unknown generator type for ") + component + ": " + type);
}

std::shared_ptr<LinearSoftmaxPolicy> make_linear_policy(const json& node) {
  LinearPolicyOptions opts;
  opts.vocab = node.at("vocab").get<std::vector<std::string>>();
  if (node.contains("eos")) opts.eos = node["eos"].get<std::string>();
  opts.max_positions = node.value("max_positions", std::size_t{4});
  opts.situation_buckets = node.value("situation_buckets", std::size_t{0});
  opts.init_scale = node.value("init_scale", 0.0);
  opts.init_seed = node.value("init_seed", std::uint64_t{0});
  auto policy = std::make_shared<LinearSoftmaxPolicy>(opts);
  if (node.contains("bias")) {
    for (const auto& [word, delta] : node["bias"].items()) policy->shift_bias(word, delta.get<double>());
  }
  return policy;
}

const json& component(const json& profile, const char* name) {
  if (!profile.contains(name))
    fail(ErrorCode::kSchema, std::string("backend profile is missing \"") + name + "\"");
  return profile[name];
}

}  // namespace

BackendSet build_backends(const json& config, const std::filesystem::path& base_dir,
                          const std::string& profile) {
  if (!config.contains("backends") || !config["backends"].is_object() ||
      config["backends"].empty())
    fail(ErrorCode::kSchema, "config has no \"backends\" profiles");
  const auto& profiles = config["backends"];
  std::string name = profile;
  if (name.empty()) name = config.value("default_backend", profiles.begin().key());
  if (!profiles.contains(name)) fail(ErrorCode::kNotFound, "unknown backend profile: " + name);
  const auto& p = profiles[name];

  BackendSet set;
  set.name = name;

  const auto& policy_node = component(p, "policy");
  if (type_of(policy_node, "policy") == "linear") {
    auto linear = make_linear_policy(policy_node);
    set.value = std::make_shared<LinearValueModel>(linear->vocab_size(),
                                                   policy_node.value("max_positions", std::size_t{4}),
                                                   policy_node.value("situation_buckets", std::size_t{0}));
    set.trainable_policy = linear;
    set.policy = std::make_shared<TokenPolicyGenerator>(linear);
  } else {
    set.policy = make_generator(policy_node, "policy", base_dir);
  }
  set.wh_policy = p.contains("wh_policy") ? make_generator(p["wh_policy"], "wh_policy", base_dir)
                                          : set.policy;
  set.answerer = make_generator(component(p, "answerer"), "answerer", base_dir);
  set.fusion = make_generator(component(p, "fusion"), "fusion", base_dir);

  const auto& oracle = component(p, "oracle");
  if (type_of(oracle, "oracle") == "scripted") {
    std::array<double, 3> fallback{1.0, 1.0, 1.0};
    if (oracle.contains("fallback")) fallback = oracle["fallback"].get<std::array<double, 3>>();
    set.oracle = std::make_shared<ScriptedOracle>(load_rules(oracle, base_dir), fallback);
  } else if (type_of(oracle, "oracle") == "remote") {
    set.oracle = std::make_shared<RemoteOracle>(endpoint(oracle, "/judge"));
  } else {
    fail(ErrorCode::kSchema, "unknown oracle type");
  }

  const json neutral = {{"type", "scripted"}};
  const auto& nli = p.value("nli", neutral);
  if (type_of(nli, "nli") == "remote")
    set.nli = std::make_shared<RemoteNli>(endpoint(nli, "/nli"));
  else
    set.nli = std::make_shared<ScriptedNli>(load_rules(nli, base_dir));

  const auto& qa = p.value("qa", neutral);
  if (type_of(qa, "qa") == "remote") {
    set.qa = std::make_shared<RemoteQa>(endpoint(qa, "/qa"));
  } else {
    auto lexicon = ScriptedQa::default_lexicon();
    if (qa.contains("lexicon"))
      lexicon = qa["lexicon"].get<std::map<std::string, std::vector<std::string>>>();
    set.qa = std::make_shared<ScriptedQa>(load_rules(qa, base_dir), std::move(lexicon));
  }

  const auto& sim = p.value("similarity", json{{"type", "token-f1"}});
  if (type_of(sim, "similarity") == "remote")
    set.similarity = std::make_shared<RemoteSimilarity>(endpoint(sim, "/similarity"));
  else
    set.similarity = std::make_shared<TokenF1Similarity>();

  const auto& rel = p.value("relevance", neutral);
  if (type_of(rel, "relevance") == "remote")
    set.relevance = std::make_shared<RemoteRelevance>(endpoint(rel, "/relevance"));
  else
    set.relevance = std::make_shared<ScriptedRelevance>(load_rules(rel, base_dir),
                                                        rel.value("fallback", 0.5));

  if (config.contains("decoding")) {
    const auto& d = config["decoding"];
    set.decoding.top_p = d.value("top_p", kDefaultTopP);
    set.decoding.temperature = d.value("temperature", kDefaultTemperature);
    set.decoding.max_tokens = d.value("max_tokens", kDefaultMaxTokens);
  }
  set.decoding.validate();
  return set;
}

BackendSet fixture_backends() {
  BackendSet set;
  set.name = "fixture";
  set.policy = std::make_shared<ScriptedGenerator>(RuleTable{}, std::nullopt, "scripted-policy");
  set.wh_policy = set.policy;
  set.answerer = std::make_shared<ScriptedGenerator>(RuleTable{}, "<FIXED>", "scripted-answerer");
  set.fusion = std::make_shared<ScriptedGenerator>(RuleTable{}, std::nullopt, "scripted-fusion");
  set.oracle = std::make_shared<ScriptedOracle>(RuleTable{});
  set.nli = std::make_shared<ScriptedNli>();
  set.qa = std::make_shared<ScriptedQa>();
  set.similarity = std::make_shared<TokenF1Similarity>();
  set.relevance = std::make_shared<ScriptedRelevance>();
  return set;
}

}  // namespace clarify::backends
