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

#include "backends/remote.hpp"

#include <httplib.h>

#include "core/error.hpp"

namespace clarify::backends {

RemoteEndpoint::RemoteEndpoint(std::string base_url, std::string path, int timeout_seconds)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_seconds_(timeout_seconds) {}

nlohmann::json RemoteEndpoint::post(const nlohmann::json& body) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res)
    fail(ErrorCode::kBackendUnavailable,
         describe() + ": " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    fail(ErrorCode::kBackendUnavailable,
         describe() + ": HTTP " + std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kBackendUnavailable, describe() + ": malformed response: " + e.what());
  }
}

namespace {

template <typename T>
T field(const nlohmann::json& body, const char* name, const std::string& who) {
  try {
    return body.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kBackendUnavailable, who + ": response missing field \"" + name + "\"");
  }
}

}  // namespace

Generation RemoteGenerator::generate(const GenerationRequest& request) const {
  request.validate();
  nlohmann::json body = {{"prompt", request.prompt},
                         {"max_tokens", request.max_tokens},
                         {"top_p", request.top_p},
                         {"temperature", request.temperature}};
  if (request.seed) body["seed"] = *request.seed;
  const auto res = endpoint_.post(body);
  return {field<std::string>(res, "text", id()), res.value("truncated", false)};
}

std::array<double, 3> RemoteOracle::scores(std::string_view text) const {
  const auto res = endpoint_.post({{"text", std::string(text)}});
  return {field<double>(res, "bad", id()), field<double>(res, "ok", id()),
          field<double>(res, "good", id())};
}

NliLabel RemoteNli::classify(std::string_view premise, std::string_view hypothesis) const {
  const auto res =
      endpoint_.post({{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}});
  try {
    return nli_label_from_string(field<std::string>(res, "label", id()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kBackendUnavailable) throw;
    fail(ErrorCode::kBackendUnavailable, id() + ": " + e.what());
  }
}

bool RemoteQa::answerable(std::string_view context, const Question& question) const {
  const auto res = endpoint_.post({{"context", std::string(context)}, {"question", question.text}});
  return field<bool>(res, "answerable", id());
}

double RemoteSimilarity::score(std::string_view candidate, std::string_view reference) const {
  const auto res = endpoint_.post(
      {{"candidate", std::string(candidate)}, {"reference", std::string(reference)}});
  return field<double>(res, "score", id());
}

double RemoteRelevance::relevant_probability(const Situation& situation,
                                             const Question& question) const {
  const auto res =
      endpoint_.post({{"situation", situation.text()}, {"question", question.text}});
  return field<double>(res, "relevant", id());
}

}  // namespace clarify::backends
