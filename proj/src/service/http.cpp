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

#include "service/http.hpp"

#include <httplib.h>

#include "core/error.hpp"

namespace clarify::service {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSchema: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kTurnLimitExceeded: return 409;
    case ErrorCode::kBackendUnavailable: return 503;
    case ErrorCode::kIo:
    case ErrorCode::kNonFinite: return 500;
  }
  return 500;
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Handler>
auto guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      reply(res, http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
    } catch (const json::exception& e) {
      reply(res, 400, {{"error", "invalid-argument"}, {"message", e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
    }
  };
}

std::string string_field(const httplib::Request& req, const char* name) {
  const auto body = json::parse(req.body);
  if (!body.is_object() || !body.contains(name) || !body[name].is_string())
    fail(ErrorCode::kInvalidArgument, std::string("request needs a string \"") + name + "\"");
  return body[name].get<std::string>();
}

json question_or_null(const SessionState& st) {
  return st.next_question ? json(st.next_question->text) : json(nullptr);
}

}  // namespace

HttpService::HttpService(SessionManager& sessions)
    : sessions_(sessions), server_(std::make_unique<httplib::Server>()) {
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server_->Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server_->Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto st = sessions_.create_session(string_field(req, "situation"));
    reply(res, 201, {{"session_id", st.session_id},
                     {"judgment", to_json(st.initial_judgment)},
                     {"question", question_or_null(st)}});
  }));

  server_->Post(R"(/sessions/([^/]+)/answer)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto st = sessions_.answer_turn(req.matches[1], string_field(req, "answer"));
                  reply(res, 200, {{"judgment", to_json(st.latest_judgment())},
                                   {"question", question_or_null(st)},
                                   {"terminal", st.terminal}});
                }));

  server_->Get(R"(/sessions/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 reply(res, 200, sessions_.get_session(req.matches[1]).to_json());
               }));
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpService::bind_to_any_port(const std::string& host) {
  return server_->bind_to_any_port(host);
}

bool HttpService::bind_to_port(const std::string& host, int port) {
  return server_->bind_to_port(host, port);
}

bool HttpService::listen_after_bind() { return server_->listen_after_bind(); }

void HttpService::stop() {
  if (server_) server_->stop();
}

void HttpService::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace clarify::service
