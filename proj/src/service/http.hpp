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

#include <memory>
#include <string>

#include "core/error.hpp"
#include "service/sessions.hpp"

namespace httplib {
class Server;
}

namespace clarify::service {

int http_status(ErrorCode code);

/// HTTP+JSON front end over a SessionManager:
///   POST /sessions              {situation} -> {session_id, judgment, question}
///   POST /sessions/{id}/answer  {answer}    -> {judgment, question?, terminal}
///   GET  /sessions/{id}                     -> full session state
class HttpService {
 public:
  explicit HttpService(SessionManager& sessions);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it; follow with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  // Binds a fixed port; false when it is taken.
  bool bind_to_port(const std::string& host, int port);
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  SessionManager& sessions_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace clarify::service
