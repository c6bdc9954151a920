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

#include "core/error.hpp"

namespace clarify {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kBackendUnavailable: return "backend-unavailable";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kTurnLimitExceeded: return "turn-limit-exceeded";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kSchema: return "schema-violation";
    case ErrorCode::kNonFinite: return "non-finite";
  }
  return "unknown";
}

}  // namespace clarify
