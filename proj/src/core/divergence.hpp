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

#include "core/types.hpp"

namespace clarify {

// Jensen-Shannon divergence in bits; bounded by [0, 1].
double jsd(const JudgmentDistribution& p, const JudgmentDistribution& q);

// Most probable class; exact ties go to the earliest class in bad < ok < good.
JudgmentClass argmax_judgment(const JudgmentDistribution& p);

}  // namespace clarify
