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

#include "core/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace clarify {

namespace {

// KL(p || m) in bits, with 0 * log(0 / m) taken as 0.
double kl_to_mixture(const std::array<double, 3>& p, const std::array<double, 3>& m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) acc += p[i] * std::log2(p[i] / m[i]);
  }
  return acc;
}

}  // namespace

double jsd(const JudgmentDistribution& p, const JudgmentDistribution& q) {
  const auto& a = p.probabilities();
  const auto& b = q.probabilities();
  if (a == b) return 0.0;
  std::array<double, 3> m{};
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
  // Sum the halves in a fixed order so the result is bitwise symmetric.
  const double ka = kl_to_mixture(a, m);
  const double kb = kl_to_mixture(b, m);
  const double d = 0.5 * (std::min(ka, kb) + std::max(ka, kb));
  return std::clamp(d, 0.0, 1.0);
}

JudgmentClass argmax_judgment(const JudgmentDistribution& p) {
  const auto& probs = p.probabilities();
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return static_cast<JudgmentClass>(best);
}

}  // namespace clarify
