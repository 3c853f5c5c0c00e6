/*
 * Copyright 2026 The selqa Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "selqa/report/metrics.hpp"

#include <algorithm>
#include <map>

namespace selqa::report {

int ExactMatch(const Span& pred, const Span& gold) {
  return pred == gold ? 1 : 0;
}

double TokenF1(std::span<const std::size_t> pred,
               std::span<const std::size_t> gold) {
  if (pred.empty() && gold.empty()) return 1.0;
  if (pred.empty() || gold.empty()) return 0.0;
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t t : gold) ++counts[t];
  std::size_t overlap = 0;
  for (std::size_t t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double r = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * p * r / (p + r);
}

SequenceScore SequenceAccuracy(std::span<const std::size_t> generated,
                               std::span<const std::size_t> target) {
  const std::size_t n = std::min(generated.size(), target.size());
  SequenceScore s;
  if (n == 0) {
    s.exact = generated.empty() && target.empty();
    s.token_accuracy = s.exact ? 1.0 : 0.0;
    return s;
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (generated[i] == target[i]) ++hits;
  }
  s.token_accuracy = static_cast<double>(hits) / static_cast<double>(n);
  s.exact = hits == n && generated.size() == target.size();
  return s;
}

}  // namespace selqa::report
