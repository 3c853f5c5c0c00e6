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

#ifndef SELQA_REPORT_METRICS_HPP_
#define SELQA_REPORT_METRICS_HPP_

#include <cstddef>
#include <span>
#include <utility>

namespace selqa::report {

using Span = std::pair<std::size_t, std::size_t>;

// 1 iff start and end both match.
int ExactMatch(const Span& pred, const Span& gold);

// Multiset-overlap F1. Both empty gives 1; exactly one empty gives 0.
double TokenF1(std::span<const std::size_t> pred,
               std::span<const std::size_t> gold);

struct SequenceScore {
  double token_accuracy = 0.0;
  bool exact = false;
};

// Position-wise match over the common window (the shorter length); an
// empty window scores 1 when both are empty and 0 otherwise.
SequenceScore SequenceAccuracy(std::span<const std::size_t> generated,
                               std::span<const std::size_t> target);

}  // namespace selqa::report

#endif  // SELQA_REPORT_METRICS_HPP_
