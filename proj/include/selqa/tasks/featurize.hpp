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

#ifndef SELQA_TASKS_FEATURIZE_HPP_
#define SELQA_TASKS_FEATURIZE_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "selqa/nn/tensor.hpp"
#include "selqa/nn/train.hpp"
#include "selqa/tasks/spec.hpp"

namespace selqa::tasks {

// Per-row input width: 2 (classification), 5V + 5 (extractive), 2V
// (generative).
std::size_t FeatureDim(const TaskSpec& spec);
// Model rows per example: context_len for extractive, otherwise 1.
std::size_t RowsPerExample(const TaskSpec& spec);
// Output heads: {K}, {1, 1} (start and end scores per position), {V}.
std::vector<std::size_t> HeadDims(const TaskSpec& spec);

nn::Tensor FeaturizeClassification(const ClassificationExample& ex);

// One row per context position: one-hot token, one-hot tokens at offsets
// -2, -1, +1, +2, then five flags telling whether the token at each offset
// in [-2, 2] appears among the question's marker tokens.
nn::Tensor FeaturizeExtractive(const ExtractiveExample& ex,
                               const TaskSpec& spec);

// One-hot of the last two tokens. Throws ValidationError for fewer than two
// tokens or an id outside the vocabulary.
nn::Tensor FeaturizeGenerative(std::span<const std::size_t> prefix,
                               const TaskSpec& spec);

// Stacked inference rows for every example (generative: the prompt state).
nn::Tensor FeaturizeAll(const Dataset& ds);

// Training rows and labels. Generative examples contribute one row per
// transition of prompt + target.
nn::TrainingSet BuildTrainingSet(const Dataset& ds);

// All (start, end) with start <= end < context_len and
// end - start + 1 <= max_span_len, in lexicographic order.
std::vector<std::pair<std::size_t, std::size_t>> EnumerateSpans(
    std::size_t context_len, std::size_t max_span_len);

}  // namespace selqa::tasks

#endif  // SELQA_TASKS_FEATURIZE_HPP_
