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

#ifndef SELQA_NN_FUNCTIONAL_HPP_
#define SELQA_NN_FUNCTIONAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace selqa::nn {

// Lower clamp applied to probabilities before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

// Max-subtracted softmax. Throws ValidationError on non-finite logits or an
// empty row.
std::vector<double> Softmax(std::span<const double> logits);
void SoftmaxInPlace(std::span<double> row);

// -log(max(p[label], 1e-12)). Throws ValidationError if label is out of range.
double CrossEntropy(std::span<const double> probs, std::size_t label);

// Index of the first maximum.
std::size_t Argmax(std::span<const double> v);

}  // namespace selqa::nn

#endif  // SELQA_NN_FUNCTIONAL_HPP_
