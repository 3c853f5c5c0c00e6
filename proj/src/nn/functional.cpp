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

#include "selqa/nn/functional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selqa/nn/error.hpp"

namespace selqa::nn {

void SoftmaxInPlace(std::span<double> row) {
  if (row.empty()) throw ValidationError("softmax of an empty row");
  double mx = row[0];
  for (double v : row) {
    if (!std::isfinite(v)) throw ValidationError("softmax of non-finite logit");
    mx = std::max(mx, v);
  }
  double sum = 0.0;
  for (double& v : row) {
    v = std::exp(v - mx);
    sum += v;
  }
  const double inv = 1.0 / sum;
  for (double& v : row) v *= inv;
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> p(logits.begin(), logits.end());
  SoftmaxInPlace(p);
  return p;
}

double CrossEntropy(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw ValidationError("cross_entropy: label " + std::to_string(label) +
                          " out of range for " + std::to_string(probs.size()) +
                          " classes");
  }
  return -std::log(std::max(probs[label], kProbabilityFloor));
}

std::size_t Argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace selqa::nn
