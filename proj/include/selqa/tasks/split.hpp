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

#ifndef SELQA_TASKS_SPLIT_HPP_
#define SELQA_TASKS_SPLIT_HPP_

#include <cstdint>

#include "selqa/tasks/spec.hpp"

namespace selqa::tasks {

struct SplitRatios {
  double train = 0.6;
  double calib = 0.2;
  double test = 0.2;

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct Splits {
  Dataset train;
  Dataset calib;
  Dataset test;
};

// Seeded shuffle of the in-distribution examples; train and calib take
// round(ratio * n_in) examples, test takes the rest plus every OOD example.
// Each split keeps the original relative order of its members. Throws
// ValidationError for non-positive ratios, ratios not summing to 1 within
// 1e-9, or any empty split.
Splits SplitDataset(const Dataset& ds, const SplitRatios& ratios,
                    std::uint64_t seed);

}  // namespace selqa::tasks

#endif  // SELQA_TASKS_SPLIT_HPP_
