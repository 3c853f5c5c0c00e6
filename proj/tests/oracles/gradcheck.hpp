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

#ifndef SELQA_TESTS_GRADCHECK_HPP_
#define SELQA_TESTS_GRADCHECK_HPP_

#include <cstdint>
#include <string>

namespace selqa::oracle {

struct GradCheckResult {
  std::string description;
  std::size_t params_checked = 0;
  double max_relative_error = 0.0;
};

// Builds random small net number index (at most 3 hidden layers of at most
// 32 units; every third one multi-row with two heads, every other one with
// a log-sigma head trained through the sampling loss) and compares every
// analytic parameter gradient with a central difference of step h.
GradCheckResult CheckRandomNet(std::uint64_t index, double h = 1e-4);

}  // namespace selqa::oracle

#endif  // SELQA_TESTS_GRADCHECK_HPP_
