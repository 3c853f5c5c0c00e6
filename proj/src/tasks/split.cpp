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

#include "selqa/tasks/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "selqa/nn/error.hpp"
#include "selqa/nn/rng.hpp"

namespace selqa::tasks {

Splits SplitDataset(const Dataset& ds, const SplitRatios& ratios,
                    std::uint64_t seed) {
  if (!(ratios.train > 0.0 && ratios.calib > 0.0 && ratios.test > 0.0)) {
    throw ValidationError("split ratios must all be positive");
  }
  if (std::abs(ratios.train + ratios.calib + ratios.test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }
  std::vector<std::size_t> in, ood;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.IsOod(i) ? ood : in).push_back(i);
  }
  nn::RngStream rng(seed, nn::Tag("split"));
  for (std::size_t i = in.size(); i > 1; --i) {
    std::swap(in[i - 1], in[rng.UniformIndex(i)]);
  }
  const auto n = static_cast<double>(in.size());
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * n));
  const auto n_calib = std::min(
      in.size() - std::min(in.size(), n_train),
      static_cast<std::size_t>(std::llround(ratios.calib * n)));
  std::vector<std::size_t> train(in.begin(),
                                 in.begin() + std::min(n_train, in.size()));
  std::vector<std::size_t> calib(in.begin() + train.size(),
                                 in.begin() + train.size() + n_calib);
  std::vector<std::size_t> test(in.begin() + train.size() + n_calib, in.end());
  test.insert(test.end(), ood.begin(), ood.end());
  if (train.empty() || calib.empty() || test.empty()) {
    throw ValidationError("split of " + std::to_string(ds.size()) +
                          " examples leaves an empty split (train " +
                          std::to_string(train.size()) + ", calib " +
                          std::to_string(calib.size()) + ", test " +
                          std::to_string(test.size()) + ")");
  }
  std::sort(train.begin(), train.end());
  std::sort(calib.begin(), calib.end());
  std::sort(test.begin(), test.end());
  return {ds.Subset(train), ds.Subset(calib), ds.Subset(test)};
}

}  // namespace selqa::tasks
