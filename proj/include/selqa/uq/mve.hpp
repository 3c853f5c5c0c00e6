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

#ifndef SELQA_UQ_MVE_HPP_
#define SELQA_UQ_MVE_HPP_

#include <cstdint>
#include <vector>

#include "selqa/nn/rng.hpp"
#include "selqa/nn/train.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::uq {

struct MveStepOptions {
  // Replaces every noise draw with 0 (test hook).
  bool zero_noise = false;
  // Index of the first example of this batch in the caller's numbering,
  // used only to report the offending example on a non-finite loss.
  std::size_t example_offset = 0;
};

// One loss evaluation for a model carrying a log-sigma head: T noisy logit
// samples mu + sigma * eps per row, aggregated per model.aggregation, then
// cross-entropy, summed over heads. Gradients are accumulated into params.
// Throws RuntimeError naming the example on a non-finite loss.
double MveLossStep(const ConvertedModel& model, nn::ParamStore& params,
                   const nn::Batch& batch, const nn::RngStream& rng,
                   std::uint64_t step, const MveStepOptions& options = {});

}  // namespace selqa::uq

#endif  // SELQA_UQ_MVE_HPP_
