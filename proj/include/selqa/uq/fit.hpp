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

#ifndef SELQA_UQ_FIT_HPP_
#define SELQA_UQ_FIT_HPP_

#include <vector>

#include "selqa/nn/train.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::uq {

// Per parameter set, the epoch losses of its training run.
using FitLog = std::vector<std::vector<nn::EpochLog>>;

// Trains every parameter set of a converted model with its method's loss:
//  baseline, mc_dropout  cross-entropy, dropout active at the spec's rates;
//  ensemble              each member with its own shuffling/dropout seed;
//  mve, composed         cross-entropy of the sampled logits, dropout active.
FitLog Fit(ConvertedModel& model, const nn::TrainingSet& data,
           const nn::TrainConfig& config);

}  // namespace selqa::uq

#endif  // SELQA_UQ_FIT_HPP_
