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

#ifndef SELQA_CLI_SCORING_HPP_
#define SELQA_CLI_SCORING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "selqa/nn/rng.hpp"
#include "selqa/selective/generation.hpp"
#include "selqa/selective/prediction.hpp"
#include "selqa/tasks/spec.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::cli {

struct ScoreOptions {
  nn::RngStream rng;
  std::size_t workers = 1;
  // Generative task: sequence length and sigma reduction.
  selective::GenerateOptions generate;
};

// Predictions plus the task's soft metrics, aligned with preds.
struct ScoredSet {
  std::vector<selective::ScoredPrediction> preds;
  std::vector<double> f1;              // extractive
  std::vector<double> token_accuracy;  // generative
};

// Baselines rank by 1 - confidence, all other methods by sigma.
selective::ScoreKind ScoreKindFor(const uq::ConvertedModel& model);

// Per-row dropout keys: example ids, or RowKey(id, position) for spans.
std::vector<std::uint64_t> RowKeys(const tasks::Dataset& ds);

// Scores every example. Examples are split into contiguous chunks across
// workers; all randomness is keyed by example id, so the result does not
// depend on the worker count.
//  classification  answer = class; correct = matches the observed label
//  extractive      answer = best [start, end] under start + end logits;
//                  sigma = per-position uncertainty of start plus end
//  generative      answer = one sampled continuation; correct = exact match
ScoredSet ScoreDataset(const uq::ConvertedModel& model, const tasks::Dataset& ds,
                       const ScoreOptions& options);

// Composed-score constants from a calibration split.
uq::CalibrationStats CalibrateComposed(const uq::ConvertedModel& model,
                                       const tasks::Dataset& calib,
                                       const ScoreOptions& options);

// Splits [0, n) into at most workers contiguous chunks and runs
// fn(chunk, begin, end) for each on its own thread. Returns the chunk count.
// The first exception thrown by any chunk is rethrown after all finish.
std::size_t RunChunks(
    std::size_t n, std::size_t workers,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace selqa::cli

#endif  // SELQA_CLI_SCORING_HPP_
