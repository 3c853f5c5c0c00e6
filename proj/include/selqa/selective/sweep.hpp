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

#ifndef SELQA_SELECTIVE_SWEEP_HPP_
#define SELQA_SELECTIVE_SWEEP_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selqa/selective/prediction.hpp"
#include "selqa/selective/threshold.hpp"

namespace selqa::selective {

// One method's scored calibration and test predictions.
struct MethodPredictions {
  std::string method;
  ScoreKind score = ScoreKind::kSigma;
  std::vector<ScoredPrediction> calib;
  std::vector<ScoredPrediction> test;
};

struct SweepCell {
  double gamma = kInfiniteGamma;
  double coverage = 0.0;
  std::optional<double> accuracy;
  bool degenerate = false;
};

// cells follow the order of the methods passed to Sweep.
struct SweepRow {
  double percentile = 0.0;
  // (100 - p) / 100, the column the thresholds aim for.
  double nominal_coverage = 1.0;
  std::vector<SweepCell> cells;
};

// {0, 10, ..., 80, 85, 90, 95, 98, 99, 99.9}
std::vector<double> DefaultGrid();

struct SweepOptions {
  std::string calib_hash;
  std::string test_hash;
  // Fit each threshold on the evaluated split itself.
  bool self_calibrate = false;
};

// Per grid percentile and method: fit on calibration (or test when
// self-calibrating), select on test, record coverage and accuracy.
// Throws ValidationError for grid values outside [0, 100), no methods, or
// methods scored on different test examples.
std::vector<SweepRow> Sweep(std::span<const MethodPredictions> methods,
                            std::span<const double> grid,
                            const SweepOptions& options);

}  // namespace selqa::selective

#endif  // SELQA_SELECTIVE_SWEEP_HPP_
