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

#ifndef SELQA_SELECTIVE_THRESHOLD_HPP_
#define SELQA_SELECTIVE_THRESHOLD_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "selqa/selective/prediction.hpp"

namespace selqa::selective {

inline constexpr double kInfiniteGamma = std::numeric_limits<double>::infinity();

struct ThresholdPolicy {
  double percentile = 0.0;
  double gamma = kInfiniteGamma;
  // Hash of the split the threshold was fitted on.
  std::string fitted_on;
  ScoreKind score = ScoreKind::kSigma;
  // Ties made the requested coverage unreachable by more than one item.
  bool degenerate = false;

  nlohmann::json ToJson() const;
  static ThresholdPolicy FromJson(const nlohmann::json& j);

  friend bool operator==(const ThresholdPolicy&,
                         const ThresholdPolicy&) = default;
};

// Nearest-rank fit: gamma is the smallest candidate (a calibration score or
// +inf) whose strict-inequality selection count on the calibration scores
// is closest to (100 - p)% of them; ties go to the smaller count. Throws
// ValidationError for empty scores or p outside [0, 100).
ThresholdPolicy FitThreshold(std::span<const double> scores, double percentile,
                             ScoreKind kind = ScoreKind::kSigma,
                             std::string fitted_on = "");

struct Selection {
  std::vector<ScoredPrediction> selected;
  std::vector<std::uint64_t> abstained;
};

// Keeps predictions with score < gamma in their original order. Throws
// ValidationError when preds_split_hash equals the policy's fitted_on hash,
// unless allow_same_split is set.
Selection Select(std::span<const ScoredPrediction> preds,
                 const ThresholdPolicy& policy,
                 const std::string& preds_split_hash,
                 bool allow_same_split = false);

struct CoverageAccuracy {
  double coverage = 0.0;
  std::optional<double> accuracy;  // empty when nothing was selected
};

// Throws ValidationError for total == 0 or a selected prediction without a
// correctness flag.
CoverageAccuracy ComputeCoverageAccuracy(
    std::span<const ScoredPrediction> selected, std::size_t total);

}  // namespace selqa::selective

#endif  // SELQA_SELECTIVE_THRESHOLD_HPP_
