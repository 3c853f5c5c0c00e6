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

#ifndef SELQA_UQ_CALIBRATION_HPP_
#define SELQA_UQ_CALIBRATION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace selqa::uq {

struct ScoreMoments {
  double mean = 0.0;
  double std = 0.0;  // population (divide by n)
};

// Throws ValidationError on an empty span.
ScoreMoments PopulationMoments(std::span<const double> scores);

// Normalization constants for the composed score, one set per model head.
struct CalibrationStats {
  struct Head {
    double aleatoric_mean = 0.0;
    double aleatoric_std = 1.0;
    double epistemic_mean = 0.0;
    double epistemic_std = 1.0;

    friend bool operator==(const Head&, const Head&) = default;
  };
  std::vector<Head> heads;

  nlohmann::json ToJson() const;
  static CalibrationStats FromJson(const nlohmann::json& j);

  friend bool operator==(const CalibrationStats&,
                         const CalibrationStats&) = default;
};

inline constexpr std::size_t kMinCalibrationExamples = 10;

// Fits stats from per-head score columns. Throws ValidationError for fewer
// than kMinCalibrationExamples scores or a zero standard deviation.
CalibrationStats CalibrationFromScores(
    const std::vector<std::vector<double>>& aleatoric,
    const std::vector<std::vector<double>>& epistemic);

}  // namespace selqa::uq

#endif  // SELQA_UQ_CALIBRATION_HPP_
