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

#ifndef SELQA_SELECTIVE_PREDICTION_HPP_
#define SELQA_SELECTIVE_PREDICTION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace selqa::selective {

// Which per-prediction number a threshold is fitted on. Both follow the
// smaller-is-more-confident convention.
enum class ScoreKind { kSigma, kOneMinusConfidence };

std::string_view ScoreKindName(ScoreKind kind);
std::optional<ScoreKind> ParseScoreKind(std::string_view name);

struct ScoredPrediction {
  std::uint64_t example_id = 0;
  // Class index, [start, end] span, or token list.
  nlohmann::json answer;
  double sigma = 0.0;
  double confidence = 0.0;
  std::optional<bool> correct;

  double Score(ScoreKind kind) const {
    return kind == ScoreKind::kSigma ? sigma : 1.0 - confidence;
  }

  friend bool operator==(const ScoredPrediction&,
                         const ScoredPrediction&) = default;
};

std::vector<double> Scores(std::span<const ScoredPrediction> preds,
                           ScoreKind kind);

nlohmann::json ToJson(const ScoredPrediction& p);
ScoredPrediction PredictionFromJson(const nlohmann::json& j);

std::string PredictionsToJsonl(std::span<const ScoredPrediction> preds);
// Throws ValidationError on malformed lines.
std::vector<ScoredPrediction> PredictionsFromJsonl(const std::string& text);

}  // namespace selqa::selective

#endif  // SELQA_SELECTIVE_PREDICTION_HPP_
