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

#ifndef SELQA_SELECTIVE_RISK_HPP_
#define SELQA_SELECTIVE_RISK_HPP_

#include <span>
#include <vector>

#include "selqa/selective/prediction.hpp"

namespace selqa::selective {

struct RiskPoint {
  double coverage = 0.0;
  double risk = 0.0;
};

struct RiskCoverageCurve {
  std::vector<RiskPoint> points;  // one per prefix size 1..n
  double aurc = 0.0;              // mean risk over the prefixes
};

// Orders predictions by ascending score (ties by example id) and records
// the risk of every prefix. Throws ValidationError for fewer than two
// predictions or a missing correctness flag.
RiskCoverageCurve ComputeRiskCoverage(std::span<const ScoredPrediction> preds,
                                      ScoreKind kind = ScoreKind::kSigma);

// Plain AUROC of score against a binary label (positives should score
// higher); ties count one half.
double Auroc(std::span<const double> scores, std::span<const bool> positive);

}  // namespace selqa::selective

#endif  // SELQA_SELECTIVE_RISK_HPP_
