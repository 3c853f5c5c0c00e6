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

#include "selqa/selective/risk.hpp"

#include <algorithm>
#include <numeric>

#include "selqa/nn/error.hpp"

namespace selqa::selective {

RiskCoverageCurve ComputeRiskCoverage(std::span<const ScoredPrediction> preds,
                                      ScoreKind kind) {
  if (preds.size() < 2) {
    throw ValidationError("risk-coverage needs at least two predictions");
  }
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = preds[a].Score(kind);
    const double sb = preds[b].Score(kind);
    if (sa != sb) return sa < sb;
    return preds[a].example_id < preds[b].example_id;
  });
  RiskCoverageCurve curve;
  const double n = static_cast<double>(preds.size());
  std::size_t wrong = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& p = preds[order[k]];
    if (!p.correct) throw ValidationError("prediction lacks a correctness flag");
    if (!*p.correct) ++wrong;
    const double size = static_cast<double>(k + 1);
    const double risk = static_cast<double>(wrong) / size;
    curve.points.push_back({size / n, risk});
    area += risk;
  }
  curve.aurc = area / n;
  return curve;
}

double Auroc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) {
    throw ValidationError("auroc: score and label counts differ");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with average ranks for ties.
  double rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (positive[order[k]]) {
        rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("auroc needs both positive and negative examples");
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

}  // namespace selqa::selective
