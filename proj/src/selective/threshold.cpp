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

#include "selqa/selective/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "selqa/nn/error.hpp"

namespace selqa::selective {

nlohmann::json ThresholdPolicy::ToJson() const {
  return {{"percentile", percentile},
          {"gamma", std::isinf(gamma) ? nlohmann::json("+inf")
                                      : nlohmann::json(gamma)},
          {"fitted_on", fitted_on},
          {"score", ScoreKindName(score)},
          {"degenerate", degenerate}};
}

ThresholdPolicy ThresholdPolicy::FromJson(const nlohmann::json& j) {
  ThresholdPolicy p;
  try {
    p.percentile = j.at("percentile").get<double>();
    const auto& g = j.at("gamma");
    p.gamma = g.is_string() ? kInfiniteGamma : g.get<double>();
    p.fitted_on = j.at("fitted_on").get<std::string>();
    const auto kind = ParseScoreKind(j.at("score").get<std::string>());
    if (!kind) throw ValidationError("unknown score kind");
    p.score = *kind;
    p.degenerate = j.at("degenerate").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed threshold policy: ") +
                          e.what());
  }
  return p;
}

ThresholdPolicy FitThreshold(std::span<const double> scores, double percentile,
                             ScoreKind kind, std::string fitted_on) {
  if (scores.empty()) throw ValidationError("no calibration scores");
  if (!(percentile >= 0.0 && percentile < 100.0)) {
    throw ValidationError("percentile must be in [0, 100)");
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double target = (100.0 - percentile) / 100.0 * static_cast<double>(n);

  // Candidate gamma = sorted[i] keeps the i items strictly below it when
  // sorted[i] starts a run of ties; +inf keeps all n.
  double best_gamma = kInfiniteGamma;
  std::size_t best_count = n;
  double best_err = std::abs(static_cast<double>(n) - target);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    const double err = std::abs(static_cast<double>(i) - target);
    if (err < best_err || (err == best_err && i < best_count)) {
      best_err = err;
      best_count = i;
      best_gamma = sorted[i];
    }
  }
  ThresholdPolicy p;
  p.percentile = percentile;
  p.gamma = best_gamma;
  p.fitted_on = std::move(fitted_on);
  p.score = kind;
  p.degenerate = best_err > 1.0;
  return p;
}

Selection Select(std::span<const ScoredPrediction> preds,
                 const ThresholdPolicy& policy,
                 const std::string& preds_split_hash, bool allow_same_split) {
  if (!allow_same_split && !policy.fitted_on.empty() &&
      policy.fitted_on == preds_split_hash) {
    throw ValidationError(
        "threshold was fitted on the evaluated split (hash " +
        preds_split_hash + "); refusing to select on calibration data");
  }
  Selection s;
  for (const auto& p : preds) {
    if (p.Score(policy.score) < policy.gamma) {
      s.selected.push_back(p);
    } else {
      s.abstained.push_back(p.example_id);
    }
  }
  return s;
}

CoverageAccuracy ComputeCoverageAccuracy(
    std::span<const ScoredPrediction> selected, std::size_t total) {
  if (total == 0) throw ValidationError("coverage needs total_count >= 1");
  CoverageAccuracy out;
  out.coverage = static_cast<double>(selected.size()) / static_cast<double>(total);
  if (selected.empty()) return out;
  std::size_t correct = 0;
  for (const auto& p : selected) {
    if (!p.correct) throw ValidationError("prediction lacks a correctness flag");
    if (*p.correct) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(selected.size());
  return out;
}

}  // namespace selqa::selective
