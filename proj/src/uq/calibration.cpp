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

#include "selqa/uq/calibration.hpp"

#include <cmath>
#include <string>

#include "selqa/nn/error.hpp"

namespace selqa::uq {

ScoreMoments PopulationMoments(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("moments of an empty score set");
  double mean = 0.0, m2 = 0.0;
  std::size_t n = 0;
  for (double s : scores) {
    ++n;
    const double d = s - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (s - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(n))};
}

nlohmann::json CalibrationStats::ToJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& h : heads) {
    arr.push_back({{"aleatoric_mean", h.aleatoric_mean},
                   {"aleatoric_std", h.aleatoric_std},
                   {"epistemic_mean", h.epistemic_mean},
                   {"epistemic_std", h.epistemic_std}});
  }
  return {{"heads", arr}};
}

CalibrationStats CalibrationStats::FromJson(const nlohmann::json& j) {
  CalibrationStats stats;
  try {
    for (const auto& h : j.at("heads")) {
      stats.heads.push_back({h.at("aleatoric_mean").get<double>(),
                             h.at("aleatoric_std").get<double>(),
                             h.at("epistemic_mean").get<double>(),
                             h.at("epistemic_std").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed calibration stats: ") + e.what());
  }
  return stats;
}

CalibrationStats CalibrationFromScores(
    const std::vector<std::vector<double>>& aleatoric,
    const std::vector<std::vector<double>>& epistemic) {
  if (aleatoric.size() != epistemic.size() || aleatoric.empty()) {
    throw ValidationError("calibration needs one score column per head");
  }
  CalibrationStats stats;
  for (std::size_t h = 0; h < aleatoric.size(); ++h) {
    const std::size_t n = aleatoric[h].size();
    if (n < kMinCalibrationExamples || epistemic[h].size() != n) {
      throw ValidationError("calibration needs at least " +
                            std::to_string(kMinCalibrationExamples) +
                            " examples, got " + std::to_string(n));
    }
    const ScoreMoments a = PopulationMoments(aleatoric[h]);
    const ScoreMoments e = PopulationMoments(epistemic[h]);
    if (!(a.std > 0.0) || !(e.std > 0.0)) {
      throw ValidationError(
          "degenerate calibration set: zero standard deviation for head " +
          std::to_string(h));
    }
    stats.heads.push_back({a.mean, a.std, e.mean, e.std});
  }
  return stats;
}

}  // namespace selqa::uq
