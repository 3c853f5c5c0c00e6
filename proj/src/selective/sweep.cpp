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

#include "selqa/selective/sweep.hpp"

#include "selqa/nn/error.hpp"

namespace selqa::selective {

std::vector<double> DefaultGrid() {
  return {0, 10, 20, 30, 40, 50, 60, 70, 80, 85, 90, 95, 98, 99, 99.9};
}

namespace {

bool SameIds(const std::vector<ScoredPrediction>& a,
             const std::vector<ScoredPrediction>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].example_id != b[i].example_id) return false;
  }
  return true;
}

}  // namespace

std::vector<SweepRow> Sweep(std::span<const MethodPredictions> methods,
                            std::span<const double> grid,
                            const SweepOptions& options) {
  if (methods.empty()) throw ValidationError("sweep needs at least one method");
  for (double p : grid) {
    if (!(p >= 0.0 && p < 100.0)) {
      throw ValidationError("grid percentile " + std::to_string(p) +
                            " outside [0, 100)");
    }
  }
  for (const auto& m : methods) {
    if (!SameIds(m.test, methods.front().test)) {
      throw ValidationError("method " + m.method +
                            " was scored on a different test set");
    }
    if (m.test.empty()) throw ValidationError("empty test predictions");
  }

  std::vector<SweepRow> rows;
  for (double p : grid) {
    SweepRow row;
    row.percentile = p;
    row.nominal_coverage = (100.0 - p) / 100.0;
    for (const auto& m : methods) {
      const auto& fit_set = options.self_calibrate ? m.test : m.calib;
      const std::string fit_hash =
          options.self_calibrate ? options.test_hash : options.calib_hash;
      const auto scores = Scores(fit_set, m.score);
      const ThresholdPolicy policy = FitThreshold(scores, p, m.score, fit_hash);
      const Selection sel = Select(m.test, policy, options.test_hash,
                                   options.self_calibrate);
      const CoverageAccuracy ca =
          ComputeCoverageAccuracy(sel.selected, m.test.size());
      row.cells.push_back(
          {policy.gamma, ca.coverage, ca.accuracy, policy.degenerate});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace selqa::selective
