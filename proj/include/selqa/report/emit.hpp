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

#ifndef SELQA_REPORT_EMIT_HPP_
#define SELQA_REPORT_EMIT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "selqa/report/bench.hpp"
#include "selqa/report/csv.hpp"
#include "selqa/selective/risk.hpp"
#include "selqa/selective/sweep.hpp"

namespace selqa::report {

// Full-coverage accuracy of one method. exact_match and f1 are set for the
// extractive task; token_accuracy for the generative one.
struct NominalRow {
  std::string method;
  double accuracy = 0.0;
  std::optional<double> exact_match;
  std::optional<double> f1;
  std::optional<double> token_accuracy;
};

struct EvalReport {
  std::string task;
  std::vector<std::string> methods;  // sweep cell order
  std::vector<NominalRow> nominal;
  std::vector<selective::SweepRow> sweep;
  std::vector<EfficiencyRow> efficiency;
  std::vector<std::uint64_t> seeds;
  std::string config_hash;
};

struct MethodCurve {
  std::string method;
  selective::RiskCoverageCurve curve;
};

// percentile, coverage (nominal), then one accuracy column per method;
// empty cells for undefined accuracy.
CsvTable SweepTable(const std::vector<std::string>& methods,
                    const std::vector<selective::SweepRow>& rows);
// Inverse of SweepTable for the columns it carries.
std::vector<selective::SweepRow> ParseSweepTable(const CsvTable& table,
                                                 std::vector<std::string>* methods);
// percentile, method, gamma, coverage (realized), accuracy, degenerate.
CsvTable SweepDetailTable(const std::vector<std::string>& methods,
                          const std::vector<selective::SweepRow>& rows);
CsvTable NominalTable(const std::vector<NominalRow>& rows);
std::vector<NominalRow> ParseNominalTable(const CsvTable& table);

std::string AccuracySvg(const EvalReport& report);
std::string RiskCoverageSvg(const std::vector<MethodCurve>& curves,
                            const std::string& note);

nlohmann::json ReportToJson(const EvalReport& report);

// Writes sweep.csv, sweep_detail.csv, nominal.csv, efficiency.csv (when
// rows exist), accuracy.svg, risk_coverage.svg and report.json into dir.
// Throws ValidationError for an empty method set and RuntimeError naming
// the path when dir cannot be written.
std::vector<std::filesystem::path> EmitOutputs(
    const EvalReport& report, const std::vector<MethodCurve>& curves,
    const std::filesystem::path& dir);

}  // namespace selqa::report

#endif  // SELQA_REPORT_EMIT_HPP_
