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

#include "selqa/report/emit.hpp"

#include <algorithm>
#include <cmath>

#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/report/svg.hpp"

namespace selqa::report {

CsvTable SweepTable(const std::vector<std::string>& methods,
                    const std::vector<selective::SweepRow>& rows) {
  CsvTable t;
  t.header = {"percentile", "coverage"};
  for (const auto& m : methods) t.header.push_back(m);
  for (const auto& r : rows) {
    if (r.cells.size() != methods.size()) {
      throw ValidationError("sweep row has the wrong number of methods");
    }
    std::vector<std::string> f = {FormatNumber(r.percentile),
                                  FormatNumber(r.nominal_coverage)};
    for (const auto& c : r.cells) f.push_back(FormatOptional(c.accuracy));
    t.rows.push_back(std::move(f));
  }
  return t;
}

std::vector<selective::SweepRow> ParseSweepTable(
    const CsvTable& table, std::vector<std::string>* methods) {
  if (table.header.size() < 3 || table.header[0] != "percentile" ||
      table.header[1] != "coverage") {
    throw ValidationError("unexpected sweep table header");
  }
  if (methods != nullptr) {
    methods->assign(table.header.begin() + 2, table.header.end());
  }
  std::vector<selective::SweepRow> rows;
  for (const auto& f : table.rows) {
    selective::SweepRow r;
    r.percentile = ParseNumber(f[0]);
    r.nominal_coverage = ParseNumber(f[1]);
    for (std::size_t i = 2; i < f.size(); ++i) {
      selective::SweepCell c;
      c.accuracy = ParseOptional(f[i]);
      r.cells.push_back(c);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

CsvTable SweepDetailTable(const std::vector<std::string>& methods,
                          const std::vector<selective::SweepRow>& rows) {
  CsvTable t;
  t.header = {"percentile", "method", "gamma", "coverage", "accuracy",
              "degenerate"};
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < methods.size() && i < r.cells.size(); ++i) {
      const auto& c = r.cells[i];
      t.rows.push_back({FormatNumber(r.percentile), methods[i],
                        FormatNumber(c.gamma), FormatNumber(c.coverage),
                        FormatOptional(c.accuracy),
                        c.degenerate ? "1" : "0"});
    }
  }
  return t;
}

CsvTable NominalTable(const std::vector<NominalRow>& rows) {
  CsvTable t;
  t.header = {"method", "accuracy", "exact_match", "f1", "token_accuracy"};
  for (const auto& r : rows) {
    t.rows.push_back({r.method, FormatNumber(r.accuracy),
                      FormatOptional(r.exact_match), FormatOptional(r.f1),
                      FormatOptional(r.token_accuracy)});
  }
  return t;
}

std::vector<NominalRow> ParseNominalTable(const CsvTable& table) {
  if (table.header != NominalTable({}).header) {
    throw ValidationError("unexpected nominal table header");
  }
  std::vector<NominalRow> rows;
  for (const auto& f : table.rows) {
    rows.push_back({f[0], ParseNumber(f[1]), ParseOptional(f[2]),
                    ParseOptional(f[3]), ParseOptional(f[4])});
  }
  return rows;
}

std::string AccuracySvg(const EvalReport& report) {
  std::vector<Series> series;
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    Series s;
    s.name = report.methods[m];
    for (const auto& r : report.sweep) {
      s.points.emplace_back(r.percentile, r.cells[m].accuracy);
    }
    series.push_back(std::move(s));
  }
  PlotSpec plot;
  plot.title = "Selective accuracy by confidence percentile (" + report.task + ")";
  plot.x_label = "confidence percentile p";
  plot.y_label = "accuracy on answered questions";
  plot.x_max = 100.0;
  plot.note = "config " + report.config_hash;
  return LinePlotSvg(plot, series);
}

std::string RiskCoverageSvg(const std::vector<MethodCurve>& curves,
                            const std::string& note) {
  std::vector<Series> series;
  double y_max = 0.0;
  for (const auto& c : curves) {
    for (const auto& p : c.curve.points) y_max = std::max(y_max, p.risk);
  }
  y_max = y_max > 0.0 ? std::min(1.0, y_max * 1.1) : 1.0;
  for (const auto& c : curves) {
    Series s;
    s.name = c.method + " (AURC " + FormatNumber(std::round(c.curve.aurc * 1e4) / 1e4) + ")";
    for (const auto& p : c.curve.points) s.points.emplace_back(p.coverage, p.risk);
    series.push_back(std::move(s));
  }
  PlotSpec plot;
  plot.title = "Risk versus coverage";
  plot.x_label = "coverage";
  plot.y_label = "risk (1 - accuracy)";
  plot.y_max = y_max;
  plot.note = note;
  return LinePlotSvg(plot, series);
}

nlohmann::json ReportToJson(const EvalReport& report) {
  nlohmann::json nominal = nlohmann::json::array();
  for (const auto& r : report.nominal) {
    nlohmann::json j = {{"method", r.method}, {"accuracy", r.accuracy}};
    if (r.exact_match) j["exact_match"] = *r.exact_match;
    if (r.f1) j["f1"] = *r.f1;
    if (r.token_accuracy) j["token_accuracy"] = *r.token_accuracy;
    nominal.push_back(j);
  }
  return {{"task", report.task},
          {"methods", report.methods},
          {"nominal", nominal},
          {"seeds", report.seeds},
          {"config_hash", report.config_hash}};
}

std::vector<std::filesystem::path> EmitOutputs(
    const EvalReport& report, const std::vector<MethodCurve>& curves,
    const std::filesystem::path& dir) {
  if (report.methods.empty()) throw ValidationError("report has no methods");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw RuntimeError("cannot create output directory " + dir.string() +
                       ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& bytes) {
    const auto path = dir / name;
    try {
      nn::WriteFileAtomic(path, bytes);
    } catch (const std::exception& e) {
      throw RuntimeError("cannot write " + path.string() + ": " + e.what());
    }
    written.push_back(path);
  };
  put("sweep.csv", WriteCsv(SweepTable(report.methods, report.sweep)));
  put("sweep_detail.csv",
      WriteCsv(SweepDetailTable(report.methods, report.sweep)));
  put("nominal.csv", WriteCsv(NominalTable(report.nominal)));
  if (!report.efficiency.empty()) {
    put("efficiency.csv", WriteCsv(EfficiencyTable(report.efficiency)));
  }
  put("accuracy.svg", AccuracySvg(report));
  if (!curves.empty()) {
    put("risk_coverage.svg",
        RiskCoverageSvg(curves, "config " + report.config_hash));
  }
  put("report.json", ReportToJson(report).dump(2) + "\n");
  return written;
}

}  // namespace selqa::report
