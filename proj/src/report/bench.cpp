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

#include "selqa/report/bench.hpp"

#include <algorithm>
#include <chrono>

#include "selqa/nn/error.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/uq/predict.hpp"

namespace selqa::report {

namespace {

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double TimeOnce(const uq::ConvertedModel& model, const nn::Tensor& batch,
                const uq::InferOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto moments = uq::InferMoments(model, batch, options);
  const auto stop = std::chrono::steady_clock::now();
  if (moments.empty()) throw RuntimeError("inference returned no heads");
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

std::vector<EfficiencyRow> EfficiencyBench(const std::vector<NamedModel>& models,
                                           const nn::Tensor& batch,
                                           const BenchOptions& options) {
  if (models.empty()) throw ValidationError("bench needs at least one model");
  if (options.repetitions < 5) {
    throw ValidationError("bench needs at least 5 repetitions");
  }
  if (models.front().model->method.kind != uq::MethodKind::kBaseline) {
    throw ValidationError("the first bench model must be the baseline");
  }
  uq::InferOptions infer;
  infer.rng = nn::RngStream(options.seed, nn::Tag("bench"));
  for (std::size_t w = 0; w < options.warmups; ++w) {
    for (const auto& m : models) TimeOnce(*m.model, batch, infer);
  }
  std::vector<std::vector<double>> times(models.size());
  for (std::size_t r = 0; r < options.repetitions; ++r) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      times[i].push_back(TimeOnce(*models[i].model, batch, infer));
    }
  }
  std::vector<EfficiencyRow> rows;
  for (std::size_t i = 0; i < models.size(); ++i) {
    EfficiencyRow row;
    row.method = models[i].name;
    row.param_count = uq::CountParams(*models[i].model);
    row.median_seconds = Median(times[i]);
    row.conversion_seconds = models[i].model->conversion_seconds;
    rows.push_back(row);
  }
  const double base = rows.front().median_seconds;
  for (auto& row : rows) row.relative_time = row.median_seconds / base;
  rows.front().relative_time = 1.0;
  return rows;
}

CsvTable EfficiencyTable(const std::vector<EfficiencyRow>& rows) {
  CsvTable t;
  t.header = {"method", "param_count", "relative_time", "median_seconds",
              "conversion_seconds"};
  for (const auto& r : rows) {
    t.rows.push_back({r.method, std::to_string(r.param_count),
                      FormatNumber(r.relative_time),
                      FormatNumber(r.median_seconds),
                      FormatNumber(r.conversion_seconds)});
  }
  return t;
}

std::vector<EfficiencyRow> ParseEfficiencyTable(const CsvTable& table) {
  if (table.header != EfficiencyTable({}).header) {
    throw ValidationError("unexpected efficiency table header");
  }
  std::vector<EfficiencyRow> rows;
  for (const auto& f : table.rows) {
    EfficiencyRow r;
    r.method = f[0];
    r.param_count = static_cast<std::size_t>(ParseNumber(f[1]));
    r.relative_time = ParseNumber(f[2]);
    r.median_seconds = ParseNumber(f[3]);
    r.conversion_seconds = ParseNumber(f[4]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace selqa::report
