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

#ifndef SELQA_REPORT_BENCH_HPP_
#define SELQA_REPORT_BENCH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "selqa/nn/tensor.hpp"
#include "selqa/report/csv.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::report {

struct NamedModel {
  std::string name;
  const uq::ConvertedModel* model = nullptr;
};

struct EfficiencyRow {
  std::string method;
  std::size_t param_count = 0;
  double median_seconds = 0.0;
  double relative_time = 0.0;  // median / baseline median
  double conversion_seconds = 0.0;
};

struct BenchOptions {
  std::size_t repetitions = 7;
  std::size_t warmups = 2;
  std::uint64_t seed = 0;
};

// Times each model's full inference on the batch. Repetitions are
// interleaved across models (rep r runs every model once) so drift hits all
// rows alike. The first model must be the baseline. Throws ValidationError
// for fewer than 5 repetitions or an empty model list.
std::vector<EfficiencyRow> EfficiencyBench(const std::vector<NamedModel>& models,
                                           const nn::Tensor& batch,
                                           const BenchOptions& options = {});

CsvTable EfficiencyTable(const std::vector<EfficiencyRow>& rows);
std::vector<EfficiencyRow> ParseEfficiencyTable(const CsvTable& table);

}  // namespace selqa::report

#endif  // SELQA_REPORT_BENCH_HPP_
