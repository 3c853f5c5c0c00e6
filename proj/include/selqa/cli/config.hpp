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

#ifndef SELQA_CLI_CONFIG_HPP_
#define SELQA_CLI_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selqa/nn/model.hpp"
#include "selqa/nn/train.hpp"
#include "selqa/selective/generation.hpp"
#include "selqa/tasks/spec.hpp"
#include "selqa/tasks/split.hpp"
#include "selqa/uq/method.hpp"

namespace selqa::cli {

struct ModelConfig {
  std::vector<std::size_t> hidden = {64, 64};
  // Dropout in the base network; 0 leaves it out.
  double dropout = 0.1;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct UqConfig {
  std::size_t samples = 10;  // T
  std::size_t members = 5;   // N
  double rate = 0.1;         // MC dropout probability
  uq::MveAggregation aggregation = uq::MveAggregation::kProbabilityMean;

  friend bool operator==(const UqConfig&, const UqConfig&) = default;
};

struct BenchConfig {
  std::size_t repetitions = 7;
  std::size_t warmups = 2;
  std::size_t batch = 1024;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

struct TraceConfig {
  std::size_t prompts = 3;
  std::size_t steps = 0;  // 0: the task's target length
  std::size_t k = 5;

  friend bool operator==(const TraceConfig&, const TraceConfig&) = default;
};

struct GenerationConfig {
  std::size_t max_tries = 10;
  double percentile = 99.0;
  selective::SequenceReduce reduce = selective::SequenceReduce::kMax;
  uq::ReduceMode step_reduce = uq::ReduceMode::kSum;

  friend bool operator==(const GenerationConfig&,
                         const GenerationConfig&) = default;
};

struct RunConfig {
  std::uint64_t seed = 0;
  tasks::TaskSpec task;
  tasks::SplitRatios split;
  ModelConfig model;
  std::vector<uq::MethodKind> methods = {
      uq::MethodKind::kBaseline, uq::MethodKind::kMve,
      uq::MethodKind::kMcDropout, uq::MethodKind::kEnsemble,
      uq::MethodKind::kComposed};
  UqConfig uq;
  nn::TrainConfig train;
  std::vector<double> grid;  // sweep percentiles
  BenchConfig bench;
  TraceConfig trace;
  GenerationConfig generation;
  std::string out_dir = "runs";

  RunConfig();

  uq::UqMethod Method(uq::MethodKind kind) const;
  // Base network for the task's feature and head dimensions.
  nn::ModelSpec BaseSpec() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json ConfigToJson(const RunConfig& config);

// Fills defaults for absent keys. Unknown keys, wrong types and constraint
// violations are collected and thrown together as one ValidationError.
// The task object may not set a seed; the top-level seed drives everything.
RunConfig ConfigFromJson(const nlohmann::json& j);
RunConfig LoadConfig(const std::filesystem::path& path);

// Hash of the canonical JSON without out_dir.
std::string ConfigHash(const RunConfig& config);

}  // namespace selqa::cli

#endif  // SELQA_CLI_CONFIG_HPP_
