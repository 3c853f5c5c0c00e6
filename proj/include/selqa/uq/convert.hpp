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

#ifndef SELQA_UQ_CONVERT_HPP_
#define SELQA_UQ_CONVERT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "selqa/nn/model.hpp"
#include "selqa/uq/calibration.hpp"
#include "selqa/uq/method.hpp"

namespace selqa::uq {

// Bounds on sigma = exp(log-sigma head).
inline constexpr double kSigmaMin = 1e-6;
inline constexpr double kSigmaMax = 1e3;

std::string LogSigmaWeightName(std::size_t head);
std::string LogSigmaBiasName(std::size_t head);

// An uncertainty-aware model: the base network (possibly with injected
// dropout), its method tag, and every parameter set the method needs.
// Ensembles hold N member stores; all other variants hold one.
struct ConvertedModel {
  nn::ModelSpec spec;
  UqMethod method;
  std::uint64_t seed = 0;
  std::vector<nn::ParamStore> members;
  bool injected_dropout = false;
  std::size_t base_param_count = 0;
  // Wall-clock time of Convert; not written to checkpoints.
  double conversion_seconds = 0.0;
  MveAggregation aggregation = MveAggregation::kProbabilityMean;
  // Diagnostic override: when set, the sigma head is bypassed and every
  // sigma equals this value (may be exactly 0).
  std::optional<double> frozen_sigma;
  std::optional<CalibrationStats> calibration;

  const nn::ParamStore& params() const { return members.front(); }
  nn::ParamStore& params() { return members.front(); }
};

// Builds g from f_W:
//  baseline   parameters copied unchanged;
//  mve        adds a zero-initialized log-sigma head per output head;
//  mc_dropout sets every dropout layer to the method rate, injecting one
//             before the heads when the trunk has none;
//  ensemble   N members re-initialized from seeds derived from seed;
//  composed   mve head plus mc_dropout treatment.
// Throws ValidationError for an invalid base or method.
ConvertedModel Convert(const nn::ModelSpec& base_spec,
                       const nn::ParamStore& base_params,
                       const UqMethod& method, std::uint64_t seed,
                       MveAggregation aggregation =
                           MveAggregation::kProbabilityMean);

// Exact scalar parameter count including method-added parameters.
std::size_t CountParams(const ConvertedModel& model);

}  // namespace selqa::uq

#endif  // SELQA_UQ_CONVERT_HPP_
