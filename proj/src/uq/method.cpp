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

#include "selqa/uq/method.hpp"

#include <string>

#include "selqa/nn/error.hpp"

namespace selqa::uq {

std::string_view MethodName(MethodKind kind) {
  switch (kind) {
    case MethodKind::kBaseline:
      return "baseline";
    case MethodKind::kMve:
      return "mve";
    case MethodKind::kMcDropout:
      return "mc_dropout";
    case MethodKind::kEnsemble:
      return "ensemble";
    case MethodKind::kComposed:
      return "composed";
  }
  return "unknown";
}

std::optional<MethodKind> ParseMethodKind(std::string_view name) {
  for (MethodKind k : {MethodKind::kBaseline, MethodKind::kMve,
                       MethodKind::kMcDropout, MethodKind::kEnsemble,
                       MethodKind::kComposed}) {
    if (MethodName(k) == name) return k;
  }
  return std::nullopt;
}

void UqMethod::Validate() const {
  if (samples == 0) throw ValidationError("T (samples) must be >= 1");
  if (members == 0) throw ValidationError("N (members) must be >= 1");
  if (UsesMcDropout() && !(rate > 0.0 && rate < 1.0)) {
    throw ValidationError("dropout rate must be in (0, 1), got " +
                          std::to_string(rate));
  }
}

std::string_view AggregationName(MveAggregation a) {
  return a == MveAggregation::kLogitMean ? "logit_mean" : "probability_mean";
}

std::optional<MveAggregation> ParseAggregation(std::string_view name) {
  if (name == "logit_mean") return MveAggregation::kLogitMean;
  if (name == "probability_mean") return MveAggregation::kProbabilityMean;
  return std::nullopt;
}

std::string_view ReduceModeName(ReduceMode mode) {
  switch (mode) {
    case ReduceMode::kPredictedClass:
      return "predicted_class";
    case ReduceMode::kSum:
      return "sum";
    case ReduceMode::kMean:
      return "mean";
  }
  return "unknown";
}

std::optional<ReduceMode> ParseReduceMode(std::string_view name) {
  for (ReduceMode m :
       {ReduceMode::kPredictedClass, ReduceMode::kSum, ReduceMode::kMean}) {
    if (ReduceModeName(m) == name) return m;
  }
  return std::nullopt;
}

double UncertaintyReduce(std::span<const double> sigma_vec,
                         std::size_t predicted, ReduceMode mode) {
  if (sigma_vec.empty()) throw ValidationError("uncertainty_reduce: empty vector");
  switch (mode) {
    case ReduceMode::kPredictedClass:
      if (predicted >= sigma_vec.size()) {
        throw ValidationError("uncertainty_reduce: predicted index out of range");
      }
      return sigma_vec[predicted];
    case ReduceMode::kSum: {
      double s = 0.0;
      for (double v : sigma_vec) s += v;
      return s;
    }
    case ReduceMode::kMean: {
      double s = 0.0;
      for (double v : sigma_vec) s += v;
      return s / static_cast<double>(sigma_vec.size());
    }
  }
  return 0.0;
}

}  // namespace selqa::uq
