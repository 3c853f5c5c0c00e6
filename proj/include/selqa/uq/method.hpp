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

#ifndef SELQA_UQ_METHOD_HPP_
#define SELQA_UQ_METHOD_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace selqa::uq {

enum class MethodKind { kBaseline, kMve, kMcDropout, kEnsemble, kComposed };

std::string_view MethodName(MethodKind kind);
std::optional<MethodKind> ParseMethodKind(std::string_view name);

// Which uncertainty-aware variant to build and its sampling parameters.
// samples is T (MVE training samples, MC passes); members is N; rate is the
// MC dropout probability. Fields irrelevant to a kind are ignored.
struct UqMethod {
  MethodKind kind = MethodKind::kBaseline;
  std::size_t samples = 10;
  std::size_t members = 5;
  double rate = 0.1;

  static UqMethod Baseline() { return {MethodKind::kBaseline, 10, 5, 0.1}; }
  static UqMethod Mve(std::size_t t = 10) { return {MethodKind::kMve, t, 5, 0.1}; }
  static UqMethod McDropout(std::size_t t = 10, double rate = 0.1) {
    return {MethodKind::kMcDropout, t, 5, rate};
  }
  static UqMethod Ensemble(std::size_t n = 5) {
    return {MethodKind::kEnsemble, 10, n, 0.1};
  }
  static UqMethod Composed(std::size_t t = 10, double rate = 0.1) {
    return {MethodKind::kComposed, t, 5, rate};
  }

  // T >= 1, N >= 1, rate in (0, 1) for dropout variants.
  void Validate() const;
  std::string Name() const { return std::string(MethodName(kind)); }
  bool HasSigmaHead() const {
    return kind == MethodKind::kMve || kind == MethodKind::kComposed;
  }
  bool UsesMcDropout() const {
    return kind == MethodKind::kMcDropout || kind == MethodKind::kComposed;
  }

  friend bool operator==(const UqMethod&, const UqMethod&) = default;
};

// How the stochastic logit samples are aggregated in the MVE loss.
// kLogitMean: softmax of the averaged logits. kProbabilityMean: average of
// the per-sample softmax outputs.
enum class MveAggregation { kLogitMean, kProbabilityMean };

std::string_view AggregationName(MveAggregation a);
std::optional<MveAggregation> ParseAggregation(std::string_view name);

// Vector-to-scalar uncertainty reduction.
enum class ReduceMode { kPredictedClass, kSum, kMean };

std::string_view ReduceModeName(ReduceMode mode);
std::optional<ReduceMode> ParseReduceMode(std::string_view name);

// Throws ValidationError on an empty vector or out-of-range index.
double UncertaintyReduce(std::span<const double> sigma_vec,
                         std::size_t predicted, ReduceMode mode);

}  // namespace selqa::uq

#endif  // SELQA_UQ_METHOD_HPP_
