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

#ifndef SELQA_UQ_PREDICT_HPP_
#define SELQA_UQ_PREDICT_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "selqa/nn/rng.hpp"
#include "selqa/nn/tensor.hpp"
#include "selqa/uq/convert.hpp"
#include "selqa/uq/method.hpp"

namespace selqa::uq {

// Running mean and population variance of equally shaped tensors (Welford).
// Identical inputs give a mean bitwise equal to the input and variance 0.
class MomentAccumulator {
 public:
  void Add(const nn::Tensor& sample);
  std::size_t count() const { return count_; }
  const nn::Tensor& mean() const { return mean_; }
  nn::Tensor Variance() const;

 private:
  std::size_t count_ = 0;
  nn::Tensor mean_;
  nn::Tensor m2_;
};

// Per-head raw moments over the model's row layout (rows x head_dim).
// aleatoric is the sigma head output (zero when the method has none);
// epistemic is the sample variance over passes or members (zero otherwise).
struct HeadMoments {
  nn::Tensor mean;
  nn::Tensor aleatoric;
  nn::Tensor epistemic;
};

struct InferOptions {
  // Root stream for dropout passes; each row's masks derive from
  // (row key, pass index, layer), so results do not depend on batching.
  nn::RngStream rng;
  // One key per input row; empty means 0..rows-1.
  std::span<const std::uint64_t> row_keys;
  // Test hook: pass t multiplies every dropout layer by fixed_masks[t]
  // instead of drawing a mask. Its size overrides the pass count.
  const std::vector<nn::Tensor>* fixed_masks = nullptr;
};

// Runs the method's inference procedure. MC passes evaluate the layers
// before the first dropout layer once and reuse them for every pass.
// Throws ValidationError for fewer than 2 MC passes.
std::vector<HeadMoments> InferMoments(const ConvertedModel& model,
                                      const nn::Tensor& x,
                                      const InferOptions& options = {});

struct UncertaintyOutput {
  std::vector<double> mu;
  std::vector<double> sigma_vec;
  std::size_t predicted = 0;
  double sigma = 0.0;
  double confidence = 0.0;
  // Scalar reductions of the raw components, kept for calibration and
  // diagnostics.
  double aleatoric = 0.0;
  double epistemic = 0.0;
};

// Turns one row of moments into the method's (prediction, sigma) pair.
//  baseline   sigma_vec = 1 - softmax(mu)
//  mve        sigma_vec = aleatoric
//  mc/ens     sigma_vec = epistemic
//  composed   sigma_vec = z(aleatoric) + z(epistemic) with the head's
//             calibration constants; may be negative.
// Throws ValidationError for a composed model without calibration stats.
UncertaintyOutput Summarize(const ConvertedModel& model, std::size_t head,
                            std::span<const double> mu,
                            std::span<const double> aleatoric,
                            std::span<const double> epistemic,
                            ReduceMode mode = ReduceMode::kPredictedClass);

// Row-wise predictions for head 0 (or the given head).
std::vector<UncertaintyOutput> Predict(
    const ConvertedModel& model, const nn::Tensor& x,
    const InferOptions& options = {},
    ReduceMode mode = ReduceMode::kPredictedClass, std::size_t head = 0);

// Variant-checked entry points; each throws ValidationError when the model
// is of a different kind.
std::vector<UncertaintyOutput> BaselinePredict(const ConvertedModel& model,
                                               const nn::Tensor& x);
std::vector<UncertaintyOutput> MvePredict(const ConvertedModel& model,
                                          const nn::Tensor& x);
std::vector<UncertaintyOutput> McPredict(const ConvertedModel& model,
                                         const nn::Tensor& x,
                                         const InferOptions& options);
std::vector<UncertaintyOutput> EnsemblePredict(const ConvertedModel& model,
                                               const nn::Tensor& x);
std::vector<UncertaintyOutput> ComposedPredict(const ConvertedModel& model,
                                               const nn::Tensor& x,
                                               const InferOptions& options);

// Fits composed-score constants from the calibration rows (head 0 only;
// multi-row tasks build score columns themselves and call
// CalibrationFromScores).
CalibrationStats CalibrateStats(const ConvertedModel& model,
                                const nn::Tensor& x,
                                const InferOptions& options,
                                ReduceMode mode = ReduceMode::kPredictedClass);

}  // namespace selqa::uq

#endif  // SELQA_UQ_PREDICT_HPP_
