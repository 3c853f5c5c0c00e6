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

#include "selqa/uq/mve.hpp"

#include <cmath>
#include <string>

#include "selqa/nn/autodiff.hpp"
#include "selqa/nn/error.hpp"

namespace selqa::uq {

namespace {

nn::Tensor NoiseFor(const nn::RngStream& root, std::span<const std::uint64_t> row_keys,
                    std::size_t cols, std::size_t head, std::size_t sample) {
  nn::Tensor eps(row_keys.size(), cols);
  for (std::size_t r = 0; r < row_keys.size(); ++r) {
    nn::RngStream s = root.Split(row_keys[r]).Split(head).Split(sample);
    for (double& e : eps.row(r)) e = s.Normal();
  }
  return eps;
}

}  // namespace

double MveLossStep(const ConvertedModel& model, nn::ParamStore& params,
                   const nn::Batch& batch, const nn::RngStream& rng,
                   std::uint64_t step, const MveStepOptions& options) {
  if (!model.method.HasSigmaHead()) {
    throw ValidationError("MVE loss requires a model with a sigma head");
  }
  const nn::ModelSpec& spec = model.spec;
  const std::size_t t_count = model.method.samples;
  nn::Tape tape;
  nn::DropoutContext ctx{rng.Split(nn::Tag("dropout")), batch.row_keys, step,
                         true};
  const nn::RngStream noise_root = rng.Split(nn::Tag("eps")).Split(step);
  const nn::Var x = tape.Constant(batch.x);
  const nn::Var feat = nn::TrunkOnTape(tape, params, spec, x, &ctx);
  const std::vector<nn::Var> mus = nn::HeadsOnTape(tape, params, spec, feat);

  nn::Var total{};
  std::vector<double> row_losses;
  for (std::size_t h = 0; h < mus.size(); ++h) {
    const std::size_t dim = spec.head_dims[h];
    nn::Var sigma;
    if (model.frozen_sigma) {
      nn::Tensor s(batch.x.rows(), dim);
      s.Fill(*model.frozen_sigma);
      sigma = tape.Constant(std::move(s));
    } else {
      const nn::Var log_sigma = nn::LinearOnTape(
          tape, params, feat, LogSigmaWeightName(h), LogSigmaBiasName(h));
      sigma = nn::ops::ExpClamped(tape, log_sigma, kSigmaMin, kSigmaMax);
    }
    std::vector<nn::Var> samples;
    for (std::size_t s = 0; s < t_count; ++s) {
      nn::Tensor eps = options.zero_noise
                           ? nn::Tensor(batch.x.rows(), dim)
                           : NoiseFor(noise_root, batch.row_keys, dim, h, s);
      const nn::Var z = nn::ops::GaussianSample(tape, mus[h], sigma, eps);
      samples.push_back(nn::ops::Reshape(tape, z, batch.examples,
                                         batch.rows_per_example * dim));
    }
    nn::Var l;
    if (model.aggregation == MveAggregation::kLogitMean) {
      const nn::Var mean = nn::ops::Mean(tape, samples);
      l = nn::ops::SoftmaxCrossEntropy(tape, mean, batch.labels[h], &row_losses);
    } else {
      l = nn::ops::MeanProbCrossEntropy(tape, samples, batch.labels[h],
                                        &row_losses);
    }
    for (std::size_t e = 0; e < row_losses.size(); ++e) {
      if (!std::isfinite(row_losses[e])) {
        throw RuntimeError("non-finite MVE loss at example " +
                           std::to_string(options.example_offset + e));
      }
    }
    total = h == 0 ? l : nn::ops::Add(tape, total, l);
  }
  tape.Backward(total);
  return tape.value(total)[0];
}

}  // namespace selqa::uq
