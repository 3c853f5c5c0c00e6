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

#include "selqa/nn/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "selqa/nn/autodiff.hpp"
#include "selqa/nn/error.hpp"

namespace selqa::nn {

void TrainingSet::Validate(const ModelSpec& spec) const {
  spec.Validate();
  if (keys.empty()) throw ValidationError("training set is empty");
  if (rows_per_example == 0) throw ValidationError("rows_per_example is 0");
  if (features.rows() != keys.size() * rows_per_example) {
    throw ValidationError("training set has " +
                          std::to_string(features.rows()) + " rows for " +
                          std::to_string(keys.size()) + " examples of " +
                          std::to_string(rows_per_example) + " rows");
  }
  if (features.cols() != spec.input_dim) {
    throw ValidationError("training features have " +
                          std::to_string(features.cols()) +
                          " columns, model expects " +
                          std::to_string(spec.input_dim));
  }
  if (labels.size() != spec.head_dims.size()) {
    throw ValidationError("training set has " + std::to_string(labels.size()) +
                          " label columns for " +
                          std::to_string(spec.head_dims.size()) + " heads");
  }
  for (std::size_t h = 0; h < labels.size(); ++h) {
    if (labels[h].size() != keys.size()) {
      throw ValidationError("label column " + std::to_string(h) +
                            " has wrong length");
    }
    const std::size_t classes = rows_per_example * spec.head_dims[h];
    for (std::size_t y : labels[h]) {
      if (y >= classes) {
        throw ValidationError("label " + std::to_string(y) +
                              " out of range for head " + std::to_string(h));
      }
    }
  }
}

std::uint64_t RowKey(std::uint64_t example_key, std::size_t row,
                     std::size_t rows_per_example) {
  if (rows_per_example == 1) return example_key;
  return Mix64(example_key) + row;
}

Batch MakeBatch(const TrainingSet& data, std::span<const std::size_t> indices) {
  const std::size_t r = data.rows_per_example;
  Batch b;
  b.examples = indices.size();
  b.rows_per_example = r;
  b.x = Tensor(indices.size() * r, data.features.cols());
  b.row_keys.resize(indices.size() * r);
  b.labels.assign(data.labels.size(), std::vector<std::size_t>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t e = indices[i];
    for (std::size_t j = 0; j < r; ++j) {
      const auto src = data.features.row(e * r + j);
      std::copy(src.begin(), src.end(), b.x.row(i * r + j).begin());
      b.row_keys[i * r + j] = RowKey(data.keys[e], j, r);
    }
    for (std::size_t h = 0; h < data.labels.size(); ++h) {
      b.labels[h][i] = data.labels[h][e];
    }
  }
  return b;
}

Adam::Adam(const ParamStore& params, const TrainConfig& config)
    : config_(config) {
  for (const auto& e : params.entries()) {
    m_.emplace_back(e.value.rows(), e.value.cols());
    v_.emplace_back(e.value.rows(), e.value.cols());
  }
}

void Adam::Step(ParamStore& params) {
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  auto& entries = params.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    Tensor& w = entries[k].value;
    const Tensor& g = entries[k].grad;
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      w[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

std::vector<EpochLog> Train(ParamStore& params, const TrainingSet& data,
                            const TrainConfig& config, const LossFn& loss) {
  if (data.examples() == 0) throw ValidationError("training set is empty");
  if (config.batch_size == 0) throw ValidationError("batch_size must be > 0");
  if (!(config.learning_rate > 0.0)) {
    throw ValidationError("learning_rate must be > 0");
  }
  Adam adam(params, config);
  std::vector<EpochLog> log;
  std::vector<std::size_t> order(data.examples());
  std::uint64_t step = 0;
  const RngStream shuffle_root(config.seed, Tag("shuffle"));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng = shuffle_root.Split(epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.UniformIndex(i)]);
    }
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const Batch batch = MakeBatch(
          data, std::span<const std::size_t>(order).subspan(start, end - start));
      params.ZeroGrad();
      total += loss(params, batch, step++);
      adam.Step(params);
      ++batches;
    }
    log.push_back({epoch, total / static_cast<double>(batches)});
  }
  return log;
}

double StandardLossStep(ParamStore& params, const ModelSpec& spec,
                        const Batch& batch, const RngStream& rng,
                        std::uint64_t step) {
  Tape tape;
  DropoutContext ctx{rng, batch.row_keys, step, true};
  const Var x = tape.Constant(batch.x);
  const Var feat = TrunkOnTape(tape, params, spec, x, &ctx);
  const std::vector<Var> heads = HeadsOnTape(tape, params, spec, feat);
  Var total{};
  std::vector<double> row_losses;
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const Var logits = ops::Reshape(tape, heads[h], batch.examples,
                                    batch.rows_per_example * spec.head_dims[h]);
    const Var l = ops::SoftmaxCrossEntropy(tape, logits, batch.labels[h],
                                           &row_losses);
    for (std::size_t e = 0; e < row_losses.size(); ++e) {
      if (!std::isfinite(row_losses[e])) {
        throw RuntimeError("non-finite loss at batch example " +
                           std::to_string(e));
      }
    }
    total = h == 0 ? l : ops::Add(tape, total, l);
  }
  tape.Backward(total);
  return tape.value(total)[0];
}

std::vector<EpochLog> TrainStandard(ParamStore& params, const ModelSpec& spec,
                                    const TrainingSet& data,
                                    const TrainConfig& config) {
  data.Validate(spec);
  const RngStream rng(config.seed, Tag("dropout"));
  return Train(params, data, config,
               [&](ParamStore& p, const Batch& b, std::uint64_t step) {
                 return StandardLossStep(p, spec, b, rng, step);
               });
}

}  // namespace selqa::nn
