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

#ifndef SELQA_NN_TRAIN_HPP_
#define SELQA_NN_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "selqa/nn/model.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/nn/tensor.hpp"

namespace selqa::nn {

// Supervised data in model-input layout. Each example owns
// rows_per_example consecutive feature rows (1 for classification, the
// context length for span extraction). Head h's logits for an example are
// its rows' outputs flattened, so labels[h][e] indexes
// [0, rows_per_example * head_dims[h]).
struct TrainingSet {
  Tensor features;
  std::size_t rows_per_example = 1;
  std::vector<std::vector<std::size_t>> labels;
  std::vector<std::uint64_t> keys;

  std::size_t examples() const { return keys.size(); }
  // Throws ValidationError on empty data or any dimension disagreement.
  void Validate(const ModelSpec& spec) const;
};

struct Batch {
  Tensor x;
  std::vector<std::uint64_t> row_keys;
  std::vector<std::vector<std::size_t>> labels;
  std::size_t examples = 0;
  std::size_t rows_per_example = 1;
};

Batch MakeBatch(const TrainingSet& data, std::span<const std::size_t> indices);

// Row key used for dropout and noise streams of row j of an example.
std::uint64_t RowKey(std::uint64_t example_key, std::size_t row,
                     std::size_t rows_per_example);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
};

// Computes gradients into the store for one batch and returns the batch
// loss. step is the global optimizer step, unique per batch.
using LossFn =
    std::function<double(ParamStore&, const Batch&, std::uint64_t step)>;

class Adam {
 public:
  Adam(const ParamStore& params, const TrainConfig& config);
  void Step(ParamStore& params);

 private:
  TrainConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::uint64_t t_ = 0;
};

// Minibatch Adam. The epoch order is a seeded shuffle, so the result is a
// pure function of (params, data, config, loss).
std::vector<EpochLog> Train(ParamStore& params, const TrainingSet& data,
                            const TrainConfig& config, const LossFn& loss);

// Cross-entropy summed over heads, dropout active with masks keyed by
// (row key, step). Throws RuntimeError naming the example on a non-finite
// loss.
double StandardLossStep(ParamStore& params, const ModelSpec& spec,
                        const Batch& batch, const RngStream& rng,
                        std::uint64_t step);

// Train() with StandardLossStep; the spec must match data.
std::vector<EpochLog> TrainStandard(ParamStore& params, const ModelSpec& spec,
                                    const TrainingSet& data,
                                    const TrainConfig& config);

}  // namespace selqa::nn

#endif  // SELQA_NN_TRAIN_HPP_
