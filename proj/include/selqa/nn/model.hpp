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

#ifndef SELQA_NN_MODEL_HPP_
#define SELQA_NN_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "selqa/nn/rng.hpp"
#include "selqa/nn/tensor.hpp"

namespace selqa::nn {

struct LayerSpec {
  enum class Kind { kLinear, kRelu, kDropout };

  Kind kind = Kind::kLinear;
  std::size_t in = 0;
  std::size_t out = 0;
  double rate = 0.0;

  static LayerSpec Linear(std::size_t in, std::size_t out) {
    return {Kind::kLinear, in, out, 0.0};
  }
  static LayerSpec Relu() { return {Kind::kRelu, 0, 0, 0.0}; }
  static LayerSpec Dropout(double rate) { return {Kind::kDropout, 0, 0, rate}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// A trunk of layers followed by one linear head per entry of head_dims.
// Heads all read the trunk output; an empty trunk feeds the input directly.
struct ModelSpec {
  std::size_t input_dim = 0;
  std::vector<LayerSpec> layers;
  std::vector<std::size_t> head_dims;

  // Throws ValidationError on broken dimension chains, bad dropout rates or
  // missing heads.
  void Validate() const;
  std::size_t TrunkOutputDim() const;
  bool HasDropout() const;

  // input -> [linear, relu, (dropout)] per hidden width -> heads.
  static ModelSpec Mlp(std::size_t input_dim,
                       std::span<const std::size_t> hidden,
                       std::span<const std::size_t> head_dims,
                       double dropout_rate = 0.0);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Named parameter tensors with matching gradient buffers, kept in insertion
// order (which is also the checkpoint order).
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;
  };

  void Add(std::string name, Tensor value);
  bool Contains(std::string_view name) const;
  Tensor& Value(std::string_view name);
  const Tensor& Value(std::string_view name) const;
  Tensor& Grad(std::string_view name);
  const Tensor& Grad(std::string_view name) const;

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Total number of scalar parameters.
  std::size_t Count() const;
  void ZeroGrad();

  friend bool operator==(const ParamStore& a, const ParamStore& b);

 private:
  std::size_t IndexOf(std::string_view name) const;

  std::vector<Entry> entries_;
};

std::string LayerWeightName(std::size_t layer);
std::string LayerBiasName(std::size_t layer);
std::string HeadWeightName(std::size_t head);
std::string HeadBiasName(std::size_t head);

// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights and zero biases. Each
// linear layer draws from its own stream derived from (seed, layer index).
ParamStore InitParams(const ModelSpec& spec, std::uint64_t seed);

// Sum over all linear layers and heads of (in + 1) * out.
std::size_t CountParams(const ModelSpec& spec);

// Per-row keyed dropout. The mask element (r, c) of dropout layer l is drawn
// from base.Split(row_keys[r]).Split(pass).Split(l), word c % 4 of block
// c / 4, so it is independent of batch composition and evaluation order.
struct DropoutContext {
  RngStream base;
  std::span<const std::uint64_t> row_keys;
  std::uint64_t pass = 0;
  bool active = false;
};

// Inverted-dropout mask for one dropout layer: entries are 0 or 1/(1-rate).
Tensor DropoutMask(std::size_t rows, std::size_t cols, double rate,
                   const DropoutContext& ctx, std::size_t layer);

// Elementwise inverted dropout drawing sequentially from rng. Identity when
// training is false or rate is 0. Throws ValidationError unless
// 0 <= rate < 1.
Tensor DropoutForward(const Tensor& x, double rate, RngStream& rng,
                      bool training);

// y = x * w + b (b broadcast over rows).
Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b);

// Runs layers [first, last) of the trunk. Dropout layers apply only when
// ctx is non-null and active.
Tensor RunTrunk(const ParamStore& params, const ModelSpec& spec, Tensor x,
                std::size_t first, std::size_t last,
                const DropoutContext* ctx);

// Applies every head to trunk features.
std::vector<Tensor> RunHeads(const ParamStore& params, const ModelSpec& spec,
                             const Tensor& features);

// Full forward pass: one logits tensor per head. Dropout is active iff
// training is set; masks come from rng keyed by row index.
std::vector<Tensor> ModelForward(const ParamStore& params,
                                 const ModelSpec& spec, const Tensor& x,
                                 bool training, const RngStream& rng);

// As above with explicit row keys and pass index.
std::vector<Tensor> ModelForward(const ParamStore& params,
                                 const ModelSpec& spec, const Tensor& x,
                                 const DropoutContext* ctx);

}  // namespace selqa::nn

#endif  // SELQA_NN_MODEL_HPP_
