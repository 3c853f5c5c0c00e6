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

#ifndef SELQA_NN_AUTODIFF_HPP_
#define SELQA_NN_AUTODIFF_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "selqa/nn/model.hpp"
#include "selqa/nn/tensor.hpp"

namespace selqa::nn {

// Reverse-mode tape. Nodes are appended in evaluation order; Backward walks
// them in reverse and finally adds leaf gradients into the owning
// ParamStore.
class Tape {
 public:
  struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
  };
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Var Constant(Tensor value);
  // Leaf bound to a parameter; its gradient is added to store.Grad(name).
  Var Param(ParamStore& store, std::string_view name);
  Var Push(Tensor value, bool requires_grad, BackwardFn backward);

  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  // Lazily allocated gradient buffer.
  Tensor& grad(Var v) { return grad(v.id); }
  Tensor& grad(std::size_t id);

  // Seeds d(loss)/d(loss) = 1. Throws ValidationError if loss is not 1x1.
  void Backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    Tensor* param_grad = nullptr;
  };
  std::vector<Node> nodes_;
};

using Var = Tape::Var;

namespace ops {

Var MatMul(Tape& t, Var x, Var w);
Var AddBias(Tape& t, Var x, Var b);
Var Relu(Tape& t, Var x);
// Elementwise product with a constant tensor (dropout masks, noise).
Var MulConst(Tape& t, Var x, const Tensor& c);
Var Add(Tape& t, Var a, Var b);
Var Scale(Tape& t, Var a, double s);
Var Sum(Tape& t, Var a);
Var SumSquares(Tape& t, Var a);
Var Reshape(Tape& t, Var a, std::size_t rows, std::size_t cols);

// mu + sigma * eps with eps held constant. Throws ValidationError on shape
// mismatch or any negative sigma.
Var GaussianSample(Tape& t, Var mu, Var sigma, const Tensor& eps);

// clamp(exp(x), lo, hi); clamped entries pass no gradient.
Var ExpClamped(Tape& t, Var x, double lo, double hi);

// Elementwise mean of equally shaped inputs (running-mean accumulation, so
// identical inputs reproduce themselves exactly).
Var Mean(Tape& t, std::span<const Var> inputs);

// Mean over rows of -log(max(softmax(row)[label], 1e-12)). When row_losses
// is non-null it receives the per-row losses.
Var SoftmaxCrossEntropy(Tape& t, Var logits, std::span<const std::size_t> labels,
                        std::vector<double>* row_losses = nullptr);

// Mean over rows of -log(max(mean_s softmax(samples[s] row)[label], 1e-12)).
Var MeanProbCrossEntropy(Tape& t, std::span<const Var> samples,
                         std::span<const std::size_t> labels,
                         std::vector<double>* row_losses = nullptr);

}  // namespace ops

// Linear layer on the tape: x * W + b with W, b bound to store.
Var LinearOnTape(Tape& t, ParamStore& store, Var x, const std::string& w,
                 const std::string& b);

// Trunk on the tape; mirrors RunTrunk (same masks for the same ctx).
Var TrunkOnTape(Tape& t, ParamStore& store, const ModelSpec& spec, Var x,
                const DropoutContext* ctx);

std::vector<Var> HeadsOnTape(Tape& t, ParamStore& store,
                             const ModelSpec& spec, Var features);

}  // namespace selqa::nn

#endif  // SELQA_NN_AUTODIFF_HPP_
