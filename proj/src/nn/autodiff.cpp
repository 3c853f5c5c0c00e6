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

#include "selqa/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selqa/kernels/kernels.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"

namespace selqa::nn {

Var Tape::Constant(Tensor value) {
  nodes_.push_back({std::move(value), Tensor(), false, nullptr, nullptr});
  return Var{nodes_.size() - 1};
}

Var Tape::Param(ParamStore& store, std::string_view name) {
  nodes_.push_back({store.Value(name), Tensor(), true, nullptr,
                    &store.Grad(name)});
  return Var{nodes_.size() - 1};
}

Var Tape::Push(Tensor value, bool requires_grad, BackwardFn backward) {
  nodes_.push_back({std::move(value), Tensor(), requires_grad,
                    requires_grad ? std::move(backward) : nullptr, nullptr});
  return Var{nodes_.size() - 1};
}

Tensor& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() != n.value.size() || !n.grad.SameShape(n.value)) {
    n.grad = Tensor(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

void Tape::Backward(Var loss) {
  const Tensor& v = value(loss);
  if (v.rows() != 1 || v.cols() != 1) {
    throw ValidationError("backward requires a scalar loss, got " +
                          v.ShapeString());
  }
  for (auto& n : nodes_) n.grad = Tensor();
  grad(loss)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, i);
  }
  for (auto& n : nodes_) {
    if (n.param_grad != nullptr && !n.grad.empty()) {
      kernels::Active().add(n.grad.data(), n.param_grad->data(),
                            n.grad.size());
    }
  }
}

namespace ops {
namespace {

bool AnyGrad(const Tape& t, std::initializer_list<Var> vars) {
  for (Var v : vars) {
    if (t.requires_grad(v)) return true;
  }
  return false;
}

}  // namespace

Var MatMul(Tape& t, Var x, Var w) {
  const Tensor& xv = t.value(x);
  const Tensor& wv = t.value(w);
  if (xv.cols() != wv.rows()) {
    throw ValidationError("matmul: " + xv.ShapeString() + " x " +
                          wv.ShapeString());
  }
  Tensor y(xv.rows(), wv.cols());
  kernels::Gemm(xv.data(), wv.data(), y.data(), xv.rows(), xv.cols(),
                wv.cols(), false);
  return t.Push(std::move(y), AnyGrad(t, {x, w}), [x, w](Tape& tp, std::size_t self) {
    const Tensor g = tp.grad(self);
    const Tensor& xv = tp.value(x);
    const Tensor& wv = tp.value(w);
    const std::size_t n = xv.rows(), k = xv.cols(), m = wv.cols();
    if (tp.requires_grad(x)) {
      kernels::GemmABt(g.data(), wv.data(), tp.grad(x).data(), n, k, m);
    }
    if (tp.requires_grad(w)) {
      kernels::GemmAtB(xv.data(), g.data(), tp.grad(w).data(), n, k, m);
    }
  });
}

Var AddBias(Tape& t, Var x, Var b) {
  const Tensor& xv = t.value(x);
  const Tensor& bv = t.value(b);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) {
    throw ValidationError("add_bias: " + xv.ShapeString() + " + " +
                          bv.ShapeString());
  }
  Tensor y = xv;
  const auto& table = kernels::Active();
  for (std::size_t r = 0; r < y.rows(); ++r) {
    table.add(bv.data(), y.row(r).data(), y.cols());
  }
  return t.Push(std::move(y), AnyGrad(t, {x, b}), [x, b](Tape& tp, std::size_t self) {
    const Tensor g = tp.grad(self);
    const auto& table = kernels::Active();
    if (tp.requires_grad(x)) table.add(g.data(), tp.grad(x).data(), g.size());
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad(b);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        table.add(g.row(r).data(), gb.data(), g.cols());
      }
    }
  });
}

Var Relu(Tape& t, Var x) {
  Tensor y(t.value(x).rows(), t.value(x).cols());
  kernels::Active().relu(t.value(x).data(), y.data(), y.size());
  return t.Push(std::move(y), t.requires_grad(x), [x](Tape& tp, std::size_t self) {
    const Tensor g = tp.grad(self);
    kernels::Active().relu_backward(tp.value(x).data(), g.data(),
                                    tp.grad(x).data(), g.size());
  });
}

Var MulConst(Tape& t, Var x, const Tensor& c) {
  RequireSameShape(t.value(x), c, "mul_const");
  Tensor y(c.rows(), c.cols());
  kernels::Active().mul(t.value(x).data(), c.data(), y.data(), y.size());
  return t.Push(std::move(y), t.requires_grad(x), [x, c](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& gx = tp.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * c[i];
  });
}

Var Add(Tape& t, Var a, Var b) {
  RequireSameShape(t.value(a), t.value(b), "add");
  Tensor y = t.value(a);
  kernels::Active().add(t.value(b).data(), y.data(), y.size());
  return t.Push(std::move(y), AnyGrad(t, {a, b}), [a, b](Tape& tp, std::size_t self) {
    const Tensor g = tp.grad(self);
    const auto& table = kernels::Active();
    if (tp.requires_grad(a)) table.add(g.data(), tp.grad(a).data(), g.size());
    if (tp.requires_grad(b)) table.add(g.data(), tp.grad(b).data(), g.size());
  });
}

Var Scale(Tape& t, Var a, double s) {
  Tensor y = t.value(a);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= s;
  return t.Push(std::move(y), t.requires_grad(a), [a, s](Tape& tp, std::size_t self) {
    const Tensor& g = tp.grad(self);
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += s * g[i];
  });
}

Var Sum(Tape& t, Var a) {
  double s = 0.0;
  for (double v : t.value(a).values()) s += v;
  return t.Push(Tensor(1, 1, s), t.requires_grad(a), [a](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
  });
}

Var SumSquares(Tape& t, Var a) {
  double s = 0.0;
  for (double v : t.value(a).values()) s += v * v;
  return t.Push(Tensor(1, 1, s), t.requires_grad(a), [a](Tape& tp, std::size_t self) {
    const double g = tp.grad(self)[0];
    const Tensor& av = tp.value(a);
    Tensor& ga = tp.grad(a);
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += 2.0 * av[i] * g;
  });
}

Var Reshape(Tape& t, Var a, std::size_t rows, std::size_t cols) {
  Tensor y = t.value(a).Reshaped(rows, cols);
  return t.Push(std::move(y), t.requires_grad(a), [a](Tape& tp, std::size_t self) {
    const Tensor g = tp.grad(self);
    kernels::Active().add(g.data(), tp.grad(a).data(), g.size());
  });
}

Var GaussianSample(Tape& t, Var mu, Var sigma, const Tensor& eps) {
  const Tensor& m = t.value(mu);
  const Tensor& s = t.value(sigma);
  RequireSameShape(m, s, "gaussian_sample(mu, sigma)");
  RequireSameShape(m, eps, "gaussian_sample(mu, eps)");
  Tensor y(m.rows(), m.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (s[i] < 0.0) {
      throw ValidationError("gaussian_sample: negative sigma at index " +
                            std::to_string(i));
    }
    y[i] = m[i] + s[i] * eps[i];
  }
  return t.Push(std::move(y), AnyGrad(t, {mu, sigma}),
                [mu, sigma, eps](Tape& tp, std::size_t self) {
                  const Tensor g = tp.grad(self);
                  if (tp.requires_grad(mu)) {
                    kernels::Active().add(g.data(), tp.grad(mu).data(),
                                          g.size());
                  }
                  if (tp.requires_grad(sigma)) {
                    Tensor& gs = tp.grad(sigma);
                    for (std::size_t i = 0; i < g.size(); ++i) {
                      gs[i] += g[i] * eps[i];
                    }
                  }
                });
}

Var ExpClamped(Tape& t, Var x, double lo, double hi) {
  const Tensor& xv = t.value(x);
  Tensor y(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::clamp(std::exp(xv[i]), lo, hi);
  }
  return t.Push(std::move(y), t.requires_grad(x),
                [x, lo, hi](Tape& tp, std::size_t self) {
                  const Tensor g = tp.grad(self);
                  const Tensor& xv = tp.value(x);
                  Tensor& gx = tp.grad(x);
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    const double e = std::exp(xv[i]);
                    if (e > lo && e < hi) gx[i] += g[i] * e;
                  }
                });
}

Var Mean(Tape& t, std::span<const Var> inputs) {
  if (inputs.empty()) throw ValidationError("mean of no inputs");
  Tensor y = t.value(inputs[0]);
  bool needs = t.requires_grad(inputs[0]);
  for (std::size_t s = 1; s < inputs.size(); ++s) {
    const Tensor& v = t.value(inputs[s]);
    RequireSameShape(y, v, "mean");
    const double inv = 1.0 / static_cast<double>(s + 1);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += (v[i] - y[i]) * inv;
    needs = needs || t.requires_grad(inputs[s]);
  }
  std::vector<Var> in(inputs.begin(), inputs.end());
  return t.Push(std::move(y), needs, [in](Tape& tp, std::size_t self) {
    const Tensor g = tp.grad(self);
    const double w = 1.0 / static_cast<double>(in.size());
    for (Var v : in) {
      if (!tp.requires_grad(v)) continue;
      Tensor& gv = tp.grad(v);
      for (std::size_t i = 0; i < g.size(); ++i) gv[i] += w * g[i];
    }
  });
}

namespace {

void CheckLabels(const Tensor& logits, std::span<const std::size_t> labels) {
  if (labels.size() != logits.rows()) {
    throw ValidationError("cross_entropy: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(logits.rows()) +
                          " rows");
  }
  for (std::size_t y : labels) {
    if (y >= logits.cols()) {
      throw ValidationError("cross_entropy: label " + std::to_string(y) +
                            " out of range for " +
                            std::to_string(logits.cols()) + " classes");
    }
  }
}

}  // namespace

Var SoftmaxCrossEntropy(Tape& t, Var logits,
                        std::span<const std::size_t> labels,
                        std::vector<double>* row_losses) {
  const Tensor& z = t.value(logits);
  CheckLabels(z, labels);
  Tensor p = z;
  double total = 0.0;
  if (row_losses != nullptr) row_losses->assign(z.rows(), 0.0);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    SoftmaxInPlace(p.row(r));
    const double l = -std::log(std::max(p(r, labels[r]), kProbabilityFloor));
    if (row_losses != nullptr) (*row_losses)[r] = l;
    total += l;
  }
  const double n = static_cast<double>(z.rows());
  std::vector<std::size_t> y(labels.begin(), labels.end());
  return t.Push(Tensor(1, 1, total / n), t.requires_grad(logits),
                [logits, p = std::move(p), y = std::move(y), n](Tape& tp,
                                                                std::size_t self) {
                  const double g = tp.grad(self)[0] / n;
                  Tensor& gz = tp.grad(logits);
                  for (std::size_t r = 0; r < p.rows(); ++r) {
                    if (p(r, y[r]) < kProbabilityFloor) continue;
                    for (std::size_t c = 0; c < p.cols(); ++c) {
                      gz(r, c) += g * (p(r, c) - (c == y[r] ? 1.0 : 0.0));
                    }
                  }
                });
}

Var MeanProbCrossEntropy(Tape& t, std::span<const Var> samples,
                         std::span<const std::size_t> labels,
                         std::vector<double>* row_losses) {
  if (samples.empty()) throw ValidationError("no logit samples");
  const Tensor& z0 = t.value(samples[0]);
  CheckLabels(z0, labels);
  const std::size_t s_count = samples.size();
  std::vector<Tensor> probs;
  probs.reserve(s_count);
  bool needs = false;
  for (Var s : samples) {
    RequireSameShape(z0, t.value(s), "mean_prob_cross_entropy");
    Tensor p = t.value(s);
    for (std::size_t r = 0; r < p.rows(); ++r) SoftmaxInPlace(p.row(r));
    probs.push_back(std::move(p));
    needs = needs || t.requires_grad(s);
  }
  std::vector<double> q(z0.rows(), 0.0);
  double total = 0.0;
  if (row_losses != nullptr) row_losses->assign(z0.rows(), 0.0);
  for (std::size_t r = 0; r < z0.rows(); ++r) {
    double m = probs[0](r, labels[r]);
    for (std::size_t s = 1; s < s_count; ++s) {
      m += (probs[s](r, labels[r]) - m) / static_cast<double>(s + 1);
    }
    q[r] = m;
    const double l = -std::log(std::max(m, kProbabilityFloor));
    if (row_losses != nullptr) (*row_losses)[r] = l;
    total += l;
  }
  const double n = static_cast<double>(z0.rows());
  std::vector<Var> in(samples.begin(), samples.end());
  std::vector<std::size_t> y(labels.begin(), labels.end());
  return t.Push(
      Tensor(1, 1, total / n), needs,
      [in = std::move(in), probs = std::move(probs), q = std::move(q),
       y = std::move(y), n](Tape& tp, std::size_t self) {
        const double g = tp.grad(self)[0] / n;
        const double inv_s = 1.0 / static_cast<double>(in.size());
        for (std::size_t s = 0; s < in.size(); ++s) {
          if (!tp.requires_grad(in[s])) continue;
          Tensor& gz = tp.grad(in[s]);
          const Tensor& p = probs[s];
          for (std::size_t r = 0; r < p.rows(); ++r) {
            if (q[r] < kProbabilityFloor) continue;
            const double w = g * inv_s * p(r, y[r]) / q[r];
            for (std::size_t c = 0; c < p.cols(); ++c) {
              gz(r, c) += w * (p(r, c) - (c == y[r] ? 1.0 : 0.0));
            }
          }
        }
      });
}

}  // namespace ops

Var LinearOnTape(Tape& t, ParamStore& store, Var x, const std::string& w,
                 const std::string& b) {
  return ops::AddBias(t, ops::MatMul(t, x, t.Param(store, w)),
                      t.Param(store, b));
}

Var TrunkOnTape(Tape& t, ParamStore& store, const ModelSpec& spec, Var x,
                const DropoutContext* ctx) {
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    switch (l.kind) {
      case LayerSpec::Kind::kLinear:
        x = LinearOnTape(t, store, x, LayerWeightName(i), LayerBiasName(i));
        break;
      case LayerSpec::Kind::kRelu:
        x = ops::Relu(t, x);
        break;
      case LayerSpec::Kind::kDropout:
        if (ctx != nullptr && ctx->active && l.rate > 0.0) {
          const Tensor& v = t.value(x);
          x = ops::MulConst(t, x,
                            DropoutMask(v.rows(), v.cols(), l.rate, *ctx, i));
        }
        break;
    }
  }
  return x;
}

std::vector<Var> HeadsOnTape(Tape& t, ParamStore& store,
                             const ModelSpec& spec, Var features) {
  std::vector<Var> out;
  for (std::size_t h = 0; h < spec.head_dims.size(); ++h) {
    out.push_back(LinearOnTape(t, store, features, HeadWeightName(h),
                               HeadBiasName(h)));
  }
  return out;
}

}  // namespace selqa::nn
