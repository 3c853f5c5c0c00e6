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

#include "selqa/nn/model.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "selqa/kernels/kernels.hpp"
#include "selqa/nn/error.hpp"

namespace selqa::nn {

void ModelSpec::Validate() const {
  if (input_dim == 0) throw ValidationError("model input_dim must be > 0");
  std::size_t dim = input_dim;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    switch (l.kind) {
      case LayerSpec::Kind::kLinear:
        if (l.in != dim) {
          throw ValidationError("layer " + std::to_string(i) +
                                " expects input dim " + std::to_string(l.in) +
                                " but receives " + std::to_string(dim));
        }
        if (l.out == 0) {
          throw ValidationError("layer " + std::to_string(i) +
                                " has zero outputs");
        }
        dim = l.out;
        break;
      case LayerSpec::Kind::kRelu:
        break;
      case LayerSpec::Kind::kDropout:
        if (!(l.rate >= 0.0 && l.rate < 1.0)) {
          throw ValidationError("dropout rate must be in [0, 1), got " +
                                std::to_string(l.rate));
        }
        break;
    }
  }
  if (head_dims.empty()) throw ValidationError("model needs at least one head");
  for (std::size_t d : head_dims) {
    if (d == 0) throw ValidationError("head dimension must be > 0");
  }
}

std::size_t ModelSpec::TrunkOutputDim() const {
  std::size_t dim = input_dim;
  for (const auto& l : layers) {
    if (l.kind == LayerSpec::Kind::kLinear) dim = l.out;
  }
  return dim;
}

bool ModelSpec::HasDropout() const {
  for (const auto& l : layers) {
    if (l.kind == LayerSpec::Kind::kDropout) return true;
  }
  return false;
}

ModelSpec ModelSpec::Mlp(std::size_t input_dim,
                         std::span<const std::size_t> hidden,
                         std::span<const std::size_t> head_dims,
                         double dropout_rate) {
  ModelSpec spec;
  spec.input_dim = input_dim;
  std::size_t dim = input_dim;
  for (std::size_t h : hidden) {
    spec.layers.push_back(LayerSpec::Linear(dim, h));
    spec.layers.push_back(LayerSpec::Relu());
    if (dropout_rate > 0.0) {
      spec.layers.push_back(LayerSpec::Dropout(dropout_rate));
    }
    dim = h;
  }
  spec.head_dims.assign(head_dims.begin(), head_dims.end());
  return spec;
}

void ParamStore::Add(std::string name, Tensor value) {
  if (Contains(name)) throw ValidationError("duplicate parameter " + name);
  Tensor grad(value.rows(), value.cols());
  entries_.push_back({std::move(name), std::move(value), std::move(grad)});
}

bool ParamStore::Contains(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return true;
  }
  return false;
}

std::size_t ParamStore::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  throw ValidationError("unknown parameter " + std::string(name));
}

Tensor& ParamStore::Value(std::string_view name) {
  return entries_[IndexOf(name)].value;
}
const Tensor& ParamStore::Value(std::string_view name) const {
  return entries_[IndexOf(name)].value;
}
Tensor& ParamStore::Grad(std::string_view name) {
  return entries_[IndexOf(name)].grad;
}
const Tensor& ParamStore::Grad(std::string_view name) const {
  return entries_[IndexOf(name)].grad;
}

std::size_t ParamStore::Count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto& e : entries_) e.grad.Fill(0.0);
}

bool operator==(const ParamStore& a, const ParamStore& b) {
  if (a.entries_.size() != b.entries_.size()) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    if (a.entries_[i].name != b.entries_[i].name ||
        !(a.entries_[i].value == b.entries_[i].value)) {
      return false;
    }
  }
  return true;
}

std::string LayerWeightName(std::size_t layer) {
  return "layer" + std::to_string(layer) + ".W";
}
std::string LayerBiasName(std::size_t layer) {
  return "layer" + std::to_string(layer) + ".b";
}
std::string HeadWeightName(std::size_t head) {
  return "head" + std::to_string(head) + ".W";
}
std::string HeadBiasName(std::size_t head) {
  return "head" + std::to_string(head) + ".b";
}

namespace {

Tensor GlorotUniform(std::size_t in, std::size_t out, RngStream rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  Tensor w(in, out);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = (2.0 * rng.Uniform() - 1.0) * limit;
  }
  return w;
}

}  // namespace

ParamStore InitParams(const ModelSpec& spec, std::uint64_t seed) {
  spec.Validate();
  ParamStore store;
  const RngStream root(seed, Tag("init"));
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.kind != LayerSpec::Kind::kLinear) continue;
    store.Add(LayerWeightName(i), GlorotUniform(l.in, l.out, root.Split(i)));
    store.Add(LayerBiasName(i), Tensor(1, l.out));
  }
  const std::size_t feat = spec.TrunkOutputDim();
  for (std::size_t h = 0; h < spec.head_dims.size(); ++h) {
    store.Add(HeadWeightName(h),
              GlorotUniform(feat, spec.head_dims[h],
                            root.Split(Tag("head")).Split(h)));
    store.Add(HeadBiasName(h), Tensor(1, spec.head_dims[h]));
  }
  return store;
}

std::size_t CountParams(const ModelSpec& spec) {
  std::size_t n = 0;
  for (const auto& l : spec.layers) {
    if (l.kind == LayerSpec::Kind::kLinear) n += (l.in + 1) * l.out;
  }
  const std::size_t feat = spec.TrunkOutputDim();
  for (std::size_t d : spec.head_dims) n += (feat + 1) * d;
  return n;
}

Tensor DropoutMask(std::size_t rows, std::size_t cols, double rate,
                   const DropoutContext& ctx, std::size_t layer) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ValidationError("dropout rate must be in [0, 1)");
  }
  if (ctx.row_keys.size() != rows) {
    throw ValidationError("dropout context has " +
                          std::to_string(ctx.row_keys.size()) +
                          " row keys for " + std::to_string(rows) + " rows");
  }
  Tensor mask(rows, cols);
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t r = 0; r < rows; ++r) {
    RngStream s = ctx.base.Split(ctx.row_keys[r]).Split(ctx.pass).Split(layer);
    // Four 32-bit uniforms per block; plenty of resolution for a keep test.
    std::array<std::uint32_t, 4> block{};
    for (std::size_t c = 0; c < cols; ++c) {
      if (c % 4 == 0) block = s.NextBlock();
      mask(r, c) = static_cast<double>(block[c % 4]) * 0x1.0p-32 >= rate
                       ? scale
                       : 0.0;
    }
  }
  return mask;
}

Tensor DropoutForward(const Tensor& x, double rate, RngStream& rng,
                      bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ValidationError("dropout rate must be in [0, 1), got " +
                          std::to_string(rate));
  }
  if (!training || rate == 0.0) return x;
  Tensor out(x.rows(), x.cols());
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = rng.Uniform() >= rate ? x[i] * scale : 0.0;
  }
  return out;
}

Tensor Linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.cols() != w.rows()) {
    throw ValidationError("linear: input " + x.ShapeString() +
                          " does not match weight " + w.ShapeString());
  }
  Tensor y(x.rows(), w.cols());
  kernels::Gemm(x.data(), w.data(), y.data(), x.rows(), x.cols(), w.cols(),
                false);
  const auto& table = kernels::Active();
  for (std::size_t r = 0; r < y.rows(); ++r) {
    table.add(b.data(), y.row(r).data(), y.cols());
  }
  return y;
}

Tensor RunTrunk(const ParamStore& params, const ModelSpec& spec, Tensor x,
                std::size_t first, std::size_t last,
                const DropoutContext* ctx) {
  const auto& table = kernels::Active();
  for (std::size_t i = first; i < last; ++i) {
    const LayerSpec& l = spec.layers[i];
    switch (l.kind) {
      case LayerSpec::Kind::kLinear:
        x = Linear(x, params.Value(LayerWeightName(i)),
                   params.Value(LayerBiasName(i)));
        break;
      case LayerSpec::Kind::kRelu:
        table.relu(x.data(), x.data(), x.size());
        break;
      case LayerSpec::Kind::kDropout:
        if (ctx != nullptr && ctx->active && l.rate > 0.0) {
          const Tensor mask = DropoutMask(x.rows(), x.cols(), l.rate, *ctx, i);
          table.mul(x.data(), mask.data(), x.data(), x.size());
        }
        break;
    }
  }
  return x;
}

std::vector<Tensor> RunHeads(const ParamStore& params, const ModelSpec& spec,
                             const Tensor& features) {
  std::vector<Tensor> out;
  out.reserve(spec.head_dims.size());
  for (std::size_t h = 0; h < spec.head_dims.size(); ++h) {
    out.push_back(Linear(features, params.Value(HeadWeightName(h)),
                         params.Value(HeadBiasName(h))));
  }
  return out;
}

std::vector<Tensor> ModelForward(const ParamStore& params,
                                 const ModelSpec& spec, const Tensor& x,
                                 const DropoutContext* ctx) {
  if (x.cols() != spec.input_dim) {
    throw ValidationError("model_forward: input has " +
                          std::to_string(x.cols()) + " columns, model expects " +
                          std::to_string(spec.input_dim));
  }
  const Tensor features =
      RunTrunk(params, spec, x, 0, spec.layers.size(), ctx);
  return RunHeads(params, spec, features);
}

std::vector<Tensor> ModelForward(const ParamStore& params,
                                 const ModelSpec& spec, const Tensor& x,
                                 bool training, const RngStream& rng) {
  std::vector<std::uint64_t> keys(x.rows());
  std::iota(keys.begin(), keys.end(), std::uint64_t{0});
  DropoutContext ctx{rng, keys, 0, training};
  return ModelForward(params, spec, x, &ctx);
}

}  // namespace selqa::nn
