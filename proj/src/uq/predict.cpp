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

#include "selqa/uq/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "selqa/kernels/kernels.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"
#include "selqa/nn/model.hpp"

namespace selqa::uq {

void MomentAccumulator::Add(const nn::Tensor& sample) {
  if (count_ == 0) {
    mean_ = sample;
    m2_ = nn::Tensor(sample.rows(), sample.cols());
    count_ = 1;
    return;
  }
  nn::RequireSameShape(mean_, sample, "moment accumulator");
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double d = sample[i] - mean_[i];
    mean_[i] += d * inv;
    m2_[i] += d * (sample[i] - mean_[i]);
  }
}

nn::Tensor MomentAccumulator::Variance() const {
  nn::Tensor v = m2_;
  if (count_ > 0) {
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= inv;
  }
  return v;
}

namespace {

std::size_t FirstDropout(const nn::ModelSpec& spec) {
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    if (spec.layers[i].kind == nn::LayerSpec::Kind::kDropout) return i;
  }
  return spec.layers.size();
}

nn::Tensor SigmaHead(const ConvertedModel& model, const nn::ParamStore& params,
                     const nn::Tensor& feat, std::size_t head) {
  nn::Tensor s(feat.rows(), model.spec.head_dims[head]);
  if (model.frozen_sigma) {
    s.Fill(*model.frozen_sigma);
    return s;
  }
  s = nn::Linear(feat, params.Value(LogSigmaWeightName(head)),
                 params.Value(LogSigmaBiasName(head)));
  for (double& v : s.values()) {
    v = std::clamp(std::exp(v), kSigmaMin, kSigmaMax);
  }
  return s;
}

// Layers [first, end) with either drawn or injected masks.
nn::Tensor RunSuffix(const ConvertedModel& model, const nn::Tensor& prefix,
                     std::size_t first, const nn::DropoutContext& ctx,
                     const nn::Tensor* fixed_mask) {
  if (fixed_mask == nullptr) {
    return nn::RunTrunk(model.params(), model.spec, prefix, first,
                        model.spec.layers.size(), &ctx);
  }
  nn::Tensor x = prefix;
  for (std::size_t i = first; i < model.spec.layers.size(); ++i) {
    if (model.spec.layers[i].kind == nn::LayerSpec::Kind::kDropout) {
      nn::RequireSameShape(x, *fixed_mask, "fixed dropout mask");
      for (std::size_t k = 0; k < x.size(); ++k) x[k] *= (*fixed_mask)[k];
    } else {
      x = nn::RunTrunk(model.params(), model.spec, std::move(x), i, i + 1,
                       nullptr);
    }
  }
  return x;
}

std::vector<HeadMoments> Deterministic(const ConvertedModel& model,
                                       const nn::ParamStore& params,
                                       const nn::Tensor& x) {
  const nn::Tensor feat = nn::RunTrunk(params, model.spec, x, 0,
                                       model.spec.layers.size(), nullptr);
  std::vector<nn::Tensor> logits = nn::RunHeads(params, model.spec, feat);
  std::vector<HeadMoments> out;
  for (std::size_t h = 0; h < logits.size(); ++h) {
    HeadMoments m;
    m.aleatoric = model.method.HasSigmaHead()
                      ? SigmaHead(model, params, feat, h)
                      : nn::Tensor(logits[h].rows(), logits[h].cols());
    m.epistemic = nn::Tensor(logits[h].rows(), logits[h].cols());
    m.mean = std::move(logits[h]);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<HeadMoments> McMoments(const ConvertedModel& model,
                                   const nn::Tensor& x,
                                   const InferOptions& options) {
  const std::size_t passes = options.fixed_masks != nullptr
                                 ? options.fixed_masks->size()
                                 : model.method.samples;
  if (passes < 2) {
    throw ValidationError("MC inference needs at least 2 passes, got " +
                          std::to_string(passes));
  }
  std::vector<std::uint64_t> default_keys;
  std::span<const std::uint64_t> keys = options.row_keys;
  if (keys.empty()) {
    default_keys.resize(x.rows());
    std::iota(default_keys.begin(), default_keys.end(), std::uint64_t{0});
    keys = default_keys;
  } else if (keys.size() != x.rows()) {
    throw ValidationError("row key count does not match input rows");
  }
  const std::size_t first = FirstDropout(model.spec);
  const nn::Tensor prefix =
      nn::RunTrunk(model.params(), model.spec, x, 0, first, nullptr);
  const std::size_t heads = model.spec.head_dims.size();
  std::vector<MomentAccumulator> logit_acc(heads), sigma_acc(heads);
  for (std::size_t t = 0; t < passes; ++t) {
    const nn::DropoutContext ctx{options.rng, keys, t, true};
    const nn::Tensor feat =
        RunSuffix(model, prefix, first, ctx,
                  options.fixed_masks ? &(*options.fixed_masks)[t] : nullptr);
    const std::vector<nn::Tensor> logits =
        nn::RunHeads(model.params(), model.spec, feat);
    for (std::size_t h = 0; h < heads; ++h) {
      logit_acc[h].Add(logits[h]);
      if (model.method.HasSigmaHead()) {
        sigma_acc[h].Add(SigmaHead(model, model.params(), feat, h));
      }
    }
  }
  std::vector<HeadMoments> out;
  for (std::size_t h = 0; h < heads; ++h) {
    HeadMoments m;
    m.mean = logit_acc[h].mean();
    m.epistemic = logit_acc[h].Variance();
    m.aleatoric = model.method.HasSigmaHead()
                      ? sigma_acc[h].mean()
                      : nn::Tensor(m.mean.rows(), m.mean.cols());
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<HeadMoments> EnsembleMoments(const ConvertedModel& model,
                                         const nn::Tensor& x) {
  const std::size_t heads = model.spec.head_dims.size();
  std::vector<MomentAccumulator> acc(heads);
  for (const nn::ParamStore& member : model.members) {
    const nn::Tensor feat = nn::RunTrunk(member, model.spec, x, 0,
                                         model.spec.layers.size(), nullptr);
    const std::vector<nn::Tensor> logits = nn::RunHeads(member, model.spec, feat);
    for (std::size_t h = 0; h < heads; ++h) acc[h].Add(logits[h]);
  }
  std::vector<HeadMoments> out;
  for (std::size_t h = 0; h < heads; ++h) {
    HeadMoments m;
    m.mean = acc[h].mean();
    m.epistemic = acc[h].Variance();
    m.aleatoric = nn::Tensor(m.mean.rows(), m.mean.cols());
    out.push_back(std::move(m));
  }
  return out;
}

void RequireKind(const ConvertedModel& model, MethodKind kind) {
  if (model.method.kind != kind) {
    throw ValidationError("expected a " + std::string(MethodName(kind)) +
                          " model, got " + model.method.Name());
  }
}

}  // namespace

std::vector<HeadMoments> InferMoments(const ConvertedModel& model,
                                      const nn::Tensor& x,
                                      const InferOptions& options) {
  if (x.cols() != model.spec.input_dim) {
    throw ValidationError("input has " + std::to_string(x.cols()) +
                          " columns, model expects " +
                          std::to_string(model.spec.input_dim));
  }
  switch (model.method.kind) {
    case MethodKind::kBaseline:
    case MethodKind::kMve:
      return Deterministic(model, model.params(), x);
    case MethodKind::kMcDropout:
    case MethodKind::kComposed:
      return McMoments(model, x, options);
    case MethodKind::kEnsemble:
      return EnsembleMoments(model, x);
  }
  throw ValidationError("unknown method");
}

UncertaintyOutput Summarize(const ConvertedModel& model, std::size_t head,
                            std::span<const double> mu,
                            std::span<const double> aleatoric,
                            std::span<const double> epistemic,
                            ReduceMode mode) {
  UncertaintyOutput out;
  out.mu.assign(mu.begin(), mu.end());
  out.predicted = nn::Argmax(mu);
  const std::vector<double> p = nn::Softmax(mu);
  out.confidence = p[out.predicted];
  out.aleatoric = UncertaintyReduce(aleatoric, out.predicted, mode);
  out.epistemic = UncertaintyReduce(epistemic, out.predicted, mode);
  switch (model.method.kind) {
    case MethodKind::kBaseline:
      out.sigma_vec.resize(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) out.sigma_vec[i] = 1.0 - p[i];
      break;
    case MethodKind::kMve:
      out.sigma_vec.assign(aleatoric.begin(), aleatoric.end());
      break;
    case MethodKind::kMcDropout:
    case MethodKind::kEnsemble:
      out.sigma_vec.assign(epistemic.begin(), epistemic.end());
      break;
    case MethodKind::kComposed: {
      if (!model.calibration || head >= model.calibration->heads.size()) {
        throw ValidationError("composed prediction requires calibration stats");
      }
      const auto& c = model.calibration->heads[head];
      out.sigma_vec.resize(mu.size());
      for (std::size_t i = 0; i < mu.size(); ++i) {
        out.sigma_vec[i] = (aleatoric[i] - c.aleatoric_mean) / c.aleatoric_std +
                           (epistemic[i] - c.epistemic_mean) / c.epistemic_std;
      }
      out.sigma = (out.aleatoric - c.aleatoric_mean) / c.aleatoric_std +
                  (out.epistemic - c.epistemic_mean) / c.epistemic_std;
      return out;
    }
  }
  out.sigma = UncertaintyReduce(out.sigma_vec, out.predicted, mode);
  return out;
}

std::vector<UncertaintyOutput> Predict(const ConvertedModel& model,
                                       const nn::Tensor& x,
                                       const InferOptions& options,
                                       ReduceMode mode, std::size_t head) {
  if (head >= model.spec.head_dims.size()) {
    throw ValidationError("head index out of range");
  }
  if (model.method.kind == MethodKind::kComposed && !model.calibration) {
    throw ValidationError("composed prediction requires calibration stats");
  }
  const std::vector<HeadMoments> m = InferMoments(model, x, options);
  std::vector<UncertaintyOutput> out;
  out.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    out.push_back(Summarize(model, head, m[head].mean.row(r),
                            m[head].aleatoric.row(r), m[head].epistemic.row(r),
                            mode));
  }
  return out;
}

std::vector<UncertaintyOutput> BaselinePredict(const ConvertedModel& model,
                                               const nn::Tensor& x) {
  RequireKind(model, MethodKind::kBaseline);
  return Predict(model, x);
}

std::vector<UncertaintyOutput> MvePredict(const ConvertedModel& model,
                                          const nn::Tensor& x) {
  RequireKind(model, MethodKind::kMve);
  return Predict(model, x);
}

std::vector<UncertaintyOutput> McPredict(const ConvertedModel& model,
                                         const nn::Tensor& x,
                                         const InferOptions& options) {
  RequireKind(model, MethodKind::kMcDropout);
  return Predict(model, x, options);
}

std::vector<UncertaintyOutput> EnsemblePredict(const ConvertedModel& model,
                                               const nn::Tensor& x) {
  RequireKind(model, MethodKind::kEnsemble);
  return Predict(model, x);
}

std::vector<UncertaintyOutput> ComposedPredict(const ConvertedModel& model,
                                               const nn::Tensor& x,
                                               const InferOptions& options) {
  RequireKind(model, MethodKind::kComposed);
  return Predict(model, x, options);
}

CalibrationStats CalibrateStats(const ConvertedModel& model,
                                const nn::Tensor& x,
                                const InferOptions& options, ReduceMode mode) {
  RequireKind(model, MethodKind::kComposed);
  const std::vector<HeadMoments> m = InferMoments(model, x, options);
  std::vector<std::vector<double>> al(m.size()), ep(m.size());
  for (std::size_t h = 0; h < m.size(); ++h) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const std::size_t pred = nn::Argmax(m[h].mean.row(r));
      al[h].push_back(UncertaintyReduce(m[h].aleatoric.row(r), pred, mode));
      ep[h].push_back(UncertaintyReduce(m[h].epistemic.row(r), pred, mode));
    }
  }
  return CalibrationFromScores(al, ep);
}

}  // namespace selqa::uq
