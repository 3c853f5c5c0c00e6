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

#include "selqa/uq/convert.hpp"

#include <chrono>

#include "selqa/nn/error.hpp"

namespace selqa::uq {

std::string LogSigmaWeightName(std::size_t head) {
  return "head" + std::to_string(head) + ".logsigma.W";
}
std::string LogSigmaBiasName(std::size_t head) {
  return "head" + std::to_string(head) + ".logsigma.b";
}

namespace {

void AddSigmaHeads(const nn::ModelSpec& spec, nn::ParamStore& params) {
  const std::size_t feat = spec.TrunkOutputDim();
  for (std::size_t h = 0; h < spec.head_dims.size(); ++h) {
    // Zero weights and bias: sigma = exp(0) = 1 everywhere at conversion.
    params.Add(LogSigmaWeightName(h), nn::Tensor(feat, spec.head_dims[h]));
    params.Add(LogSigmaBiasName(h), nn::Tensor(1, spec.head_dims[h]));
  }
}

// Returns true when a dropout layer had to be injected.
bool ApplyDropout(nn::ModelSpec& spec, double rate) {
  bool found = false;
  for (auto& l : spec.layers) {
    if (l.kind == nn::LayerSpec::Kind::kDropout) {
      l.rate = rate;
      found = true;
    }
  }
  if (!found) spec.layers.push_back(nn::LayerSpec::Dropout(rate));
  return !found;
}

}  // namespace

ConvertedModel Convert(const nn::ModelSpec& base_spec,
                       const nn::ParamStore& base_params,
                       const UqMethod& method, std::uint64_t seed,
                       MveAggregation aggregation) {
  const auto start = std::chrono::steady_clock::now();
  base_spec.Validate();
  method.Validate();
  if (base_params.Count() != nn::CountParams(base_spec)) {
    throw ValidationError("base parameters do not match the model spec");
  }

  ConvertedModel model;
  model.spec = base_spec;
  model.method = method;
  model.seed = seed;
  model.aggregation = aggregation;
  model.base_param_count = base_params.Count();

  switch (method.kind) {
    case MethodKind::kBaseline:
      model.members.push_back(base_params);
      break;
    case MethodKind::kMve:
      model.members.push_back(base_params);
      AddSigmaHeads(model.spec, model.members.front());
      break;
    case MethodKind::kMcDropout:
      model.injected_dropout = ApplyDropout(model.spec, method.rate);
      model.members.push_back(base_params);
      break;
    case MethodKind::kEnsemble: {
      const nn::RngStream seeds(seed, nn::Tag("ensemble"));
      for (std::size_t i = 0; i < method.members; ++i) {
        model.members.push_back(
            nn::InitParams(base_spec, seeds.Split(i).NextU64()));
      }
      break;
    }
    case MethodKind::kComposed:
      model.injected_dropout = ApplyDropout(model.spec, method.rate);
      model.members.push_back(base_params);
      AddSigmaHeads(model.spec, model.members.front());
      break;
  }
  model.conversion_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return model;
}

std::size_t CountParams(const ConvertedModel& model) {
  std::size_t n = 0;
  for (const auto& m : model.members) n += m.Count();
  return n;
}

}  // namespace selqa::uq
