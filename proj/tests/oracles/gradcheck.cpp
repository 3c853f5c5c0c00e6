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

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "selqa/nn/model.hpp"
#include "selqa/nn/train.hpp"
#include "selqa/uq/convert.hpp"
#include "selqa/uq/mve.hpp"

namespace selqa::oracle {

GradCheckResult CheckRandomNet(std::uint64_t index, double h) {
  nn::RngStream r(index, nn::Tag("gradcheck"));
  const std::size_t depth = 1 + r.UniformIndex(3);
  std::vector<std::size_t> hidden;
  for (std::size_t i = 0; i < depth; ++i) hidden.push_back(2 + r.UniformIndex(31));
  const bool multi_row = index % 3 == 2;
  const bool mve = index % 2 == 1;
  const std::size_t input = 1 + r.UniformIndex(6);
  std::vector<std::size_t> heads =
      multi_row ? std::vector<std::size_t>{1, 1}
                : std::vector<std::size_t>{2 + r.UniformIndex(4)};
  const double rate = r.Uniform() < 0.5 ? 0.0 : 0.3;
  const nn::ModelSpec spec = nn::ModelSpec::Mlp(input, hidden, heads, rate);

  const nn::RngStream loss_rng(index, nn::Tag("gradcheck-loss"));
  const nn::RngStream dropout_rng =
      mve ? loss_rng.Split(nn::Tag("dropout")) : loss_rng;
  constexpr std::uint64_t kStep = 7;

  // Central differences are only valid where the loss is smooth over
  // [theta - h, theta + h], so draws with any ReLU input closer to its kink
  // than kKinkMargin are discarded and redrawn.
  constexpr double kKinkMargin = 1e-3;
  nn::TrainingSet data;
  nn::Batch batch;
  uq::ConvertedModel model;
  for (std::size_t attempt = 0;; ++attempt) {
    if (attempt == 1000) throw std::runtime_error("no kink-free draw found");
    data = nn::TrainingSet{};
    data.rows_per_example = multi_row ? 3 : 1;
    const std::size_t examples = 4;
    data.features = nn::Tensor(examples * data.rows_per_example, input);
    for (double& v : data.features.values()) v = r.Normal();
    data.labels.resize(heads.size());
    for (std::size_t e = 0; e < examples; ++e) {
      data.keys.push_back(100 + e);
      for (std::size_t hd = 0; hd < heads.size(); ++hd) {
        data.labels[hd].push_back(
            r.UniformIndex(data.rows_per_example * heads[hd]));
      }
    }
    std::vector<std::size_t> all(examples);
    for (std::size_t i = 0; i < examples; ++i) all[i] = i;
    batch = nn::MakeBatch(data, all);

    model = uq::Convert(spec, nn::InitParams(spec, index),
                        mve ? uq::UqMethod::Mve(3) : uq::UqMethod::Baseline(),
                        index,
                        index % 4 == 1 ? uq::MveAggregation::kLogitMean
                                       : uq::MveAggregation::kProbabilityMean);
    // Move every parameter (the zero-initialized sigma head included) off
    // its special initial value.
    for (auto& e : model.params().entries()) {
      for (double& v : e.value.values()) v += 0.3 * r.Normal();
    }
    const nn::DropoutContext ctx{dropout_rng, batch.row_keys, kStep, true};
    nn::Tensor x = batch.x;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
      x = nn::RunTrunk(model.params(), spec, std::move(x), i, i + 1, &ctx);
      const bool feeds_relu = i + 1 < spec.layers.size() &&
                              spec.layers[i + 1].kind == nn::LayerSpec::Kind::kRelu;
      if (feeds_relu) {
        for (double v : x.values()) margin = std::min(margin, std::abs(v));
      }
    }
    if (margin > kKinkMargin) break;
  }
  auto loss = [&](nn::ParamStore& p) {
    p.ZeroGrad();
    return mve ? uq::MveLossStep(model, p, batch, loss_rng, kStep)
               : nn::StandardLossStep(p, model.spec, batch, loss_rng, kStep);
  };

  nn::ParamStore params = model.params();
  loss(params);
  GradCheckResult out;
  out.description = std::string(mve ? "mve" : "standard") + " depth " +
                    std::to_string(depth) + (multi_row ? " multi-row" : "") +
                    (rate > 0.0 ? " dropout" : "");
  nn::ParamStore probe = params;
  for (std::size_t k = 0; k < params.entries().size(); ++k) {
    auto& value = probe.entries()[k].value;
    const auto& grad = params.entries()[k].grad;
    for (std::size_t i = 0; i < value.size(); ++i) {
      std::vector<double> coord = {value[i]};
      auto f = [&](std::vector<double>& c) {
        value[i] = c[0];
        return loss(probe);
      };
      const double numeric = CentralDifference(f, coord, 0, h);
      value[i] = coord[0];
      out.max_relative_error = std::max(
          out.max_relative_error, RelativeError(grad[i], numeric, 1e-6));
      ++out.params_checked;
    }
  }
  return out;
}

}  // namespace selqa::oracle
