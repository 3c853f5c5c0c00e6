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

#include "selqa/uq/fit.hpp"

#include "selqa/nn/rng.hpp"
#include "selqa/uq/mve.hpp"

namespace selqa::uq {

FitLog Fit(ConvertedModel& model, const nn::TrainingSet& data,
           const nn::TrainConfig& config) {
  data.Validate(model.spec);
  FitLog log;
  switch (model.method.kind) {
    case MethodKind::kBaseline:
    case MethodKind::kMcDropout:
      log.push_back(nn::TrainStandard(model.params(), model.spec, data, config));
      break;
    case MethodKind::kEnsemble: {
      const nn::RngStream seeds(config.seed, nn::Tag("ensemble-train"));
      for (std::size_t i = 0; i < model.members.size(); ++i) {
        nn::TrainConfig member = config;
        member.seed = seeds.Split(i).NextU64();
        log.push_back(
            nn::TrainStandard(model.members[i], model.spec, data, member));
      }
      break;
    }
    case MethodKind::kMve:
    case MethodKind::kComposed: {
      const nn::RngStream rng(config.seed, nn::Tag("mve"));
      const ConvertedModel& m = model;
      log.push_back(nn::Train(
          model.params(), data, config,
          [&](nn::ParamStore& p, const nn::Batch& b, std::uint64_t step) {
            return MveLossStep(m, p, b, rng, step);
          }));
      break;
    }
  }
  return log;
}

}  // namespace selqa::uq
