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

#include <cmath>
#include <numbers>

#include "selqa/nn/rng.hpp"
#include "selqa/tasks/generate.hpp"

namespace selqa::tasks {

std::vector<std::vector<double>> ClusterCenters(const TaskSpec& spec) {
  std::vector<std::vector<double>> centers;
  for (std::size_t k = 0; k < spec.n_classes; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(spec.n_classes);
    centers.push_back({spec.cluster_radius * std::cos(a),
                       spec.cluster_radius * std::sin(a)});
  }
  return centers;
}

Dataset GenClassification(const TaskSpec& spec) {
  Dataset ds;
  ds.spec = spec;
  const auto centers = ClusterCenters(spec);
  const nn::RngStream root(spec.seed, nn::Tag("classification"));
  const bool has_ood = spec.ood_shift > 0.0 && spec.ood_fraction > 0.0;
  for (std::size_t i = 0; i < spec.n_examples; ++i) {
    nn::RngStream rng = root.Split(i);
    ClassificationExample ex;
    ex.id = i;
    const bool ood = rng.Uniform() < spec.ood_fraction && has_ood;
    if (ood) {
      std::vector<double> c = centers[kOodSourceCluster];
      c[0] += spec.ood_shift;
      ex.features = {c[0] + rng.Normal(), c[1] + rng.Normal()};
      ex.label = rng.UniformIndex(spec.n_classes);
      ex.clean_label = ex.label;
      ex.region = Region::kOod;
    } else {
      const std::size_t k = rng.UniformIndex(spec.n_classes);
      ex.features = {centers[k][0] + rng.Normal(), centers[k][1] + rng.Normal()};
      ex.clean_label = k;
      ex.label = k;
      if (k == kNoisyCluster && spec.noise_rate > 0.0) {
        ex.region = Region::kNoisy;
        if (rng.Uniform() < spec.noise_rate) {
          // Uniform over the other classes.
          const std::size_t shift = 1 + rng.UniformIndex(spec.n_classes - 1);
          ex.label = (k + shift) % spec.n_classes;
        }
      }
    }
    ds.classification.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace selqa::tasks
