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

#ifndef SELQA_TASKS_GENERATE_HPP_
#define SELQA_TASKS_GENERATE_HPP_

#include <cstddef>
#include <vector>

#include "selqa/tasks/spec.hpp"

namespace selqa::tasks {

// Cluster centers on a circle: class k at angle 2*pi*k/K.
std::vector<std::vector<double>> ClusterCenters(const TaskSpec& spec);
// The class whose cluster carries label noise.
inline constexpr std::size_t kNoisyCluster = 1;
// The class whose cluster is displaced to form the OOD blob.
inline constexpr std::size_t kOodSourceCluster = 0;

// Gaussian clusters with a label-noise region and a displaced OOD blob.
Dataset GenClassification(const TaskSpec& spec);

// Marker-and-answer contexts; decoy markers make examples ambiguous.
Dataset GenExtractive(const TaskSpec& spec);
// Reserved marker ids: the top n_markers ids of the vocabulary.
bool IsMarker(const TaskSpec& spec, std::size_t token);

// Order-2 Markov chain over the emitting tokens [0, V - held_out).
struct MarkovChain {
  std::size_t vocab_size = 0;
  std::size_t emitting = 0;
  // Row (a * vocab_size + b) holds P(next | a, b) over the full vocabulary.
  std::vector<std::vector<double>> transitions;
  std::vector<bool> high_entropy;

  std::size_t State(std::size_t a, std::size_t b) const {
    return a * vocab_size + b;
  }
};

MarkovChain BuildChain(const TaskSpec& spec);
Dataset GenGenerative(const TaskSpec& spec);

// Dispatches on spec.task after validating the spec.
Dataset Generate(const TaskSpec& spec);

}  // namespace selqa::tasks

#endif  // SELQA_TASKS_GENERATE_HPP_
