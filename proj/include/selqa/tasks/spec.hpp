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

#ifndef SELQA_TASKS_SPEC_HPP_
#define SELQA_TASKS_SPEC_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace selqa::tasks {

enum class TaskKind { kClassification, kExtractive, kGenerative };

std::string_view TaskName(TaskKind kind);
std::optional<TaskKind> ParseTaskKind(std::string_view name);

struct TaskSpec {
  TaskKind task = TaskKind::kClassification;
  std::size_t n_examples = 5000;
  double noise_rate = 0.25;  // eta
  double ood_shift = 6.0;    // delta, classification feature displacement
  std::size_t vocab_size = 16;
  std::size_t context_len = 12;
  std::size_t answer_len = 2;
  std::uint64_t seed = 0;

  // Classification.
  std::size_t n_classes = 4;
  double cluster_radius = 4.0;
  // Share of generated examples drawn from the displaced test-only blob.
  double ood_fraction = 0.06;

  // Extractive.
  std::size_t n_markers = 4;  // reserved ids at the top of the vocabulary

  // Generative.
  std::size_t prompt_len = 3;
  std::size_t target_len = 6;
  std::size_t branching = 0;  // 0 means the whole emitting vocabulary
  std::size_t held_out_tokens = 2;
  double ood_prompt_fraction = 0.1;

  // Throws ValidationError listing the violated constraint.
  void Validate() const;
  // Upper bound on spans considered by extractive decoding.
  std::size_t MaxSpanLen() const { return answer_len + 2; }

  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static TaskSpec FromJson(const nlohmann::json& j);

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

enum class Region { kClean, kNoisy, kOod };

std::string_view RegionName(Region r);
std::optional<Region> ParseRegion(std::string_view name);

struct ClassificationExample {
  std::uint64_t id = 0;
  std::vector<double> features;
  std::size_t label = 0;
  // Label before noise was applied; equals label outside the noisy region
  // and is a fresh draw for OOD examples.
  std::size_t clean_label = 0;
  Region region = Region::kClean;

  friend bool operator==(const ClassificationExample&,
                         const ClassificationExample&) = default;
};

struct ExtractiveExample {
  std::uint64_t id = 0;
  std::vector<std::size_t> context;
  std::vector<std::size_t> question;
  std::size_t start = 0;  // inclusive gold span
  std::size_t end = 0;
  bool ambiguous = false;

  friend bool operator==(const ExtractiveExample&,
                         const ExtractiveExample&) = default;
};

struct GenerativeExample {
  std::uint64_t id = 0;
  std::vector<std::size_t> prompt;
  std::vector<std::size_t> target;
  // Prompt opens with a token the chain never emits.
  bool ood = false;

  friend bool operator==(const GenerativeExample&,
                         const GenerativeExample&) = default;
};

// One task's examples; only the vector matching spec.task is populated.
struct Dataset {
  TaskSpec spec;
  std::vector<ClassificationExample> classification;
  std::vector<ExtractiveExample> extractive;
  std::vector<GenerativeExample> generative;

  std::size_t size() const;
  std::uint64_t IdAt(std::size_t i) const;
  bool IsOod(std::size_t i) const;
  // Subset in the given order.
  Dataset Subset(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace selqa::tasks

#endif  // SELQA_TASKS_SPEC_HPP_
