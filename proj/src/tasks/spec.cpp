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

#include "selqa/tasks/spec.hpp"

#include <set>

#include "selqa/nn/error.hpp"

namespace selqa::tasks {

std::string_view TaskName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kClassification: return "classification";
    case TaskKind::kExtractive: return "extractive";
    case TaskKind::kGenerative: return "generative";
  }
  return "?";
}

std::optional<TaskKind> ParseTaskKind(std::string_view name) {
  for (TaskKind k : {TaskKind::kClassification, TaskKind::kExtractive,
                     TaskKind::kGenerative}) {
    if (TaskName(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view RegionName(Region r) {
  switch (r) {
    case Region::kClean: return "clean";
    case Region::kNoisy: return "noisy";
    case Region::kOod: return "ood";
  }
  return "?";
}

std::optional<Region> ParseRegion(std::string_view name) {
  for (Region r : {Region::kClean, Region::kNoisy, Region::kOod}) {
    if (RegionName(r) == name) return r;
  }
  return std::nullopt;
}

void TaskSpec::Validate() const {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };
  check(noise_rate >= 0.0 && noise_rate < 0.5,
        "noise_rate must be in [0, 0.5)");
  check(ood_shift >= 0.0, "ood_shift must be >= 0");
  check(answer_len >= 1, "answer_len must be >= 1");
  check(context_len >= answer_len, "context_len must be >= answer_len");
  check(n_classes >= 2, "n_classes must be >= 2");
  check(cluster_radius > 0.0, "cluster_radius must be > 0");
  check(ood_fraction >= 0.0 && ood_fraction < 1.0,
        "ood_fraction must be in [0, 1)");
  check(ood_prompt_fraction >= 0.0 && ood_prompt_fraction < 1.0,
        "ood_prompt_fraction must be in [0, 1)");
  if (task == TaskKind::kExtractive) {
    check(context_len > answer_len + 2,
          "extractive tasks need context_len > answer_len + 2");
    check(n_markers >= 1, "n_markers must be >= 1");
    check(vocab_size >= n_markers + 2,
          "vocab_size too small to reserve marker tokens");
  }
  if (task == TaskKind::kGenerative) {
    check(vocab_size >= 8, "generative tasks need vocab_size >= 8");
    check(held_out_tokens + 2 <= vocab_size,
          "held_out_tokens leaves fewer than 2 emitting tokens");
    check(prompt_len >= 2, "prompt_len must be >= 2");
    check(target_len >= 1, "target_len must be >= 1");
    check(branching <= vocab_size - held_out_tokens,
          "branching exceeds the emitting vocabulary");
  }
  if (!errors.empty()) {
    std::string msg = "invalid task spec:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
}

nlohmann::json TaskSpec::ToJson() const {
  return {{"task", TaskName(task)},
          {"n_examples", n_examples},
          {"noise_rate", noise_rate},
          {"ood_shift", ood_shift},
          {"vocab_size", vocab_size},
          {"context_len", context_len},
          {"answer_len", answer_len},
          {"seed", seed},
          {"n_classes", n_classes},
          {"cluster_radius", cluster_radius},
          {"ood_fraction", ood_fraction},
          {"n_markers", n_markers},
          {"prompt_len", prompt_len},
          {"target_len", target_len},
          {"branching", branching},
          {"held_out_tokens", held_out_tokens},
          {"ood_prompt_fraction", ood_prompt_fraction}};
}

TaskSpec TaskSpec::FromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("task spec must be an object");
  TaskSpec s;
  std::vector<std::string> errors;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const auto& v = it.value();
    try {
      if (k == "task") {
        const auto t = ParseTaskKind(v.get<std::string>());
        if (!t) {
          errors.push_back("task: unknown task '" + v.get<std::string>() + "'");
        } else {
          s.task = *t;
        }
      } else if (k == "n_examples") { s.n_examples = v.get<std::size_t>();
      } else if (k == "noise_rate") { s.noise_rate = v.get<double>();
      } else if (k == "ood_shift") { s.ood_shift = v.get<double>();
      } else if (k == "vocab_size") { s.vocab_size = v.get<std::size_t>();
      } else if (k == "context_len") { s.context_len = v.get<std::size_t>();
      } else if (k == "answer_len") { s.answer_len = v.get<std::size_t>();
      } else if (k == "seed") { s.seed = v.get<std::uint64_t>();
      } else if (k == "n_classes") { s.n_classes = v.get<std::size_t>();
      } else if (k == "cluster_radius") { s.cluster_radius = v.get<double>();
      } else if (k == "ood_fraction") { s.ood_fraction = v.get<double>();
      } else if (k == "n_markers") { s.n_markers = v.get<std::size_t>();
      } else if (k == "prompt_len") { s.prompt_len = v.get<std::size_t>();
      } else if (k == "target_len") { s.target_len = v.get<std::size_t>();
      } else if (k == "branching") { s.branching = v.get<std::size_t>();
      } else if (k == "held_out_tokens") {
        s.held_out_tokens = v.get<std::size_t>();
      } else if (k == "ood_prompt_fraction") {
        s.ood_prompt_fraction = v.get<double>();
      } else {
        errors.push_back(k + ": unknown key");
      }
    } catch (const nlohmann::json::exception&) {
      errors.push_back(k + ": wrong type");
    }
  }
  if (!errors.empty()) {
    std::string msg = "invalid task spec:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return s;
}

std::size_t Dataset::size() const {
  switch (spec.task) {
    case TaskKind::kClassification: return classification.size();
    case TaskKind::kExtractive: return extractive.size();
    case TaskKind::kGenerative: return generative.size();
  }
  return 0;
}

std::uint64_t Dataset::IdAt(std::size_t i) const {
  switch (spec.task) {
    case TaskKind::kClassification: return classification.at(i).id;
    case TaskKind::kExtractive: return extractive.at(i).id;
    case TaskKind::kGenerative: return generative.at(i).id;
  }
  return 0;
}

bool Dataset::IsOod(std::size_t i) const {
  switch (spec.task) {
    case TaskKind::kClassification:
      return classification.at(i).region == Region::kOod;
    case TaskKind::kExtractive: return false;
    case TaskKind::kGenerative: return generative.at(i).ood;
  }
  return false;
}

Dataset Dataset::Subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.spec = spec;
  for (std::size_t i : indices) {
    switch (spec.task) {
      case TaskKind::kClassification:
        out.classification.push_back(classification.at(i));
        break;
      case TaskKind::kExtractive:
        out.extractive.push_back(extractive.at(i));
        break;
      case TaskKind::kGenerative:
        out.generative.push_back(generative.at(i));
        break;
    }
  }
  return out;
}

}  // namespace selqa::tasks
