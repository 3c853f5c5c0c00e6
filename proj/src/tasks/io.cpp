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

#include "selqa/tasks/io.hpp"

#include <sstream>

#include "json.hpp"
#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"

namespace selqa::tasks {

using nlohmann::json;

namespace {

constexpr const char* kKind = "selqa-dataset";

json ExampleJson(const ClassificationExample& ex) {
  return {{"id", ex.id},
          {"features", ex.features},
          {"label", ex.label},
          {"clean_label", ex.clean_label},
          {"region", RegionName(ex.region)}};
}

json ExampleJson(const ExtractiveExample& ex) {
  return {{"id", ex.id},
          {"context", ex.context},
          {"question", ex.question},
          {"start", ex.start},
          {"end", ex.end},
          {"ambiguous", ex.ambiguous}};
}

json ExampleJson(const GenerativeExample& ex) {
  return {{"id", ex.id},
          {"prompt", ex.prompt},
          {"target", ex.target},
          {"ood", ex.ood}};
}

}  // namespace

std::string DatasetToJsonl(const Dataset& ds,
                           const std::optional<SplitInfo>& split) {
  json header = {{"kind", kKind},
                 {"spec", ds.spec.ToJson()},
                 {"count", ds.size()}};
  if (split) {
    header["split"] = split->name;
    header["parent_hash"] = split->parent_hash;
  }
  std::string out = header.dump() + "\n";
  for (const auto& ex : ds.classification) out += ExampleJson(ex).dump() + "\n";
  for (const auto& ex : ds.extractive) out += ExampleJson(ex).dump() + "\n";
  for (const auto& ex : ds.generative) out += ExampleJson(ex).dump() + "\n";
  return out;
}

Dataset DatasetFromJsonl(const std::string& text,
                         std::optional<SplitInfo>* split) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  Dataset ds;
  std::size_t expected = 0;
  try {
    if (!std::getline(in, line)) throw ValidationError("empty dataset file");
    ++line_no;
    const json header = json::parse(line);
    if (header.value("kind", "") != kKind) {
      throw ValidationError("not a dataset file (missing header)");
    }
    ds.spec = TaskSpec::FromJson(header.at("spec"));
    expected = header.at("count").get<std::size_t>();
    if (split != nullptr) {
      if (header.contains("split")) {
        *split = SplitInfo{header.at("split").get<std::string>(),
                           header.at("parent_hash").get<std::string>()};
      } else {
        split->reset();
      }
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      switch (ds.spec.task) {
        case TaskKind::kClassification: {
          ClassificationExample ex;
          ex.id = j.at("id").get<std::uint64_t>();
          ex.features = j.at("features").get<std::vector<double>>();
          ex.label = j.at("label").get<std::size_t>();
          ex.clean_label = j.at("clean_label").get<std::size_t>();
          const auto r = ParseRegion(j.at("region").get<std::string>());
          if (!r) throw ValidationError("unknown region");
          ex.region = *r;
          ds.classification.push_back(std::move(ex));
          break;
        }
        case TaskKind::kExtractive: {
          ExtractiveExample ex;
          ex.id = j.at("id").get<std::uint64_t>();
          ex.context = j.at("context").get<std::vector<std::size_t>>();
          ex.question = j.at("question").get<std::vector<std::size_t>>();
          ex.start = j.at("start").get<std::size_t>();
          ex.end = j.at("end").get<std::size_t>();
          ex.ambiguous = j.at("ambiguous").get<bool>();
          if (!(ex.start <= ex.end && ex.end < ex.context.size())) {
            throw ValidationError("gold span out of bounds");
          }
          ds.extractive.push_back(std::move(ex));
          break;
        }
        case TaskKind::kGenerative: {
          GenerativeExample ex;
          ex.id = j.at("id").get<std::uint64_t>();
          ex.prompt = j.at("prompt").get<std::vector<std::size_t>>();
          ex.target = j.at("target").get<std::vector<std::size_t>>();
          ex.ood = j.at("ood").get<bool>();
          ds.generative.push_back(std::move(ex));
          break;
        }
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError("dataset line " + std::to_string(line_no) + ": " +
                          e.what());
  }
  if (ds.size() != expected) {
    throw ValidationError("dataset header promises " + std::to_string(expected) +
                          " examples, found " + std::to_string(ds.size()));
  }
  return ds;
}

std::string ContentHash(const std::string& bytes) {
  return nn::HashHex(nn::Fnv1a64(bytes));
}

void WriteDataset(const std::filesystem::path& path, const Dataset& ds,
                  const std::optional<SplitInfo>& split) {
  nn::WriteFileAtomic(path, DatasetToJsonl(ds, split));
}

Dataset ReadDataset(const std::filesystem::path& path,
                    std::optional<SplitInfo>* split) {
  return DatasetFromJsonl(nn::ReadFile(path), split);
}

}  // namespace selqa::tasks
