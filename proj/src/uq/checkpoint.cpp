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

#include "selqa/uq/checkpoint.hpp"

#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"

namespace selqa::uq {

namespace {

constexpr const char* kManifestKind = "selqa-checkpoint";

std::string ManifestHash(nlohmann::json manifest) {
  manifest.erase("manifest_hash");
  return nn::HashHex(nn::Fnv1a64(manifest.dump()));
}

}  // namespace

nlohmann::json MethodToJson(const UqMethod& method) {
  return {{"kind", MethodName(method.kind)},
          {"samples", method.samples},
          {"members", method.members},
          {"rate", method.rate}};
}

UqMethod MethodFromJson(const nlohmann::json& j) {
  UqMethod m;
  try {
    const auto kind = ParseMethodKind(j.at("kind").get<std::string>());
    if (!kind) throw ValidationError("unknown method kind");
    m.kind = *kind;
    m.samples = j.at("samples").get<std::size_t>();
    m.members = j.at("members").get<std::size_t>();
    m.rate = j.at("rate").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed method: ") + e.what());
  }
  m.Validate();
  return m;
}

std::filesystem::path SaveModel(const ConvertedModel& model,
                                const std::filesystem::path& dir,
                                const std::string& name) {
  std::filesystem::create_directories(dir);
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t i = 0; i < model.members.size(); ++i) {
    const std::string file = name + ".m" + std::to_string(i) + ".bin";
    const nn::BlobRecord rec = nn::WriteParamBlob(model.members[i], dir / file);
    members.push_back({{"file", rec.file},
                       {"hash", nn::HashHex(rec.hash)},
                       {"count", rec.count},
                       {"layout", nn::ParamLayout(model.members[i])}});
  }
  nlohmann::json m = {
      {"kind", kManifestKind},
      {"spec", nn::SpecToJson(model.spec)},
      {"method", MethodToJson(model.method)},
      {"seed", model.seed},
      {"aggregation", AggregationName(model.aggregation)},
      {"injected_dropout", model.injected_dropout},
      {"base_param_count", model.base_param_count},
      {"members", members}};
  m["frozen_sigma"] = model.frozen_sigma ? nlohmann::json(*model.frozen_sigma)
                                         : nlohmann::json();
  m["calibration"] = model.calibration ? model.calibration->ToJson()
                                       : nlohmann::json();
  m["manifest_hash"] = ManifestHash(m);
  const auto path = dir / (name + ".json");
  nn::WriteFileAtomic(path, m.dump(2) + "\n");
  return path;
}

ConvertedModel LoadModel(const std::filesystem::path& manifest_path) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(nn::ReadFile(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed checkpoint manifest " +
                          manifest_path.string() + ": " + e.what());
  }
  if (!m.is_object() || m.value("kind", "") != kManifestKind) {
    throw ValidationError(manifest_path.string() +
                          " is not a checkpoint manifest");
  }
  if (!m.contains("manifest_hash") ||
      m["manifest_hash"] != ManifestHash(m)) {
    throw RuntimeError("checkpoint manifest hash mismatch: " +
                       manifest_path.string());
  }
  ConvertedModel model;
  const auto dir = manifest_path.parent_path();
  try {
    model.spec = nn::SpecFromJson(m.at("spec"));
    model.method = MethodFromJson(m.at("method"));
    model.seed = m.at("seed").get<std::uint64_t>();
    const auto agg = ParseAggregation(m.at("aggregation").get<std::string>());
    if (!agg) throw ValidationError("unknown aggregation");
    model.aggregation = *agg;
    model.injected_dropout = m.at("injected_dropout").get<bool>();
    model.base_param_count = m.at("base_param_count").get<std::size_t>();
    if (!m.at("frozen_sigma").is_null()) {
      model.frozen_sigma = m.at("frozen_sigma").get<double>();
    }
    if (!m.at("calibration").is_null()) {
      model.calibration = CalibrationStats::FromJson(m.at("calibration"));
    }
    for (const auto& rec : m.at("members")) {
      nn::BlobRecord expected;
      expected.file = rec.at("file").get<std::string>();
      expected.hash = nn::ParseHashHex(rec.at("hash").get<std::string>());
      expected.count = rec.at("count").get<std::size_t>();
      model.members.push_back(
          nn::ReadParamBlob(rec.at("layout"), dir / expected.file, expected));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed checkpoint manifest " +
                          manifest_path.string() + ": " + e.what());
  }
  if (model.members.empty()) {
    throw ValidationError("checkpoint has no parameter blobs");
  }
  return model;
}

}  // namespace selqa::uq
