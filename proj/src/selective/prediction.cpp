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

#include "selqa/selective/prediction.hpp"

#include <sstream>

#include "selqa/nn/error.hpp"

namespace selqa::selective {

std::string_view ScoreKindName(ScoreKind kind) {
  return kind == ScoreKind::kSigma ? "sigma" : "one_minus_confidence";
}

std::optional<ScoreKind> ParseScoreKind(std::string_view name) {
  if (name == "sigma") return ScoreKind::kSigma;
  if (name == "one_minus_confidence") return ScoreKind::kOneMinusConfidence;
  return std::nullopt;
}

std::vector<double> Scores(std::span<const ScoredPrediction> preds,
                           ScoreKind kind) {
  std::vector<double> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(p.Score(kind));
  return out;
}

nlohmann::json ToJson(const ScoredPrediction& p) {
  nlohmann::json j = {{"id", p.example_id},
                      {"answer", p.answer},
                      {"sigma", p.sigma},
                      {"confidence", p.confidence}};
  j["correct"] = p.correct ? nlohmann::json(*p.correct) : nlohmann::json();
  return j;
}

ScoredPrediction PredictionFromJson(const nlohmann::json& j) {
  ScoredPrediction p;
  try {
    p.example_id = j.at("id").get<std::uint64_t>();
    p.answer = j.at("answer");
    p.sigma = j.at("sigma").get<double>();
    p.confidence = j.at("confidence").get<double>();
    if (j.contains("correct") && !j.at("correct").is_null()) {
      p.correct = j.at("correct").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed prediction: ") + e.what());
  }
  return p;
}

std::string PredictionsToJsonl(std::span<const ScoredPrediction> preds) {
  std::string out;
  for (const auto& p : preds) out += ToJson(p).dump() + "\n";
  return out;
}

std::vector<ScoredPrediction> PredictionsFromJsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ScoredPrediction> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(PredictionFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed prediction line: ") +
                            e.what());
    }
  }
  return out;
}

}  // namespace selqa::selective
