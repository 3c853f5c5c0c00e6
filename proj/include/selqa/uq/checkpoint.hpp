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

#ifndef SELQA_UQ_CHECKPOINT_HPP_
#define SELQA_UQ_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::uq {

nlohmann::json MethodToJson(const UqMethod& method);
UqMethod MethodFromJson(const nlohmann::json& j);

// Writes <dir>/<name>.json (manifest) and one <name>.m<i>.bin blob per
// member. The manifest records spec, method, seed, layout, per-blob hashes,
// calibration constants, and its own hash over everything else. Returns the
// manifest path.
std::filesystem::path SaveModel(const ConvertedModel& model,
                                const std::filesystem::path& dir,
                                const std::string& name);

// Throws RuntimeError on a manifest hash mismatch or a corrupted or
// truncated blob, ValidationError on a malformed manifest.
ConvertedModel LoadModel(const std::filesystem::path& manifest_path);

}  // namespace selqa::uq

#endif  // SELQA_UQ_CHECKPOINT_HPP_
