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

#ifndef SELQA_NN_CHECKPOINT_HPP_
#define SELQA_NN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "json.hpp"
#include "selqa/nn/model.hpp"

namespace selqa::nn {

// FNV-1a, 64 bit. Used for content hashes of blobs, datasets and configs.
std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t seed = 0xcbf29ce484222325ull);
std::string HashHex(std::uint64_t h);
std::uint64_t ParseHashHex(std::string_view hex);

nlohmann::json SpecToJson(const ModelSpec& spec);
// Throws ValidationError on malformed input; the result is validated.
ModelSpec SpecFromJson(const nlohmann::json& j);

// Parameter blob: every entry's values in store order, each as a
// little-endian IEEE-754 binary64.
std::string EncodeParams(const ParamStore& params);

struct BlobRecord {
  std::string file;
  std::uint64_t hash = 0;
  std::size_t count = 0;
};

// [{name, rows, cols, offset}] with offsets counted in doubles.
nlohmann::json ParamLayout(const ParamStore& params);

BlobRecord WriteParamBlob(const ParamStore& params,
                          const std::filesystem::path& path);

// Verifies length and hash before decoding. Throws RuntimeError on a
// truncated or corrupted blob.
ParamStore ReadParamBlob(const nlohmann::json& layout,
                         const std::filesystem::path& path,
                         const BlobRecord& expected);

// Writes via a temporary file and rename.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace selqa::nn

#endif  // SELQA_NN_CHECKPOINT_HPP_
