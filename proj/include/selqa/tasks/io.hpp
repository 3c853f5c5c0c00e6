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

#ifndef SELQA_TASKS_IO_HPP_
#define SELQA_TASKS_IO_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "selqa/tasks/spec.hpp"

namespace selqa::tasks {

// Present on split files: which split and the hash of the parent dataset
// file, so disjointness can be audited.
struct SplitInfo {
  std::string name;
  std::string parent_hash;

  friend bool operator==(const SplitInfo&, const SplitInfo&) = default;
};

// JSON Lines: a header line {"kind","spec","count"[,"split","parent_hash"]}
// followed by one example per line.
std::string DatasetToJsonl(const Dataset& ds,
                           const std::optional<SplitInfo>& split = {});
// Throws ValidationError on malformed content.
Dataset DatasetFromJsonl(const std::string& text,
                         std::optional<SplitInfo>* split = nullptr);

// Hex FNV-1a of the exact file bytes.
std::string ContentHash(const std::string& bytes);

void WriteDataset(const std::filesystem::path& path, const Dataset& ds,
                  const std::optional<SplitInfo>& split = {});
Dataset ReadDataset(const std::filesystem::path& path,
                    std::optional<SplitInfo>* split = nullptr);

}  // namespace selqa::tasks

#endif  // SELQA_TASKS_IO_HPP_
