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

#ifndef SELQA_CLI_PIPELINE_HPP_
#define SELQA_CLI_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selqa/cli/config.hpp"

namespace selqa::cli {

enum class Command { kGenData, kTrain, kEvaluate, kSweep, kBench, kTrace, kAll };

std::string_view CommandName(Command c);
std::optional<Command> ParseCommand(std::string_view name);

struct RunOptions {
  // Overrides config.out_dir when non-empty.
  std::filesystem::path out;
  bool force = false;
  bool self_calibrate = false;
  std::size_t workers = 1;
  std::ostream* log = nullptr;
};

// <out_dir>/run-<config hash>
std::filesystem::path RunDir(const RunConfig& config, const RunOptions& options);

// Runs one command (or the whole chain). Each stage writes into
// RunDir/<stage>/; a stage directory that already completed is only
// replaced with force. A failing stage leaves a .failed marker holding the
// error. Throws ValidationError for bad input or missing upstream artifacts
// and RuntimeError for failures while running.
void RunCommand(Command command, const RunConfig& config,
                const RunOptions& options);

// Process entry point: parses flags, maps exceptions to exit codes
// (0 success, 2 validation, 1 runtime).
int Main(int argc, char** argv);

}  // namespace selqa::cli

#endif  // SELQA_CLI_PIPELINE_HPP_
