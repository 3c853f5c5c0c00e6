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

#ifndef SELQA_TESTS_UNIT_TEST_UTIL_HPP_
#define SELQA_TESTS_UNIT_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "selqa/nn/model.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/nn/tensor.hpp"

namespace selqa::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Gives every bias a small random value so ReLU units sit off zero.
void RandomizeBiases(nn::ParamStore& params, std::uint64_t seed,
                     double scale = 0.3);

// Random tensor with N(0, scale^2) entries.
nn::Tensor RandomTensor(std::size_t rows, std::size_t cols, std::uint64_t seed,
                        double scale = 1.0);

// The deterministic network of head h as plain dense layers (dropout
// layers are the identity).
std::vector<oracle::DenseLayer> OracleLayers(const nn::ModelSpec& spec,
                                             const nn::ParamStore& params,
                                             std::size_t head);

std::vector<double> RowOf(const nn::Tensor& t, std::size_t r);

}  // namespace selqa::testing

#endif  // SELQA_TESTS_UNIT_TEST_UTIL_HPP_
