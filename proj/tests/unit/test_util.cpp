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

#include "test_util.hpp"

#include <unistd.h>

namespace selqa::testing {

TempDir::TempDir(const std::string& name) {
  path_ = std::filesystem::temp_directory_path() /
          ("selqa-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void RandomizeBiases(nn::ParamStore& params, std::uint64_t seed, double scale) {
  nn::RngStream rng(seed, nn::Tag("test-bias"));
  for (auto& e : params.entries()) {
    if (e.name.ends_with(".b")) {
      for (double& v : e.value.values()) v = scale * rng.Normal();
    }
  }
}

nn::Tensor RandomTensor(std::size_t rows, std::size_t cols, std::uint64_t seed,
                        double scale) {
  nn::RngStream rng(seed, nn::Tag("test-tensor"));
  nn::Tensor t(rows, cols);
  for (double& v : t.values()) v = scale * rng.Normal();
  return t;
}

std::vector<oracle::DenseLayer> OracleLayers(const nn::ModelSpec& spec,
                                             const nn::ParamStore& params,
                                             std::size_t head) {
  std::vector<oracle::DenseLayer> out;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    if (l.kind == nn::LayerSpec::Kind::kLinear) {
      const auto& w = params.Value(nn::LayerWeightName(i));
      const auto& b = params.Value(nn::LayerBiasName(i));
      out.push_back({l.in, l.out, w.storage(), b.storage(), false});
    } else if (l.kind == nn::LayerSpec::Kind::kRelu) {
      out.back().relu = true;
    }
  }
  const auto& w = params.Value(nn::HeadWeightName(head));
  const auto& b = params.Value(nn::HeadBiasName(head));
  out.push_back({w.rows(), w.cols(), w.storage(), b.storage(), false});
  return out;
}

std::vector<double> RowOf(const nn::Tensor& t, std::size_t r) {
  auto row = t.row(r);
  return {row.begin(), row.end()};
}

}  // namespace selqa::testing
