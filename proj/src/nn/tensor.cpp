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

#include "selqa/nn/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "selqa/nn/error.hpp"

namespace selqa::nn {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ValidationError("tensor data length " +
                          std::to_string(data_.size()) + " != " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Tensor Tensor::Row(std::initializer_list<double> values) {
  return Tensor(1, values.size(), std::vector<double>(values));
}

Tensor Tensor::FromRows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw ValidationError("ragged tensor rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor(n, m, std::move(data));
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor Tensor::Reshaped(std::size_t rows, std::size_t cols) const {
  if (rows * cols != data_.size()) {
    throw ValidationError("cannot reshape " + ShapeString() + " to " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
  return Tensor(rows, cols, data_);
}

Tensor Tensor::RowsAt(std::span<const std::size_t> indices) const {
  Tensor out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.SameShape(b)) {
    throw ValidationError(std::string(what) + ": shape mismatch " +
                          a.ShapeString() + " vs " + b.ShapeString());
  }
}

}  // namespace selqa::nn
