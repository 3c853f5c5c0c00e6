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

#include "selqa/nn/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "selqa/nn/error.hpp"

namespace selqa::nn {

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string HashHex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t ParseHashHex(std::string_view hex) {
  if (hex.size() != 16) throw ValidationError("malformed hash '" + std::string(hex) + "'");
  std::uint64_t h = 0;
  for (char c : hex) {
    h <<= 4;
    if (c >= '0' && c <= '9') {
      h |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      h |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw ValidationError("malformed hash '" + std::string(hex) + "'");
    }
  }
  return h;
}

nlohmann::json SpecToJson(const ModelSpec& spec) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : spec.layers) {
    switch (l.kind) {
      case LayerSpec::Kind::kLinear:
        layers.push_back({{"type", "linear"}, {"in", l.in}, {"out", l.out}});
        break;
      case LayerSpec::Kind::kRelu:
        layers.push_back({{"type", "relu"}});
        break;
      case LayerSpec::Kind::kDropout:
        layers.push_back({{"type", "dropout"}, {"rate", l.rate}});
        break;
    }
  }
  return {{"input_dim", spec.input_dim},
          {"layers", layers},
          {"head_dims", spec.head_dims}};
}

ModelSpec SpecFromJson(const nlohmann::json& j) {
  try {
    ModelSpec spec;
    spec.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& l : j.at("layers")) {
      const std::string type = l.at("type").get<std::string>();
      if (type == "linear") {
        spec.layers.push_back(LayerSpec::Linear(l.at("in").get<std::size_t>(),
                                                l.at("out").get<std::size_t>()));
      } else if (type == "relu") {
        spec.layers.push_back(LayerSpec::Relu());
      } else if (type == "dropout") {
        spec.layers.push_back(LayerSpec::Dropout(l.at("rate").get<double>()));
      } else {
        throw ValidationError("unknown layer type '" + type + "'");
      }
    }
    spec.head_dims = j.at("head_dims").get<std::vector<std::size_t>>();
    spec.Validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed model spec: ") + e.what());
  }
}

std::string EncodeParams(const ParamStore& params) {
  std::string out;
  out.reserve(params.Count() * 8);
  for (const auto& e : params.entries()) {
    for (double v : e.value.values()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
      }
    }
  }
  return out;
}

nlohmann::json ParamLayout(const ParamStore& params) {
  nlohmann::json layout = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& e : params.entries()) {
    layout.push_back({{"name", e.name},
                      {"rows", e.value.rows()},
                      {"cols", e.value.cols()},
                      {"offset", offset}});
    offset += e.value.size();
  }
  return layout;
}

void WriteFileAtomic(const std::filesystem::path& path, std::string_view bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw RuntimeError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw RuntimeError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BlobRecord WriteParamBlob(const ParamStore& params,
                          const std::filesystem::path& path) {
  const std::string bytes = EncodeParams(params);
  WriteFileAtomic(path, bytes);
  return {path.filename().string(), Fnv1a64(bytes), params.Count()};
}

ParamStore ReadParamBlob(const nlohmann::json& layout,
                         const std::filesystem::path& path,
                         const BlobRecord& expected) {
  const std::string bytes = ReadFile(path);
  if (bytes.size() != expected.count * 8) {
    throw RuntimeError(path.string() + ": expected " +
                       std::to_string(expected.count * 8) + " bytes, found " +
                       std::to_string(bytes.size()));
  }
  if (Fnv1a64(bytes) != expected.hash) {
    throw RuntimeError(path.string() + ": hash mismatch (expected " +
                       HashHex(expected.hash) + ", found " +
                       HashHex(Fnv1a64(bytes)) + ")");
  }
  ParamStore store;
  for (const auto& item : layout) {
    const auto rows = item.at("rows").get<std::size_t>();
    const auto cols = item.at("cols").get<std::size_t>();
    const auto offset = item.at("offset").get<std::size_t>();
    if ((offset + rows * cols) > expected.count) {
      throw RuntimeError(path.string() + ": layout exceeds blob");
    }
    Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(
                    static_cast<unsigned char>(bytes[(offset + i) * 8 + b]))
                << (8 * b);
      }
      t[i] = std::bit_cast<double>(bits);
    }
    store.Add(item.at("name").get<std::string>(), std::move(t));
  }
  return store;
}

}  // namespace selqa::nn
