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

#include "selqa/nn/rng.hpp"

#include <cmath>
#include <numbers>

namespace selqa::nn {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kMul0, ctr[0], hi0, lo0);
    MulHiLo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::array<std::uint32_t, 4> RngStream::NextBlock() {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(counter_),
      static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(stream_id_),
      static_cast<std::uint32_t>(stream_id_ >> 32)};
  const std::array<std::uint32_t, 2> key{
      static_cast<std::uint32_t>(master_seed_),
      static_cast<std::uint32_t>(master_seed_ >> 32)};
  ++counter_;
  return Philox4x32(ctr, key);
}

std::uint64_t RngStream::NextU64() {
  const auto b = NextBlock();
  return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
}

double RngStream::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RngStream::Normal() {
  const auto b = NextBlock();
  const std::uint64_t x = (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
  const std::uint64_t y = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
  // u1 in (0, 1] keeps the log finite.
  const double u1 = (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(y >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RngStream::UniformIndex(std::uint64_t n) {
  const unsigned __int128 p =
      static_cast<unsigned __int128>(NextU64()) * static_cast<unsigned __int128>(n);
  return static_cast<std::uint64_t>(p >> 64);
}

RngStream RngStream::Split(std::uint64_t tag) const {
  return RngStream(master_seed_, Mix64(stream_id_ ^ Mix64(tag)), 0);
}

}  // namespace selqa::nn
