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

#ifndef SELQA_NN_RNG_HPP_
#define SELQA_NN_RNG_HPP_

#include <array>
#include <cstdint>

namespace selqa::nn {

// Philox4x32-10 keyed by the master seed. The 128-bit counter block is
// (counter, stream_id), so every draw is a pure function of
// (master_seed, stream_id, counter) and streams never share state.
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to derive child stream ids.
std::uint64_t Mix64(std::uint64_t x);

class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id,
            std::uint64_t counter = 0)
      : master_seed_(master_seed), stream_id_(stream_id), counter_(counter) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  // One Philox block per call.
  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Standard normal via Box-Muller over a single block.
  double Normal();
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t UniformIndex(std::uint64_t n);

  // Child stream; same master seed, derived id, counter reset to 0.
  RngStream Split(std::uint64_t tag) const;

  // The next raw Philox output block.
  std::array<std::uint32_t, 4> NextBlock();

 private:

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t counter_ = 0;
};

// Stable 64-bit tags for named sub-streams.
constexpr std::uint64_t Tag(const char* s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  while (*s != '\0') {
    h ^= static_cast<unsigned char>(*s++);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace selqa::nn

#endif  // SELQA_NN_RNG_HPP_
