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

#include <algorithm>

#include "selqa/nn/error.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/tasks/generate.hpp"

namespace selqa::tasks {

bool IsMarker(const TaskSpec& spec, std::size_t token) {
  return token >= spec.vocab_size - spec.n_markers && token < spec.vocab_size;
}

Dataset GenExtractive(const TaskSpec& spec) {
  if (spec.vocab_size < spec.n_markers + 2) {
    throw ValidationError("vocab_size too small to reserve marker tokens");
  }
  if (spec.context_len <= spec.answer_len + 2) {
    throw ValidationError("extractive tasks need context_len > answer_len + 2");
  }
  Dataset ds;
  ds.spec = spec;
  const std::size_t plain = spec.vocab_size - spec.n_markers;
  const std::size_t len = spec.context_len;
  const std::size_t block = spec.answer_len + 1;  // marker + answer
  const nn::RngStream root(spec.seed, nn::Tag("extractive"));
  for (std::size_t i = 0; i < spec.n_examples; ++i) {
    nn::RngStream rng = root.Split(i);
    ExtractiveExample ex;
    ex.id = i;
    ex.context.resize(len);
    for (auto& t : ex.context) t = rng.UniformIndex(plain);
    const std::size_t marker = plain + rng.UniformIndex(spec.n_markers);
    const std::size_t pos = rng.UniformIndex(len - block + 1);
    ex.context[pos] = marker;
    ex.start = pos + 1;
    ex.end = pos + spec.answer_len;
    ex.question = {marker, rng.UniformIndex(plain), rng.UniformIndex(plain)};
    if (rng.Uniform() < spec.noise_rate) {
      // Decoy: the same marker before another answer-sized block that does
      // not overlap the gold block.
      std::vector<std::size_t> free;
      for (std::size_t q = 0; q + block <= len; ++q) {
        if (q + block <= pos || q >= pos + block) free.push_back(q);
      }
      if (!free.empty()) {
        ex.context[free[rng.UniformIndex(free.size())]] = marker;
        ex.ambiguous = true;
      }
    }
    ds.extractive.push_back(std::move(ex));
  }
  return ds;
}

}  // namespace selqa::tasks
