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
#include <numeric>

#include "selqa/nn/error.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/tasks/generate.hpp"

namespace selqa::tasks {

MarkovChain BuildChain(const TaskSpec& spec) {
  if (spec.held_out_tokens + 2 > spec.vocab_size) {
    throw ValidationError("held_out_tokens leaves fewer than 2 emitting tokens");
  }
  MarkovChain chain;
  chain.vocab_size = spec.vocab_size;
  chain.emitting = spec.vocab_size - spec.held_out_tokens;
  const std::size_t v = spec.vocab_size;
  const std::size_t e = chain.emitting;
  const std::size_t branching =
      spec.branching == 0 ? e : std::min(spec.branching, e);
  chain.transitions.assign(v * v, std::vector<double>(v, 0.0));
  chain.high_entropy.assign(v * v, false);
  const nn::RngStream root(spec.seed, nn::Tag("markov-chain"));
  std::vector<std::size_t> tokens(e);
  for (std::size_t s = 0; s < v * v; ++s) {
    nn::RngStream rng = root.Split(s);
    auto& row = chain.transitions[s];
    if (rng.Uniform() < spec.noise_rate) {
      chain.high_entropy[s] = true;
      std::iota(tokens.begin(), tokens.end(), std::size_t{0});
      for (std::size_t k = 0; k < branching; ++k) {
        std::swap(tokens[k], tokens[k + rng.UniformIndex(e - k)]);
        row[tokens[k]] = 1.0 / static_cast<double>(branching);
      }
    } else {
      row[rng.UniformIndex(e)] = 1.0;
    }
  }
  return chain;
}

namespace {

std::size_t Step(const MarkovChain& chain, std::size_t a, std::size_t b,
                 nn::RngStream& rng) {
  const auto& row = chain.transitions[chain.State(a, b)];
  const double u = rng.Uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t t = 0; t < row.size(); ++t) {
    if (row[t] <= 0.0) continue;
    acc += row[t];
    last = t;
    if (u < acc) return t;
  }
  return last;
}

}  // namespace

Dataset GenGenerative(const TaskSpec& spec) {
  if (spec.prompt_len < 2) throw ValidationError("prompt_len must be >= 2");
  Dataset ds;
  ds.spec = spec;
  const MarkovChain chain = BuildChain(spec);
  const std::size_t e = chain.emitting;
  const nn::RngStream root(spec.seed, nn::Tag("generative"));
  for (std::size_t i = 0; i < spec.n_examples; ++i) {
    nn::RngStream rng = root.Split(i);
    GenerativeExample ex;
    ex.id = i;
    ex.ood = spec.held_out_tokens > 0 && rng.Uniform() < spec.ood_prompt_fraction;
    std::vector<std::size_t> seq;
    seq.push_back(rng.UniformIndex(e));
    seq.push_back(rng.UniformIndex(e));
    for (std::size_t k = 2; k < spec.prompt_len; ++k) {
      seq.push_back(Step(chain, seq[k - 2], seq[k - 1], rng));
    }
    if (ex.ood) {
      // Generation starts from a state no training sequence can contain.
      seq[spec.prompt_len - 2] = e + rng.UniformIndex(spec.held_out_tokens);
    }
    for (std::size_t k = 0; k < spec.target_len; ++k) {
      const std::size_t n = seq.size();
      seq.push_back(Step(chain, seq[n - 2], seq[n - 1], rng));
    }
    ex.prompt.assign(seq.begin(), seq.begin() + spec.prompt_len);
    ex.target.assign(seq.begin() + spec.prompt_len, seq.end());
    ds.generative.push_back(std::move(ex));
  }
  return ds;
}

Dataset Generate(const TaskSpec& spec) {
  spec.Validate();
  switch (spec.task) {
    case TaskKind::kClassification: return GenClassification(spec);
    case TaskKind::kExtractive: return GenExtractive(spec);
    case TaskKind::kGenerative: return GenGenerative(spec);
  }
  throw ValidationError("unknown task");
}

}  // namespace selqa::tasks
