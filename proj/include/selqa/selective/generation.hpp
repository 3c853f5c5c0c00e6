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

#ifndef SELQA_SELECTIVE_GENERATION_HPP_
#define SELQA_SELECTIVE_GENERATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "selqa/nn/rng.hpp"
#include "selqa/selective/threshold.hpp"
#include "selqa/tasks/spec.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::selective {

// How per-step sigmas combine into one sequence sigma.
enum class SequenceReduce { kMax, kMean };

std::string_view SequenceReduceName(SequenceReduce r);
std::optional<SequenceReduce> ParseSequenceReduce(std::string_view name);

struct Candidate {
  std::vector<std::size_t> tokens;
  std::vector<double> step_sigma;   // per-step sigma (see GenerateOptions)
  std::vector<double> step_prob;    // probability of the chosen token
  double sigma = 0.0;
  double confidence = 1.0;          // smallest chosen-token probability
};

struct GenerateOptions {
  std::size_t steps = 0;
  SequenceReduce reduce = SequenceReduce::kMax;
  // Sample from softmax(mu); otherwise take the argmax.
  bool sample = true;
  // Per-step sigma: kPredictedClass reads sigma_vec at the chosen token,
  // kSum and kMean reduce over the vocabulary.
  uq::ReduceMode step_reduce = uq::ReduceMode::kSum;
};

// Continues every prompt by options.steps tokens in one batch per step.
// Draws depend only on (rng, example id, step), so a prompt's candidate does
// not depend on which other prompts share the batch.
std::vector<Candidate> GenerateCandidates(
    const uq::ConvertedModel& model, const tasks::TaskSpec& spec,
    const std::vector<std::vector<std::size_t>>& prompts,
    const std::vector<std::uint64_t>& ids, const nn::RngStream& rng,
    const GenerateOptions& options);

struct LoopResult {
  std::optional<Candidate> answer;  // empty: abstained
  std::size_t tries = 0;
};

// Generates up to max_tries candidates per prompt, try t drawing from
// rng.Split(t), and keeps the first whose sigma is below policy.gamma.
// Throws ValidationError for max_tries == 0.
std::vector<LoopResult> AnswerUntilConfident(
    const uq::ConvertedModel& model, const tasks::TaskSpec& spec,
    const std::vector<std::vector<std::size_t>>& prompts,
    const std::vector<std::uint64_t>& ids, const ThresholdPolicy& policy,
    std::size_t max_tries, const nn::RngStream& rng,
    const GenerateOptions& options);

}  // namespace selqa::selective

#endif  // SELQA_SELECTIVE_GENERATION_HPP_
