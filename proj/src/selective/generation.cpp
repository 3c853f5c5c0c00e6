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

#include "selqa/selective/generation.hpp"

#include <algorithm>

#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"
#include "selqa/tasks/featurize.hpp"
#include "selqa/uq/predict.hpp"

namespace selqa::selective {

std::string_view SequenceReduceName(SequenceReduce r) {
  return r == SequenceReduce::kMax ? "max" : "mean";
}

std::optional<SequenceReduce> ParseSequenceReduce(std::string_view name) {
  if (name == "max") return SequenceReduce::kMax;
  if (name == "mean") return SequenceReduce::kMean;
  return std::nullopt;
}

namespace {

std::size_t SampleIndex(std::span<const double> probs, nn::RngStream& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Rounding left u above the total; take the last positive entry.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

}  // namespace

std::vector<Candidate> GenerateCandidates(
    const uq::ConvertedModel& model, const tasks::TaskSpec& spec,
    const std::vector<std::vector<std::size_t>>& prompts,
    const std::vector<std::uint64_t>& ids, const nn::RngStream& rng,
    const GenerateOptions& options) {
  if (prompts.size() != ids.size()) {
    throw ValidationError("prompt and id counts differ");
  }
  std::vector<Candidate> out(prompts.size());
  if (prompts.empty()) return out;
  std::vector<std::vector<std::size_t>> seqs = prompts;
  const std::size_t dim = tasks::FeatureDim(spec);
  for (std::size_t step = 0; step < options.steps; ++step) {
    nn::Tensor x(seqs.size(), dim);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      const nn::Tensor row = tasks::FeaturizeGenerative(seqs[i], spec);
      std::copy(row.values().begin(), row.values().end(), x.row(i).begin());
    }
    uq::InferOptions infer;
    infer.rng = rng.Split(nn::Tag("passes")).Split(step);
    infer.row_keys = ids;
    const auto outputs = uq::Predict(model, x, infer, options.step_reduce);
    const nn::RngStream sampler = rng.Split(nn::Tag("sample")).Split(step);
    for (std::size_t i = 0; i < seqs.size(); ++i) {
      const auto& o = outputs[i];
      const auto probs = nn::Softmax(o.mu);
      std::size_t token = o.predicted;
      if (options.sample) {
        nn::RngStream r = sampler.Split(ids[i]);
        token = SampleIndex(probs, r);
      }
      seqs[i].push_back(token);
      out[i].tokens.push_back(token);
      out[i].step_sigma.push_back(
          uq::UncertaintyReduce(o.sigma_vec, token, options.step_reduce));
      out[i].step_prob.push_back(probs[token]);
    }
  }
  for (auto& c : out) {
    if (c.step_sigma.empty()) continue;
    double total = 0.0;
    double worst = c.step_sigma.front();
    for (double s : c.step_sigma) {
      total += s;
      worst = std::max(worst, s);
    }
    c.sigma = options.reduce == SequenceReduce::kMax
                  ? worst
                  : total / static_cast<double>(c.step_sigma.size());
    c.confidence = *std::min_element(c.step_prob.begin(), c.step_prob.end());
  }
  return out;
}

std::vector<LoopResult> AnswerUntilConfident(
    const uq::ConvertedModel& model, const tasks::TaskSpec& spec,
    const std::vector<std::vector<std::size_t>>& prompts,
    const std::vector<std::uint64_t>& ids, const ThresholdPolicy& policy,
    std::size_t max_tries, const nn::RngStream& rng,
    const GenerateOptions& options) {
  if (max_tries == 0) throw ValidationError("max_tries must be >= 1");
  if (prompts.size() != ids.size()) {
    throw ValidationError("prompt and id counts differ");
  }
  std::vector<LoopResult> results(prompts.size());
  std::vector<std::size_t> pending(prompts.size());
  for (std::size_t i = 0; i < pending.size(); ++i) pending[i] = i;
  for (std::size_t t = 0; t < max_tries && !pending.empty(); ++t) {
    std::vector<std::vector<std::size_t>> batch;
    std::vector<std::uint64_t> batch_ids;
    for (std::size_t i : pending) {
      batch.push_back(prompts[i]);
      batch_ids.push_back(ids[i]);
    }
    const auto cands =
        GenerateCandidates(model, spec, batch, batch_ids, rng.Split(t), options);
    std::vector<std::size_t> still;
    for (std::size_t j = 0; j < pending.size(); ++j) {
      LoopResult& r = results[pending[j]];
      r.tries = t + 1;
      const double score = policy.score == ScoreKind::kSigma
                               ? cands[j].sigma
                               : 1.0 - cands[j].confidence;
      if (score < policy.gamma) {
        r.answer = cands[j];
      } else {
        still.push_back(pending[j]);
      }
    }
    pending = std::move(still);
  }
  return results;
}

}  // namespace selqa::selective
