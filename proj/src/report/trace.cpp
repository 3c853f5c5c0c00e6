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

#include "selqa/report/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"
#include "selqa/tasks/featurize.hpp"
#include "selqa/uq/predict.hpp"

namespace selqa::report {

std::vector<TokenTraceRecord> TokenTrace(const uq::ConvertedModel& model,
                                         const tasks::TaskSpec& spec,
                                         const std::vector<std::size_t>& prompt,
                                         std::size_t steps, std::size_t k,
                                         const nn::RngStream& rng,
                                         std::uint64_t row_key) {
  if (k == 0 || k > spec.vocab_size) {
    throw ValidationError("trace k must be in [1, vocab_size]");
  }
  std::vector<TokenTraceRecord> out;
  std::vector<std::size_t> seq = prompt;
  const std::uint64_t keys[1] = {row_key};
  for (std::size_t step = 0; step < steps; ++step) {
    const nn::Tensor x = tasks::FeaturizeGenerative(seq, spec);
    uq::InferOptions infer;
    infer.rng = rng.Split(step);
    infer.row_keys = keys;
    const auto o = uq::Predict(model, x, infer).front();
    const auto probs = nn::Softmax(o.mu);

    TokenTraceRecord rec;
    rec.step = step;
    rec.prefix = seq;
    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return probs[a] > probs[b];
    });
    for (std::size_t i = 0; i < k; ++i) {
      rec.candidates.push_back({order[i], probs[order[i]], o.sigma_vec[order[i]]});
    }
    for (double s : o.sigma_vec) rec.sigma_t += s;
    for (double p : probs) {
      if (p > 0.0) rec.entropy -= p * std::log(p);
    }
    out.push_back(std::move(rec));
    seq.push_back(order.front());
  }
  return out;
}

nlohmann::json ToJson(const TokenTraceRecord& r) {
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& c : r.candidates) {
    cands.push_back(
        {{"token", c.token}, {"probability", c.probability}, {"sigma", c.sigma}});
  }
  return {{"step", r.step},
          {"prefix", r.prefix},
          {"candidates", cands},
          {"sigma_t", r.sigma_t},
          {"entropy", r.entropy}};
}

std::string TraceToJsonl(const std::vector<TokenTraceRecord>& records) {
  std::string out;
  for (const auto& r : records) out += ToJson(r).dump() + "\n";
  return out;
}

}  // namespace selqa::report
