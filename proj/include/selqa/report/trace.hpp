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

#ifndef SELQA_REPORT_TRACE_HPP_
#define SELQA_REPORT_TRACE_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/tasks/spec.hpp"
#include "selqa/uq/convert.hpp"

namespace selqa::report {

struct TraceCandidate {
  std::size_t token = 0;
  double probability = 0.0;
  double sigma = 0.0;  // sigma_vec at this token
};

struct TokenTraceRecord {
  std::size_t step = 0;
  std::vector<std::size_t> prefix;
  std::vector<TraceCandidate> candidates;  // by descending probability
  double sigma_t = 0.0;                    // sum of sigma_vec
  double entropy = 0.0;                    // of the full next-token softmax
};

// Greedy decoding for steps tokens, recording the top-k candidates at each
// step. Throws ValidationError for k == 0 or k > vocabulary size.
std::vector<TokenTraceRecord> TokenTrace(const uq::ConvertedModel& model,
                                         const tasks::TaskSpec& spec,
                                         const std::vector<std::size_t>& prompt,
                                         std::size_t steps, std::size_t k,
                                         const nn::RngStream& rng,
                                         std::uint64_t row_key = 0);

nlohmann::json ToJson(const TokenTraceRecord& r);
std::string TraceToJsonl(const std::vector<TokenTraceRecord>& records);

}  // namespace selqa::report

#endif  // SELQA_REPORT_TRACE_HPP_
