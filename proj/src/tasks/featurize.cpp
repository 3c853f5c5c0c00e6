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

#include "selqa/tasks/featurize.hpp"

#include <algorithm>
#include <string>

#include "selqa/nn/error.hpp"
#include "selqa/nn/rng.hpp"
#include "selqa/tasks/generate.hpp"

namespace selqa::tasks {

std::size_t FeatureDim(const TaskSpec& spec) {
  switch (spec.task) {
    case TaskKind::kClassification: return 2;
    case TaskKind::kExtractive: return 5 * spec.vocab_size + 5;
    case TaskKind::kGenerative: return 2 * spec.vocab_size;
  }
  return 0;
}

std::size_t RowsPerExample(const TaskSpec& spec) {
  return spec.task == TaskKind::kExtractive ? spec.context_len : 1;
}

std::vector<std::size_t> HeadDims(const TaskSpec& spec) {
  switch (spec.task) {
    case TaskKind::kClassification: return {spec.n_classes};
    case TaskKind::kExtractive: return {1, 1};
    case TaskKind::kGenerative: return {spec.vocab_size};
  }
  return {};
}

nn::Tensor FeaturizeClassification(const ClassificationExample& ex) {
  nn::Tensor x(1, ex.features.size());
  std::copy(ex.features.begin(), ex.features.end(), x.row(0).begin());
  return x;
}

nn::Tensor FeaturizeExtractive(const ExtractiveExample& ex,
                               const TaskSpec& spec) {
  const std::size_t v = spec.vocab_size;
  const std::size_t len = ex.context.size();
  nn::Tensor x(len, 5 * v + 5);
  auto is_question_marker = [&](std::size_t tok) {
    return IsMarker(spec, tok) &&
           std::find(ex.question.begin(), ex.question.end(), tok) !=
               ex.question.end();
  };
  constexpr int kOffsets[4] = {-2, -1, 1, 2};
  for (std::size_t i = 0; i < len; ++i) {
    auto row = x.row(i);
    const std::size_t tok = ex.context[i];
    if (tok >= v) throw ValidationError("context token outside vocabulary");
    row[tok] = 1.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const long j = static_cast<long>(i) + kOffsets[k];
      if (j < 0 || j >= static_cast<long>(len)) continue;
      row[(k + 1) * v + ex.context[j]] = 1.0;
    }
    for (int o = -2; o <= 2; ++o) {
      const long j = static_cast<long>(i) + o;
      if (j < 0 || j >= static_cast<long>(len)) continue;
      if (is_question_marker(ex.context[j])) row[5 * v + (o + 2)] = 1.0;
    }
  }
  return x;
}

nn::Tensor FeaturizeGenerative(std::span<const std::size_t> prefix,
                               const TaskSpec& spec) {
  if (prefix.size() < 2) {
    throw ValidationError("generative prompts need at least two tokens, got " +
                          std::to_string(prefix.size()));
  }
  const std::size_t a = prefix[prefix.size() - 2];
  const std::size_t b = prefix[prefix.size() - 1];
  if (a >= spec.vocab_size || b >= spec.vocab_size) {
    throw ValidationError("token outside vocabulary");
  }
  nn::Tensor x(1, 2 * spec.vocab_size);
  x(0, a) = 1.0;
  x(0, spec.vocab_size + b) = 1.0;
  return x;
}

namespace {

void AppendRows(nn::Tensor& dst, std::size_t& at, const nn::Tensor& src) {
  for (std::size_t r = 0; r < src.rows(); ++r, ++at) {
    std::copy(src.row(r).begin(), src.row(r).end(), dst.row(at).begin());
  }
}

}  // namespace

nn::Tensor FeaturizeAll(const Dataset& ds) {
  const TaskSpec& spec = ds.spec;
  nn::Tensor x(ds.size() * RowsPerExample(spec), FeatureDim(spec));
  std::size_t at = 0;
  for (const auto& ex : ds.classification) {
    AppendRows(x, at, FeaturizeClassification(ex));
  }
  for (const auto& ex : ds.extractive) {
    if (ex.context.size() != spec.context_len) {
      throw ValidationError("context length differs from the task spec");
    }
    AppendRows(x, at, FeaturizeExtractive(ex, spec));
  }
  for (const auto& ex : ds.generative) {
    AppendRows(x, at, FeaturizeGenerative(ex.prompt, spec));
  }
  return x;
}

nn::TrainingSet BuildTrainingSet(const Dataset& ds) {
  const TaskSpec& spec = ds.spec;
  nn::TrainingSet data;
  data.labels.resize(HeadDims(spec).size());
  data.rows_per_example = RowsPerExample(spec);
  if (spec.task != TaskKind::kGenerative) {
    data.features = FeaturizeAll(ds);
    for (const auto& ex : ds.classification) {
      data.labels[0].push_back(ex.label);
      data.keys.push_back(ex.id);
    }
    for (const auto& ex : ds.extractive) {
      data.labels[0].push_back(ex.start);
      data.labels[1].push_back(ex.end);
      data.keys.push_back(ex.id);
    }
    return data;
  }
  std::size_t rows = 0;
  for (const auto& ex : ds.generative) rows += ex.target.size() + ex.prompt.size() - 2;
  data.features = nn::Tensor(rows, FeatureDim(spec));
  std::size_t at = 0;
  std::vector<std::size_t> seq;
  for (const auto& ex : ds.generative) {
    seq = ex.prompt;
    seq.insert(seq.end(), ex.target.begin(), ex.target.end());
    for (std::size_t k = 2; k < seq.size(); ++k, ++at) {
      const nn::Tensor f =
          FeaturizeGenerative(std::span<const std::size_t>(seq).first(k), spec);
      std::copy(f.row(0).begin(), f.row(0).end(), data.features.row(at).begin());
      data.labels[0].push_back(seq[k]);
      data.keys.push_back(nn::Mix64(ex.id) + k);
    }
  }
  return data;
}

std::vector<std::pair<std::size_t, std::size_t>> EnumerateSpans(
    std::size_t context_len, std::size_t max_span_len) {
  if (max_span_len == 0) throw ValidationError("max_span_len must be >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t s = 0; s < context_len; ++s) {
    for (std::size_t e = s; e < context_len && e - s + 1 <= max_span_len; ++e) {
      spans.emplace_back(s, e);
    }
  }
  return spans;
}

}  // namespace selqa::tasks
