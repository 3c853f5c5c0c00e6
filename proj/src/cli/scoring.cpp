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

#include "selqa/cli/scoring.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"
#include "selqa/nn/train.hpp"
#include "selqa/report/metrics.hpp"
#include "selqa/tasks/featurize.hpp"
#include "selqa/uq/predict.hpp"

namespace selqa::cli {

selective::ScoreKind ScoreKindFor(const uq::ConvertedModel& model) {
  return model.method.kind == uq::MethodKind::kBaseline
             ? selective::ScoreKind::kOneMinusConfidence
             : selective::ScoreKind::kSigma;
}

std::vector<std::uint64_t> RowKeys(const tasks::Dataset& ds) {
  const std::size_t r = tasks::RowsPerExample(ds.spec);
  std::vector<std::uint64_t> keys;
  keys.reserve(ds.size() * r);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      keys.push_back(nn::RowKey(ds.IdAt(i), j, r));
    }
  }
  return keys;
}

std::size_t RunChunks(
    std::size_t n, std::size_t workers,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  const std::size_t chunks = std::max<std::size_t>(1, std::min(workers, n));
  if (chunks == 1) {
    fn(0, 0, n);
    return 1;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex mu;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    threads.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return chunks;
}

namespace {

ScoredSet ScoreClassification(const uq::ConvertedModel& model,
                              const tasks::Dataset& ds,
                              const ScoreOptions& options) {
  const nn::Tensor x = tasks::FeaturizeAll(ds);
  const auto keys = RowKeys(ds);
  uq::InferOptions infer;
  infer.rng = options.rng;
  infer.row_keys = keys;
  const auto outputs = uq::Predict(model, x, infer);
  ScoredSet s;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& o = outputs[i];
    const auto& ex = ds.classification[i];
    selective::ScoredPrediction p;
    p.example_id = ex.id;
    p.answer = o.predicted;
    p.sigma = o.sigma;
    p.confidence = o.confidence;
    p.correct = o.predicted == ex.label;
    s.preds.push_back(std::move(p));
  }
  return s;
}

ScoredSet ScoreExtractive(const uq::ConvertedModel& model,
                          const tasks::Dataset& ds,
                          const ScoreOptions& options) {
  const std::size_t len = ds.spec.context_len;
  const nn::Tensor x = tasks::FeaturizeAll(ds);
  const auto keys = RowKeys(ds);
  uq::InferOptions infer;
  infer.rng = options.rng;
  infer.row_keys = keys;
  const auto moments = uq::InferMoments(model, x, infer);
  const auto spans = tasks::EnumerateSpans(len, ds.spec.MaxSpanLen());
  const bool baseline = model.method.kind == uq::MethodKind::kBaseline;

  ScoredSet s;
  std::vector<double> logits(spans.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& ex = ds.extractive[i];
    const std::size_t base = i * len;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      logits[k] = moments[0].mean(base + spans[k].first, 0) +
                  moments[1].mean(base + spans[k].second, 0);
    }
    const std::size_t best = nn::Argmax(logits);
    const auto probs = nn::Softmax(logits);
    const auto [a, b] = spans[best];

    selective::ScoredPrediction p;
    p.example_id = ex.id;
    p.answer = {a, b};
    p.confidence = probs[best];
    if (baseline) {
      p.sigma = 1.0 - p.confidence;
    } else {
      const std::size_t rows[2] = {base + a, base + b};
      for (std::size_t h = 0; h < 2; ++h) {
        const auto& m = moments[h];
        p.sigma += uq::Summarize(model, h, m.mean.row(rows[h]),
                                 m.aleatoric.row(rows[h]),
                                 m.epistemic.row(rows[h]))
                       .sigma_vec[0];
      }
    }
    p.correct = a == ex.start && b == ex.end;
    const std::vector<std::size_t> pred_tokens(ex.context.begin() + a,
                                               ex.context.begin() + b + 1);
    const std::vector<std::size_t> gold_tokens(ex.context.begin() + ex.start,
                                               ex.context.begin() + ex.end + 1);
    s.f1.push_back(report::TokenF1(pred_tokens, gold_tokens));
    s.preds.push_back(std::move(p));
  }
  return s;
}

ScoredSet ScoreGenerative(const uq::ConvertedModel& model,
                          const tasks::Dataset& ds,
                          const ScoreOptions& options) {
  std::vector<std::vector<std::size_t>> prompts;
  std::vector<std::uint64_t> ids;
  for (const auto& ex : ds.generative) {
    prompts.push_back(ex.prompt);
    ids.push_back(ex.id);
  }
  selective::GenerateOptions gen = options.generate;
  if (gen.steps == 0) gen.steps = ds.spec.target_len;
  // Try 0 of the answer-until-confident loop, so single-shot and looped
  // answers are comparable draw for draw.
  const auto cands = selective::GenerateCandidates(model, ds.spec, prompts, ids,
                                                   options.rng.Split(0), gen);
  const bool baseline = model.method.kind == uq::MethodKind::kBaseline;
  ScoredSet s;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& ex = ds.generative[i];
    const auto& c = cands[i];
    selective::ScoredPrediction p;
    p.example_id = ex.id;
    p.answer = c.tokens;
    p.sigma = baseline ? 1.0 - c.confidence : c.sigma;
    p.confidence = c.confidence;
    const auto score = report::SequenceAccuracy(c.tokens, ex.target);
    p.correct = score.exact;
    s.token_accuracy.push_back(score.token_accuracy);
    s.preds.push_back(std::move(p));
  }
  return s;
}

ScoredSet ScoreChunk(const uq::ConvertedModel& model, const tasks::Dataset& ds,
                     const ScoreOptions& options) {
  switch (ds.spec.task) {
    case tasks::TaskKind::kClassification:
      return ScoreClassification(model, ds, options);
    case tasks::TaskKind::kExtractive:
      return ScoreExtractive(model, ds, options);
    case tasks::TaskKind::kGenerative:
      return ScoreGenerative(model, ds, options);
  }
  throw ValidationError("unknown task kind");
}

}  // namespace

ScoredSet ScoreDataset(const uq::ConvertedModel& model, const tasks::Dataset& ds,
                       const ScoreOptions& options) {
  if (ds.size() == 0) return {};
  std::vector<ScoredSet> parts(std::max<std::size_t>(1, options.workers));
  const std::size_t chunks =
      RunChunks(ds.size(), options.workers,
                [&](std::size_t c, std::size_t begin, std::size_t end) {
                  std::vector<std::size_t> idx;
                  for (std::size_t i = begin; i < end; ++i) idx.push_back(i);
                  parts[c] = ScoreChunk(model, ds.Subset(idx), options);
                });
  ScoredSet all;
  for (std::size_t c = 0; c < chunks; ++c) {
    auto& p = parts[c];
    all.preds.insert(all.preds.end(), p.preds.begin(), p.preds.end());
    all.f1.insert(all.f1.end(), p.f1.begin(), p.f1.end());
    all.token_accuracy.insert(all.token_accuracy.end(),
                              p.token_accuracy.begin(), p.token_accuracy.end());
  }
  return all;
}

uq::CalibrationStats CalibrateComposed(const uq::ConvertedModel& model,
                                       const tasks::Dataset& calib,
                                       const ScoreOptions& options) {
  const nn::Tensor x = tasks::FeaturizeAll(calib);
  std::vector<std::uint64_t> keys = RowKeys(calib);
  uq::InferOptions infer;
  infer.rng = options.rng;
  infer.row_keys = keys;
  if (calib.spec.task == tasks::TaskKind::kGenerative) {
    // Calibrate on the step-0 draws the generator will make, reduced the
    // way generation reduces each step.
    infer.rng = options.rng.Split(0).Split(nn::Tag("passes")).Split(0);
    return uq::CalibrateStats(model, x, infer, options.generate.step_reduce);
  }
  return uq::CalibrateStats(model, x, infer);
}

}  // namespace selqa::cli
