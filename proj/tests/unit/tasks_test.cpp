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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"
#include "selqa/nn/train.hpp"
#include "selqa/tasks/featurize.hpp"
#include "selqa/tasks/generate.hpp"
#include "selqa/tasks/io.hpp"
#include "selqa/tasks/split.hpp"
#include "test_util.hpp"

namespace selqa::tasks {
namespace {

TaskSpec Spec(TaskKind kind, std::size_t n, std::uint64_t seed = 0) {
  TaskSpec s;
  s.task = kind;
  s.n_examples = n;
  s.seed = seed;
  return s;
}

// Trains a plain network on the training split and returns it.
nn::ParamStore TrainPlain(const Dataset& train, const nn::ModelSpec& spec,
                          std::size_t epochs = 30) {
  nn::ParamStore p = nn::InitParams(spec, 1);
  nn::TrainConfig cfg;
  cfg.epochs = epochs;
  nn::TrainStandard(p, spec, BuildTrainingSet(train), cfg);
  return p;
}

TEST(SpecTest, ValidatesConstraints) {
  TaskSpec s;
  EXPECT_NO_THROW(s.Validate());
  s.noise_rate = 0.5;
  EXPECT_THROW(s.Validate(), ValidationError);
  s.noise_rate = 0.1;
  s.ood_shift = -1.0;
  EXPECT_THROW(s.Validate(), ValidationError);
  s.ood_shift = 1.0;
  s.answer_len = 13;
  EXPECT_THROW(s.Validate(), ValidationError);
}

TEST(SpecTest, JsonRoundTripAndUnknownKeys) {
  TaskSpec s = Spec(TaskKind::kGenerative, 123, 9);
  s.noise_rate = 0.125;
  EXPECT_EQ(TaskSpec::FromJson(s.ToJson()), s);
  nlohmann::json j = s.ToJson();
  j["noise_rat"] = 0.1;
  EXPECT_THROW(TaskSpec::FromJson(j), ValidationError);
  EXPECT_EQ(TaskSpec::FromJson(nlohmann::json::object()), TaskSpec{});
}

TEST(ClassificationTest, CleanTaskIsLinearlyLearnable) {
  TaskSpec s = Spec(TaskKind::kClassification, 3000, 2);
  s.noise_rate = 0.0;
  s.ood_shift = 0.0;
  const Dataset ds = Generate(s);
  for (const auto& ex : ds.classification) {
    EXPECT_EQ(ex.region, Region::kClean);
    EXPECT_EQ(ex.label, ex.clean_label);
  }
  const Splits sp = SplitDataset(ds, {}, 2);
  nn::ModelSpec linear;
  linear.input_dim = FeatureDim(s);
  linear.head_dims = HeadDims(s);
  const nn::ParamStore p = TrainPlain(sp.train, linear);
  const auto logits = nn::ModelForward(p, linear, FeaturizeAll(sp.test), false,
                                       nn::RngStream());
  std::size_t ok = 0;
  for (std::size_t i = 0; i < sp.test.size(); ++i) {
    ok += nn::Argmax(logits[0].row(i)) == sp.test.classification[i].label;
  }
  EXPECT_GE(static_cast<double>(ok) / sp.test.size(), 0.97);
}

TEST(ClassificationTest, FlipRateMatchesEta) {
  TaskSpec s = Spec(TaskKind::kClassification, 8000, 3);
  s.noise_rate = 0.3;
  const Dataset ds = Generate(s);
  std::size_t noisy = 0, flipped = 0, ood = 0;
  for (const auto& ex : ds.classification) {
    if (ex.region == Region::kNoisy) {
      ++noisy;
      flipped += ex.label != ex.clean_label;
      EXPECT_EQ(ex.clean_label, kNoisyCluster);
    } else if (ex.region == Region::kClean) {
      EXPECT_EQ(ex.label, ex.clean_label);
    } else {
      ++ood;
      // The blob sits delta to the right of its source cluster.
      EXPECT_GT(ex.features[0], 0.0);
    }
  }
  ASSERT_GE(noisy, 1500u);
  EXPECT_NEAR(static_cast<double>(flipped) / noisy, 0.3, 0.03);
  EXPECT_NEAR(static_cast<double>(ood) / ds.size(), s.ood_fraction, 0.01);
}

TEST(ClassificationTest, EmptyDatasetIsValid) {
  const Dataset ds = Generate(Spec(TaskKind::kClassification, 0));
  EXPECT_EQ(ds.size(), 0u);
  EXPECT_EQ(DatasetFromJsonl(DatasetToJsonl(ds)), ds);
}

TEST(ClassificationTest, ExamplesDoNotDependOnDatasetSize) {
  // Per-example streams: a shard of ids is generated identically alone.
  const Dataset big = Generate(Spec(TaskKind::kClassification, 200, 5));
  const Dataset small = Generate(Spec(TaskKind::kClassification, 50, 5));
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(small.classification[i], big.classification[i]);
  }
}

TEST(ExtractiveTest, CleanSingleTokenAnswers) {
  TaskSpec s = Spec(TaskKind::kExtractive, 500, 1);
  s.noise_rate = 0.0;
  s.answer_len = 1;
  const Dataset ds = Generate(s);
  for (const auto& ex : ds.extractive) {
    EXPECT_FALSE(ex.ambiguous);
    EXPECT_EQ(ex.start, ex.end);
    ASSERT_GE(ex.start, 1u);
    // The answer is the token right after the question's marker.
    EXPECT_EQ(ex.context[ex.start - 1], ex.question[0]);
    EXPECT_TRUE(IsMarker(s, ex.question[0]));
  }
}

TEST(ExtractiveTest, AmbiguityRateMatchesEta) {
  TaskSpec s = Spec(TaskKind::kExtractive, 4000, 2);
  s.noise_rate = 0.25;
  const Dataset ds = Generate(s);
  std::size_t amb = 0;
  for (const auto& ex : ds.extractive) amb += ex.ambiguous;
  EXPECT_NEAR(static_cast<double>(amb) / ds.size(), 0.25, 0.03);
}

TEST(ExtractiveTest, SpansInBoundsAndRecoverableByScan) {
  TaskSpec s = Spec(TaskKind::kExtractive, 2000, 3);
  const Dataset ds = Generate(s);
  for (const auto& ex : ds.extractive) {
    ASSERT_LE(ex.start, ex.end);
    ASSERT_LT(ex.end, ex.context.size());
    EXPECT_EQ(ex.end - ex.start + 1, s.answer_len);
    for (auto t : ex.context) EXPECT_LT(t, s.vocab_size);
    if (ex.ambiguous) continue;
    std::vector<std::size_t> hits;
    for (std::size_t p = 0; p < ex.context.size(); ++p) {
      if (ex.context[p] == ex.question[0]) hits.push_back(p);
    }
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0] + 1, ex.start);
  }
}

TEST(ExtractiveTest, RejectsTinyVocabulary) {
  TaskSpec s = Spec(TaskKind::kExtractive, 10);
  s.vocab_size = 5;
  EXPECT_THROW(Generate(s), ValidationError);
}

TEST(GenerativeTest, TokensInVocabularyAndOodPromptsMarked) {
  TaskSpec s = Spec(TaskKind::kGenerative, 2000, 4);
  const Dataset ds = Generate(s);
  const std::size_t emitting = s.vocab_size - s.held_out_tokens;
  std::size_t ood = 0;
  for (const auto& ex : ds.generative) {
    EXPECT_EQ(ex.prompt.size(), s.prompt_len);
    EXPECT_EQ(ex.target.size(), s.target_len);
    bool held = false;
    for (auto t : ex.prompt) held |= t >= emitting;
    for (auto t : ex.target) EXPECT_LT(t, emitting);
    EXPECT_EQ(held, ex.ood);
    ood += ex.ood;
  }
  EXPECT_NEAR(static_cast<double>(ood) / ds.size(), s.ood_prompt_fraction, 0.02);
}

TEST(GenerativeTest, ChainRowsAreDistributions) {
  TaskSpec s = Spec(TaskKind::kGenerative, 0, 6);
  const MarkovChain chain = BuildChain(s);
  std::size_t high = 0;
  for (std::size_t st = 0; st < chain.transitions.size(); ++st) {
    const auto& row = chain.transitions[st];
    double total = 0.0;
    for (double p : row) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    if (chain.high_entropy[st]) {
      ++high;
      EXPECT_NEAR(oracle::Entropy(row), std::log(static_cast<double>(chain.emitting)),
                  1e-9);
    } else {
      EXPECT_EQ(*std::max_element(row.begin(), row.end()), 1.0);
    }
  }
  EXPECT_NEAR(static_cast<double>(high) / chain.transitions.size(), s.noise_rate, 0.06);
}

double NextTokenAccuracy(const Dataset& train, const Dataset& test) {
  const TaskSpec& s = train.spec;
  const std::size_t hidden[] = {64};
  const auto heads = HeadDims(s);
  const nn::ModelSpec spec = nn::ModelSpec::Mlp(FeatureDim(s), hidden, heads);
  const nn::ParamStore p = TrainPlain(train, spec, 20);
  std::size_t ok = 0, total = 0;
  for (const auto& ex : test.generative) {
    if (ex.ood) continue;
    std::vector<std::size_t> seq = ex.prompt;
    seq.insert(seq.end(), ex.target.begin(), ex.target.end());
    for (std::size_t k = s.prompt_len; k < seq.size(); ++k) {
      const std::span<const std::size_t> prefix(seq.data(), k);
      const auto logits = nn::ModelForward(p, spec, FeaturizeGenerative(prefix, s),
                                           false, nn::RngStream());
      ok += nn::Argmax(logits[0].row(0)) == seq[k];
      ++total;
    }
  }
  return static_cast<double>(ok) / total;
}

TEST(GenerativeTest, DeterministicChainIsLearnable) {
  TaskSpec s = Spec(TaskKind::kGenerative, 3000, 7);
  s.noise_rate = 0.0;
  const Splits sp = SplitDataset(Generate(s), {}, 7);
  EXPECT_GE(NextTokenAccuracy(sp.train, sp.test), 0.95);
}

TEST(GenerativeTest, UniformChainCapsAccuracy) {
  // Every state uniform: no model beats 1 / V. The validated range of eta
  // stops below 0.5, so the generator is called directly.
  TaskSpec s = Spec(TaskKind::kGenerative, 3000, 8);
  s.noise_rate = 1.0;
  s.held_out_tokens = 0;
  const Splits sp = SplitDataset(GenGenerative(s), {}, 8);
  EXPECT_NEAR(NextTokenAccuracy(sp.train, sp.test), 1.0 / s.vocab_size, 0.05);
}

TEST(FeaturizeTest, Dimensions) {
  TaskSpec g = Spec(TaskKind::kGenerative, 1);
  EXPECT_EQ(FeatureDim(g), 2 * g.vocab_size);
  const std::size_t prefix[] = {1, 2, 3};
  const nn::Tensor f = FeaturizeGenerative(prefix, g);
  EXPECT_EQ(f.cols(), 2 * g.vocab_size);
  EXPECT_EQ(f(0, 2), 1.0);
  EXPECT_EQ(f(0, g.vocab_size + 3), 1.0);
  double ones = 0.0;
  for (double v : f.values()) ones += v;
  EXPECT_EQ(ones, 2.0);
  EXPECT_THROW(FeaturizeGenerative(std::vector<std::size_t>{}, g), ValidationError);
  EXPECT_THROW(FeaturizeGenerative(std::vector<std::size_t>{1}, g), ValidationError);
  const std::size_t bad[] = {1, 99};
  EXPECT_THROW(FeaturizeGenerative(bad, g), ValidationError);

  TaskSpec e = Spec(TaskKind::kExtractive, 3);
  const Dataset ds = Generate(e);
  const nn::Tensor fe = FeaturizeExtractive(ds.extractive[0], e);
  EXPECT_EQ(fe.rows(), e.context_len);
  EXPECT_EQ(fe.cols(), FeatureDim(e));
  EXPECT_EQ(RowsPerExample(e), e.context_len);
  EXPECT_EQ(HeadDims(e), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(FeaturizeExtractive(ds.extractive[0], e),
            FeaturizeExtractive(Dataset(ds).extractive[0], e));

  TaskSpec c = Spec(TaskKind::kClassification, 2);
  EXPECT_EQ(FeatureDim(c), 2u);
  const Dataset dc = Generate(c);
  EXPECT_EQ(FeaturizeClassification(dc.classification[0]),
            FeaturizeClassification(dc.classification[0]));
}

TEST(FeaturizeTest, TrainingSetLayout) {
  TaskSpec g = Spec(TaskKind::kGenerative, 20);
  const Dataset ds = Generate(g);
  const nn::TrainingSet t = BuildTrainingSet(ds);
  // One row per transition with a full two-token context.
  EXPECT_EQ(t.examples(), 20 * (g.prompt_len + g.target_len - 2));
  EXPECT_EQ(t.features.rows(), t.examples());
  TaskSpec e = Spec(TaskKind::kExtractive, 20);
  const nn::TrainingSet te = BuildTrainingSet(Generate(e));
  EXPECT_EQ(te.rows_per_example, e.context_len);
  EXPECT_EQ(te.labels.size(), 2u);
}

TEST(SpansTest, Counts) {
  EXPECT_EQ(EnumerateSpans(3, 3).size(), 6u);
  EXPECT_EQ(EnumerateSpans(3, 1).size(), 3u);
  EXPECT_EQ(EnumerateSpans(10, 4).size(), oracle::SpanCount(10, 4));
  const auto spans = EnumerateSpans(6, 3);
  EXPECT_TRUE(std::is_sorted(spans.begin(), spans.end()));
  for (auto [s, e] : spans) {
    EXPECT_LE(s, e);
    EXPECT_LT(e, 6u);
    EXPECT_LE(e - s + 1, 3u);
  }
}

TEST(SplitTest, SizesMembershipAndUnion) {
  TaskSpec s = Spec(TaskKind::kExtractive, 1000, 4);
  const Dataset ds = Generate(s);
  const Splits a = SplitDataset(ds, {0.8, 0.1, 0.1}, 3);
  EXPECT_EQ(a.train.size(), 800u);
  EXPECT_EQ(a.calib.size(), 100u);
  EXPECT_EQ(a.test.size(), 100u);
  const Splits b = SplitDataset(ds, {0.8, 0.1, 0.1}, 3);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  std::multiset<std::uint64_t> ids;
  for (const Dataset* d : {&a.train, &a.calib, &a.test}) {
    for (std::size_t i = 0; i < d->size(); ++i) ids.insert(d->IdAt(i));
  }
  std::multiset<std::uint64_t> orig;
  for (std::size_t i = 0; i < ds.size(); ++i) orig.insert(ds.IdAt(i));
  EXPECT_EQ(ids, orig);
  EXPECT_NE(SplitDataset(ds, {0.8, 0.1, 0.1}, 4).train, a.train);
}

TEST(SplitTest, OodOnlyInTest) {
  const Dataset ds = Generate(Spec(TaskKind::kClassification, 2000, 5));
  const Splits sp = SplitDataset(ds, {}, 5);
  for (std::size_t i = 0; i < sp.train.size(); ++i) EXPECT_FALSE(sp.train.IsOod(i));
  for (std::size_t i = 0; i < sp.calib.size(); ++i) EXPECT_FALSE(sp.calib.IsOod(i));
  std::size_t ood = 0;
  for (std::size_t i = 0; i < sp.test.size(); ++i) ood += sp.test.IsOod(i);
  std::size_t all = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) all += ds.IsOod(i);
  EXPECT_EQ(ood, all);
}

TEST(SplitTest, RejectsBadRatiosAndEmptySplits) {
  const Dataset ds = Generate(Spec(TaskKind::kExtractive, 100));
  EXPECT_THROW(SplitDataset(ds, {0.5, 0.5, 0.0}, 0), ValidationError);
  EXPECT_THROW(SplitDataset(ds, {0.5, 0.3, 0.3}, 0), ValidationError);
  const Dataset tiny = Generate(Spec(TaskKind::kExtractive, 2));
  EXPECT_THROW(SplitDataset(tiny, {}, 0), ValidationError);
}

TEST(IoTest, JsonlRoundTripIsByteStable) {
  for (auto kind : {TaskKind::kClassification, TaskKind::kExtractive,
                    TaskKind::kGenerative}) {
    const Dataset ds = Generate(Spec(kind, 50, 11));
    const std::string text = DatasetToJsonl(ds);
    EXPECT_EQ(text, DatasetToJsonl(Generate(Spec(kind, 50, 11))));
    const Dataset back = DatasetFromJsonl(text);
    EXPECT_EQ(back, ds);
    EXPECT_EQ(DatasetToJsonl(back), text);
  }
}

TEST(IoTest, SplitHeaderAndMalformedInput) {
  const Dataset ds = Generate(Spec(TaskKind::kClassification, 5));
  const SplitInfo info{"calib", "00ff00ff00ff00ff"};
  std::optional<SplitInfo> got;
  DatasetFromJsonl(DatasetToJsonl(ds, info), &got);
  ASSERT_TRUE(got.has_value());
  EXPECT_EQ(*got, info);
  EXPECT_THROW(DatasetFromJsonl(""), ValidationError);
  EXPECT_THROW(DatasetFromJsonl("{\"kind\":\"other\"}\n"), ValidationError);
  std::string text = DatasetToJsonl(ds);
  text += "{\"id\": 1}\n";
  EXPECT_THROW(DatasetFromJsonl(text), ValidationError);
  EXPECT_EQ(ContentHash("abc"), ContentHash("abc"));
  EXPECT_NE(ContentHash("abc"), ContentHash("abd"));
}

}  // namespace
}  // namespace selqa::tasks
