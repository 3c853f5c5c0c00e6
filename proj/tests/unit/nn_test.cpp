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

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "selqa/nn/autodiff.hpp"
#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/nn/functional.hpp"
#include "selqa/nn/model.hpp"
#include "selqa/nn/train.hpp"
#include "test_util.hpp"

namespace selqa::nn {
namespace {

using testing::RandomTensor;

TEST(TensorTest, ShapeAndStorage) {
  Tensor t(2, 3, 1.5);
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t(1, 2), 1.5);
  EXPECT_THROW(Tensor(2, 2, std::vector<double>(3)), ValidationError);
  const Tensor r = Tensor::FromRows({{1, 2}, {3, 4}, {5, 6}});
  EXPECT_EQ(r.Reshaped(2, 3)(1, 0), 4.0);
  EXPECT_THROW(r.Reshaped(4, 2), ValidationError);
  const std::size_t pick[] = {2, 0};
  EXPECT_EQ(r.RowsAt(pick), Tensor::FromRows({{5, 6}, {1, 2}}));
  Tensor bad(1, 1, std::numeric_limits<double>::quiet_NaN());
  EXPECT_FALSE(bad.AllFinite());
}

TEST(SoftmaxTest, Examples) {
  EXPECT_EQ(Softmax(std::vector<double>{0, 0}), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(Softmax(std::vector<double>{1000, 1000}),
            (std::vector<double>{0.5, 0.5}));
  const std::vector<double> z = {1, 2, 3};
  const auto p = Softmax(z);
  const auto ref = oracle::SoftmaxLd(z);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(p[i], static_cast<double>(ref[i]), 1e-12);
  }
}

TEST(SoftmaxTest, SumsToOneAndShiftInvariant) {
  RngStream r(1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(1 + r.UniformIndex(12));
    for (double& v : z) v = 20.0 * r.Normal();
    const double shift = 100.0 * r.Normal();
    std::vector<double> zs = z;
    for (double& v : zs) v += shift;
    const auto p = Softmax(z);
    const auto q = Softmax(zs);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    for (std::size_t i = 0; i < z.size(); ++i) {
      EXPECT_GT(p[i], -1e-300);
      EXPECT_NEAR(p[i], q[i], 1e-9);
    }
  }
}

TEST(SoftmaxTest, RejectsNonFinite) {
  EXPECT_THROW(Softmax(std::vector<double>{1.0, std::nan("")}), ValidationError);
  EXPECT_THROW(Softmax(std::vector<double>{}), ValidationError);
}

TEST(CrossEntropyTest, Examples) {
  EXPECT_NEAR(CrossEntropy(std::vector<double>{0.5, 0.5}, 0), 0.693147, 1e-6);
  EXPECT_EQ(CrossEntropy(std::vector<double>{0, 1, 0}, 1), 0.0);
  EXPECT_NEAR(CrossEntropy(std::vector<double>{0.1, 0.2, 0.7}, 2), 0.356675, 1e-6);
  EXPECT_NEAR(CrossEntropy(std::vector<double>{1, 0}, 1), -std::log(1e-12), 1e-9);
  EXPECT_THROW(CrossEntropy(std::vector<double>{0.5, 0.5}, 2), ValidationError);
}

TEST(ModelSpecTest, ValidatesChain) {
  ModelSpec s;
  s.input_dim = 3;
  s.layers = {LayerSpec::Linear(3, 4), LayerSpec::Linear(5, 2)};
  s.head_dims = {2};
  EXPECT_THROW(s.Validate(), ValidationError);
  s.layers = {LayerSpec::Linear(3, 4), LayerSpec::Dropout(1.0)};
  EXPECT_THROW(s.Validate(), ValidationError);
  s.layers = {LayerSpec::Linear(3, 4)};
  s.head_dims = {};
  EXPECT_THROW(s.Validate(), ValidationError);
}

TEST(ForwardTest, IdentityLinear) {
  ModelSpec spec;
  spec.input_dim = 2;
  spec.head_dims = {2};
  ParamStore p = InitParams(spec, 0);
  p.Value(HeadWeightName(0)) = Tensor::FromRows({{1, 0}, {0, 1}});
  const auto out = ModelForward(p, spec, Tensor::Row({1, 2}), false, RngStream());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], Tensor::Row({1, 2}));
}

TEST(ForwardTest, ZeroRateDropoutIsIdentity) {
  ModelSpec spec;
  spec.input_dim = 3;
  spec.layers = {LayerSpec::Linear(3, 8), LayerSpec::Relu(),
                 LayerSpec::Dropout(0.0)};
  spec.head_dims = {2, 3};
  ParamStore p = InitParams(spec, 4);
  const Tensor x = RandomTensor(5, 3, 1);
  const auto on = ModelForward(p, spec, x, true, RngStream(1, 2));
  const auto off = ModelForward(p, spec, x, false, RngStream(1, 2));
  EXPECT_EQ(on, off);
}

TEST(ForwardTest, MatchesDenseOracle) {
  const std::size_t hidden[] = {5, 4};
  const std::size_t heads[] = {3};
  const ModelSpec spec = ModelSpec::Mlp(2, hidden, heads, 0.2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ParamStore p = InitParams(spec, seed);
    testing::RandomizeBiases(p, seed);
    const auto out = ModelForward(p, spec, Tensor::Row({0.3, -0.7}), false,
                                  RngStream());
    const auto ref = oracle::DenseForward(testing::OracleLayers(spec, p, 0),
                                          {0.3, -0.7});
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(out[0](0, j), ref[j], 1e-6);
  }
}

TEST(ForwardTest, ShapeMismatchNamesDimensions) {
  const std::size_t hidden[] = {4};
  const std::size_t heads[] = {2};
  const ModelSpec spec = ModelSpec::Mlp(3, hidden, heads);
  const ParamStore p = InitParams(spec, 0);
  try {
    ModelForward(p, spec, Tensor(1, 5), false, RngStream());
    FAIL() << "expected a ValidationError";
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find('5'), std::string::npos) << what;
    EXPECT_NE(what.find('3'), std::string::npos) << what;
  }
}

TEST(ForwardTest, DropoutMasksIgnoreBatchComposition) {
  const std::size_t hidden[] = {16};
  const std::size_t heads[] = {2};
  const ModelSpec spec = ModelSpec::Mlp(3, hidden, heads, 0.5);
  const ParamStore p = InitParams(spec, 1);
  const Tensor x = RandomTensor(4, 3, 2);
  const std::uint64_t keys[] = {10, 11, 12, 13};
  const DropoutContext ctx{RngStream(3, 4), keys, 2, true};
  const auto full = ModelForward(p, spec, x, &ctx);
  for (std::size_t r = 0; r < 4; ++r) {
    const std::size_t idx[] = {r};
    const DropoutContext one{RngStream(3, 4), std::span(keys + r, 1), 2, true};
    const auto single = ModelForward(p, spec, x.RowsAt(idx), &one);
    EXPECT_EQ(testing::RowOf(single[0], 0), testing::RowOf(full[0], r));
  }
}

TEST(DropoutTest, DegenerateCasesAreIdentity) {
  const Tensor x = RandomTensor(10, 10, 3);
  RngStream r(1, 1);
  EXPECT_EQ(DropoutForward(x, 0.0, r, true), x);
  EXPECT_EQ(DropoutForward(x, 0.7, r, false), x);
  EXPECT_THROW(DropoutForward(x, 1.0, r, true), ValidationError);
  EXPECT_THROW(DropoutForward(x, -0.1, r, true), ValidationError);
}

TEST(DropoutTest, HalfRateStatistics) {
  Tensor x(100, 100);
  RngStream fill(2, 2);
  for (double& v : x.values()) v = 1.0 + fill.Uniform();
  RngStream r(5, 5);
  const Tensor y = DropoutForward(x, 0.5, r, true);
  std::size_t zeros = 0;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(y[i], 2.0 * x[i]);
    }
    sx += x[i];
    sy += y[i];
  }
  EXPECT_NEAR(static_cast<double>(zeros) / x.size(), 0.5, 0.02);
  EXPECT_NEAR(sy / sx, 1.0, 0.05);
}

TEST(DropoutTest, KeyedMaskStatistics) {
  const std::uint64_t keys[] = {1, 2, 3, 4, 5, 6, 7, 8};
  const DropoutContext ctx{RngStream(9, 9), keys, 0, true};
  const Tensor m = DropoutMask(8, 1250, 0.3, ctx, 0);
  std::size_t zeros = 0;
  for (double v : m.values()) {
    if (v == 0.0) {
      ++zeros;
    } else {
      EXPECT_DOUBLE_EQ(v, 1.0 / 0.7);
    }
  }
  EXPECT_NEAR(static_cast<double>(zeros) / m.size(), 0.3, 0.02);
  // A different pass draws a different mask.
  const DropoutContext other{RngStream(9, 9), keys, 1, true};
  EXPECT_NE(DropoutMask(8, 1250, 0.3, other, 0), m);
}

TEST(GaussianSampleTest, ZeroSigmaReturnsMu) {
  Tape t;
  const Tensor mu = RandomTensor(3, 4, 1);
  const Var m = t.Constant(mu);
  const Var s = t.Constant(Tensor(3, 4));
  const Var z = ops::GaussianSample(t, m, s, RandomTensor(3, 4, 2));
  EXPECT_EQ(t.value(z), mu);
}

TEST(GaussianSampleTest, UnitMoments) {
  Tape t;
  const std::size_t n = 100000;
  Tensor eps(1, n);
  RngStream r(6, 6);
  for (double& v : eps.values()) v = r.Normal();
  const Var z = ops::GaussianSample(t, t.Constant(Tensor(1, n)),
                                    t.Constant(Tensor(1, n, 1.0)), eps);
  auto [mean, var] = oracle::MeanVariance(t.value(z).storage());
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.03);
}

TEST(GaussianSampleTest, RejectsNegativeSigmaAndShapeMismatch) {
  Tape t;
  const Var m = t.Constant(Tensor(1, 2));
  EXPECT_THROW(ops::GaussianSample(t, m, t.Constant(Tensor::Row({1, -1})),
                                   Tensor(1, 2)),
               ValidationError);
  EXPECT_THROW(ops::GaussianSample(t, m, t.Constant(Tensor(1, 3)), Tensor(1, 3)),
               ValidationError);
}

TEST(GaussianSampleTest, GradientOfMeanIsOneOverSize) {
  ParamStore store;
  store.Add("mu", RandomTensor(2, 3, 1));
  store.Add("sigma", Tensor(2, 3, 0.5));
  Tape t;
  const Var z = ops::GaussianSample(t, t.Param(store, "mu"),
                                    t.Param(store, "sigma"), RandomTensor(2, 3, 3));
  t.Backward(ops::Scale(t, ops::Sum(t, z), 1.0 / 6.0));
  for (double g : store.Grad("mu").values()) EXPECT_DOUBLE_EQ(g, 1.0 / 6.0);
}

TEST(BackwardTest, SingleParameter) {
  ParamStore store;
  store.Add("w", Tensor::Row({3.25}));
  Tape t;
  t.Backward(ops::Sum(t, t.Param(store, "w")));
  EXPECT_EQ(store.Grad("w")(0, 0), 1.0);
}

TEST(BackwardTest, SumOfSquares) {
  ParamStore store;
  store.Add("w", RandomTensor(3, 2, 4));
  store.Add("unused", RandomTensor(1, 2, 5));
  Tape t;
  t.Backward(ops::SumSquares(t, t.Param(store, "w")));
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_DOUBLE_EQ(store.Grad("w")[i], 2.0 * store.Value("w")[i]);
  }
  for (double g : store.Grad("unused").values()) EXPECT_EQ(g, 0.0);
}

TEST(BackwardTest, RejectsNonScalarLoss) {
  ParamStore store;
  store.Add("w", Tensor(2, 2, 1.0));
  Tape t;
  EXPECT_THROW(t.Backward(t.Param(store, "w")), ValidationError);
}

TEST(BackwardTest, MeanOfIdenticalInputsReproducesThem) {
  Tape t;
  const Tensor a = RandomTensor(2, 5, 8);
  const Var v = t.Constant(a);
  const Var vs[] = {v, v, v};
  EXPECT_EQ(t.value(ops::Mean(t, vs)), a);
}

// Two separable blobs: x0 < -1 for class 0, x0 > 1 for class 1.
TrainingSet SeparableBlobs(std::size_t n, std::uint64_t seed) {
  TrainingSet d;
  d.features = Tensor(n, 2);
  d.labels.resize(1);
  RngStream r(seed, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t y = i % 2;
    d.features(i, 0) = (y == 0 ? -1.0 : 1.0) * (1.0 + 2.0 * r.Uniform());
    d.features(i, 1) = 4.0 * r.Uniform() - 2.0;
    d.labels[0].push_back(y);
    d.keys.push_back(i);
  }
  return d;
}

double TrainingAccuracy(const ParamStore& p, const ModelSpec& spec,
                        const TrainingSet& d) {
  const auto logits = ModelForward(p, spec, d.features, false, RngStream());
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.examples(); ++i) {
    ok += Argmax(logits[0].row(i)) == d.labels[0][i] ? 1 : 0;
  }
  return static_cast<double>(ok) / d.examples();
}

TEST(TrainTest, SeparableBlobsReachHighAccuracy) {
  const std::size_t hidden[] = {16};
  const std::size_t heads[] = {2};
  const ModelSpec spec = ModelSpec::Mlp(2, hidden, heads, 0.1);
  const TrainingSet d = SeparableBlobs(400, 1);
  ParamStore p = InitParams(spec, 1);
  TrainConfig cfg;
  cfg.epochs = 30;
  const auto log = TrainStandard(p, spec, d, cfg);
  ASSERT_EQ(log.size(), 30u);
  EXPECT_LT(log.back().mean_loss, log.front().mean_loss);
  EXPECT_GE(TrainingAccuracy(p, spec, d), 0.98);
}

TEST(TrainTest, ZeroEpochsLeavesInitialization) {
  const std::size_t hidden[] = {8};
  const std::size_t heads[] = {2};
  const ModelSpec spec = ModelSpec::Mlp(2, hidden, heads);
  ParamStore p = InitParams(spec, 3);
  const ParamStore init = p;
  TrainConfig cfg;
  cfg.epochs = 0;
  TrainStandard(p, spec, SeparableBlobs(50, 2), cfg);
  EXPECT_TRUE(p == init);
}

TEST(TrainTest, SameSeedIsBitIdentical) {
  const std::size_t hidden[] = {8};
  const std::size_t heads[] = {2};
  const ModelSpec spec = ModelSpec::Mlp(2, hidden, heads, 0.2);
  const TrainingSet d = SeparableBlobs(120, 4);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.seed = 9;
  ParamStore a = InitParams(spec, 1), b = InitParams(spec, 1);
  const auto la = TrainStandard(a, spec, d, cfg);
  const auto lb = TrainStandard(b, spec, d, cfg);
  EXPECT_EQ(la.back().mean_loss, lb.back().mean_loss);
  EXPECT_TRUE(a == b);
}

TEST(TrainTest, RejectsBadDataBeforeAnyStep) {
  const std::size_t hidden[] = {8};
  const std::size_t heads[] = {2};
  const ModelSpec spec = ModelSpec::Mlp(3, hidden, heads);
  ParamStore p = InitParams(spec, 0);
  const ParamStore init = p;
  EXPECT_THROW(TrainStandard(p, spec, SeparableBlobs(20, 1), TrainConfig{}),
               ValidationError);
  TrainingSet empty;
  empty.features = Tensor(0, 3);
  empty.labels.resize(1);
  EXPECT_THROW(TrainStandard(p, spec, empty, TrainConfig{}), ValidationError);
  EXPECT_TRUE(p == init);
}

TEST(CountParamsTest, Examples) {
  ModelSpec linear;
  linear.input_dim = 4;
  linear.head_dims = {3};
  EXPECT_EQ(CountParams(linear), 15u);
  const std::size_t hidden[] = {7, 5};
  const std::size_t heads[] = {3, 2};
  const ModelSpec mlp = ModelSpec::Mlp(4, hidden, heads, 0.1);
  EXPECT_EQ(CountParams(mlp), (4 + 1) * 7u + (7 + 1) * 5u + (5 + 1) * 5u);
  EXPECT_EQ(InitParams(mlp, 0).Count(), CountParams(mlp));
}

TEST(InitTest, GlorotBoundsAndZeroBias) {
  const std::size_t hidden[] = {30};
  const std::size_t heads[] = {10};
  const ModelSpec spec = ModelSpec::Mlp(20, hidden, heads);
  const ParamStore p = InitParams(spec, 2);
  const double bound = std::sqrt(6.0 / (20 + 30));
  for (double w : p.Value(LayerWeightName(0)).values()) {
    EXPECT_LE(std::abs(w), bound);
  }
  for (double b : p.Value(LayerBiasName(0)).values()) EXPECT_EQ(b, 0.0);
  EXPECT_FALSE(p == InitParams(spec, 3));
  EXPECT_TRUE(p == InitParams(spec, 2));
}

TEST(CheckpointTest, BlobRoundTripIsBitExact) {
  testing::TempDir dir("blob");
  const std::size_t hidden[] = {6};
  const std::size_t heads[] = {3};
  const ModelSpec spec = ModelSpec::Mlp(4, hidden, heads, 0.1);
  ParamStore p = InitParams(spec, 5);
  testing::RandomizeBiases(p, 5);
  p.Value(LayerBiasName(0))[0] = -0.0;
  p.Value(LayerBiasName(0))[1] = 1e-310;
  const auto rec = WriteParamBlob(p, dir.path() / "p.bin");
  EXPECT_EQ(rec.count, p.Count());
  const ParamStore q = ReadParamBlob(ParamLayout(p), dir.path() / "p.bin", rec);
  ASSERT_TRUE(p == q);
  EXPECT_TRUE(std::signbit(q.Value(LayerBiasName(0))[0]));
  EXPECT_EQ(SpecFromJson(SpecToJson(spec)), spec);
}

TEST(CheckpointTest, CorruptOrTruncatedBlobRejected) {
  testing::TempDir dir("blob-bad");
  const std::size_t hidden[] = {6};
  const std::size_t heads[] = {3};
  const ModelSpec spec = ModelSpec::Mlp(4, hidden, heads);
  const ParamStore p = InitParams(spec, 5);
  const auto path = dir.path() / "p.bin";
  const auto rec = WriteParamBlob(p, path);
  std::string bytes = ReadFile(path);
  std::string flipped = bytes;
  flipped[17] = static_cast<char>(flipped[17] ^ 0x01);
  WriteFileAtomic(path, flipped);
  EXPECT_THROW(ReadParamBlob(ParamLayout(p), path, rec), RuntimeError);
  WriteFileAtomic(path, bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(ReadParamBlob(ParamLayout(p), path, rec), RuntimeError);
}

TEST(HashTest, FnvKnownValuesAndHex) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(ParseHashHex(HashHex(0x0123456789abcdefull)), 0x0123456789abcdefull);
  EXPECT_EQ(HashHex(1).size(), 16u);
}

}  // namespace
}  // namespace selqa::nn
