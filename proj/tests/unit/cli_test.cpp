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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selqa/cli/config.hpp"
#include "selqa/cli/pipeline.hpp"
#include "selqa/cli/scoring.hpp"
#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/tasks/generate.hpp"
#include "selqa/tasks/split.hpp"
#include "selqa/uq/convert.hpp"
#include "selqa/uq/fit.hpp"
#include "test_util.hpp"

namespace selqa::cli {
namespace {

namespace fs = std::filesystem;

std::string ErrorOf(const nlohmann::json& j) {
  try {
    ConfigFromJson(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(ConfigTest, EmptyObjectGivesDefaults) {
  const RunConfig c = ConfigFromJson(nlohmann::json::object());
  EXPECT_EQ(c, RunConfig());
  EXPECT_EQ(c.methods.size(), 5u);
  EXPECT_EQ(c.task, tasks::TaskSpec());
  EXPECT_FALSE(c.grid.empty());
}

TEST(ConfigTest, RoundTripAndHash) {
  RunConfig c;
  c.seed = 17;
  c.task.task = tasks::TaskKind::kExtractive;
  c.task.seed = 17;
  c.model.hidden = {12, 6};
  c.methods = {uq::MethodKind::kBaseline, uq::MethodKind::kComposed};
  c.uq.aggregation = uq::MveAggregation::kLogitMean;
  c.generation.reduce = selective::SequenceReduce::kMean;
  const RunConfig back = ConfigFromJson(ConfigToJson(c));
  EXPECT_EQ(back, c);
  EXPECT_EQ(ConfigHash(back), ConfigHash(c));
  RunConfig moved = c;
  moved.out_dir = "elsewhere";
  EXPECT_EQ(ConfigHash(moved), ConfigHash(c));
  RunConfig other = c;
  other.seed = 18;
  EXPECT_NE(ConfigHash(other), ConfigHash(c));
}

TEST(ConfigTest, ErrorsNameTheField) {
  EXPECT_NE(ErrorOf({{"task", {{"noise_rate", 0.9}}}}).find("noise_rate"),
            std::string::npos);
  EXPECT_NE(ErrorOf({{"modle", {}}}).find("modle: unknown key"), std::string::npos);
  EXPECT_NE(ErrorOf({{"methods", {"baseline", "bayes"}}}).find("bayes"),
            std::string::npos);
  EXPECT_NE(ErrorOf({{"uq", {{"samples", "ten"}}}}).find("uq.samples"),
            std::string::npos);
  EXPECT_NE(ErrorOf({{"task", {{"seed", 3}}}}).find("task.seed"), std::string::npos);
}

TEST(ConfigTest, CollectsAllErrors) {
  const std::string msg = ErrorOf({{"modle", {}},
                                   {"bench", {{"repetitions", 2}}},
                                   {"grid", {50, 100}},
                                   {"task", {{"noise_rate", 0.9}}}});
  for (const char* want : {"modle", "bench.repetitions", "grid", "noise_rate"}) {
    EXPECT_NE(msg.find(want), std::string::npos) << want << " missing from\n" << msg;
  }
}

TEST(ConfigTest, LoadConfigFileErrors) {
  testing::TempDir dir("cfg");
  EXPECT_THROW(LoadConfig(dir.path() / "absent.json"), ValidationError);
  std::ofstream(dir.path() / "bad.json") << "{ not json";
  EXPECT_THROW(LoadConfig(dir.path() / "bad.json"), ValidationError);
  std::ofstream(dir.path() / "ok.json") << R"({"seed": 4})";
  EXPECT_EQ(LoadConfig(dir.path() / "ok.json").seed, 4u);
}

TEST(ChunksTest, CoversRangeOnceAndPropagatesErrors) {
  for (std::size_t workers : {1u, 3u, 8u}) {
    for (std::size_t n : {0u, 1u, 7u, 100u}) {
      std::vector<std::atomic<int>> hits(n);
      const std::size_t chunks =
          RunChunks(n, workers, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) ++hits[i];
          });
      EXPECT_LE(chunks, workers);
      for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    }
  }
  EXPECT_THROW(RunChunks(10, 4,
                         [](std::size_t c, std::size_t, std::size_t) {
                           if (c == 2) throw std::runtime_error("chunk failed");
                         }),
               std::runtime_error);
}

TEST(ScoringTest, IndependentOfWorkerCount) {
  for (auto kind : {tasks::TaskKind::kClassification, tasks::TaskKind::kExtractive,
                    tasks::TaskKind::kGenerative}) {
    RunConfig c;
    c.task.task = kind;
    c.task.n_examples = 150;
    c.model.hidden = {8};
    const tasks::Dataset ds = tasks::Generate(c.task);
    const nn::ModelSpec spec = c.BaseSpec();
    const uq::ConvertedModel m = uq::Convert(spec, nn::InitParams(spec, 1),
                                             c.Method(uq::MethodKind::kMcDropout), 1,
                                             c.uq.aggregation);
    ScoreOptions o;
    o.rng = nn::RngStream(3, 0);
    o.generate.steps = c.task.target_len;
    o.workers = 1;
    const ScoredSet one = ScoreDataset(m, ds, o);
    o.workers = 4;
    const ScoredSet four = ScoreDataset(m, ds, o);
    EXPECT_EQ(one.preds, four.preds);
    EXPECT_EQ(one.f1, four.f1);
    EXPECT_EQ(one.token_accuracy, four.token_accuracy);
    ASSERT_EQ(one.preds.size(), ds.size());
    for (const auto& p : one.preds) EXPECT_TRUE(p.correct.has_value());
  }
}

// Runs Main with the given arguments, swallowing its console output.
int RunMain(std::vector<std::string> args, std::string* err = nullptr) {
  args.insert(args.begin(), "selqa");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream sink;
  auto* old = std::cout.rdbuf(sink.rdbuf());
  ::testing::internal::CaptureStderr();
  const int rc = Main(static_cast<int>(argv.size()), argv.data());
  const std::string e = ::testing::internal::GetCapturedStderr();
  std::cout.rdbuf(old);
  if (err != nullptr) *err = e;
  return rc;
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    config_ = dir_.path() / "config.json";
    std::ofstream(config_) << R"({
      "task": {"task": "classification", "n_examples": 300},
      "model": {"hidden": [8]}, "train": {"epochs": 2},
      "uq": {"samples": 3, "members": 2},
      "bench": {"repetitions": 5, "warmups": 0, "batch": 32}})";
    cfg_ = LoadConfig(config_);
  }
  std::vector<std::string> Args(const std::string& cmd, const fs::path& out) {
    return {cmd, "--config", config_.string(), "--out", out.string()};
  }
  testing::TempDir dir_{"pipeline"};
  fs::path config_;
  RunConfig cfg_;
};

TEST_F(PipelineTest, ExitCodes) {
  const fs::path out = dir_.path() / "runs";
  std::string err;
  EXPECT_EQ(RunMain(Args("gen-data", out)), 0);
  EXPECT_EQ(RunMain({"nonsense"}, &err), 2);
  EXPECT_NE(err.find("nonsense"), std::string::npos);
  EXPECT_EQ(RunMain({"train", "--bogus-flag"}), 2);
  EXPECT_EQ(RunMain({"train", "--config", (dir_.path() / "none.json").string()}), 2);

  // Missing upstream: evaluate before train names the absent artifact.
  EXPECT_EQ(RunMain(Args("evaluate", out), &err), 2);
  EXPECT_NE(err.find("train"), std::string::npos);
  EXPECT_NE(err.find("missing upstream"), std::string::npos);

  // Completed stages need --force.
  EXPECT_EQ(RunMain(Args("gen-data", out), &err), 2);
  EXPECT_NE(err.find("--force"), std::string::npos);
  auto forced = Args("gen-data", out);
  forced.push_back("--force");
  EXPECT_EQ(RunMain(forced), 0);

  // An output root that cannot be created is a runtime failure.
  const fs::path blocker = dir_.path() / "blocker";
  std::ofstream(blocker) << "x";
  EXPECT_EQ(RunMain(Args("gen-data", blocker / "runs")), 1);
}

TEST_F(PipelineTest, FailedStageLeavesMarker) {
  const fs::path out = dir_.path() / "runs";
  ASSERT_EQ(RunMain(Args("gen-data", out)), 0);
  RunOptions opt;
  opt.out = out;
  const fs::path run = RunDir(cfg_, opt);
  const fs::path train_file = run / "gen-data" / "train.jsonl";
  const std::string good = nn::ReadFile(train_file);
  nn::WriteFileAtomic(train_file, "garbage\n");
  EXPECT_NE(RunMain(Args("train", out)), 0);
  EXPECT_TRUE(fs::exists(run / "train" / ".failed"));
  // A failed stage reruns without --force; downstream refuses its output.
  EXPECT_EQ(RunMain(Args("evaluate", out)), 2);
  nn::WriteFileAtomic(train_file, good);
  EXPECT_EQ(RunMain(Args("train", out)), 0);
  EXPECT_FALSE(fs::exists(run / "train" / ".failed"));
}

TEST_F(PipelineTest, AllIsDeterministic) {
  const fs::path a = dir_.path() / "a", b = dir_.path() / "b";
  ASSERT_EQ(RunMain(Args("all", a)), 0);
  ASSERT_EQ(RunMain(Args("all", b)), 0);
  RunOptions oa, ob;
  oa.out = a;
  ob.out = b;
  const fs::path ra = RunDir(cfg_, oa), rb = RunDir(cfg_, ob);
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(ra)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), ra);
    if (rel == "train/timing.json" || rel == "bench/efficiency.csv") continue;
    ASSERT_TRUE(fs::exists(rb / rel)) << rel;
    EXPECT_EQ(nn::ReadFile(e.path()), nn::ReadFile(rb / rel)) << rel;
    ++compared;
  }
  EXPECT_GT(compared, 20u);
  for (const char* f : {"sweep/sweep.csv", "sweep/accuracy.svg", "evaluate/nominal.csv",
                        "bench/efficiency.csv", "config.json"}) {
    EXPECT_TRUE(fs::exists(ra / f)) << f;
  }
}

}  // namespace
}  // namespace selqa::cli
