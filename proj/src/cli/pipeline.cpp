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

#include "selqa/cli/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "selqa/cli/scoring.hpp"
#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/report/bench.hpp"
#include "selqa/report/emit.hpp"
#include "selqa/report/metrics.hpp"
#include "selqa/report/trace.hpp"
#include "selqa/selective/risk.hpp"
#include "selqa/tasks/featurize.hpp"
#include "selqa/tasks/generate.hpp"
#include "selqa/tasks/io.hpp"
#include "selqa/uq/checkpoint.hpp"
#include "selqa/uq/fit.hpp"

namespace selqa::cli {

namespace fs = std::filesystem;

std::string_view CommandName(Command c) {
  switch (c) {
    case Command::kGenData: return "gen-data";
    case Command::kTrain: return "train";
    case Command::kEvaluate: return "evaluate";
    case Command::kSweep: return "sweep";
    case Command::kBench: return "bench";
    case Command::kTrace: return "trace";
    case Command::kAll: return "all";
  }
  return "unknown";
}

std::optional<Command> ParseCommand(std::string_view name) {
  for (Command c : {Command::kGenData, Command::kTrain, Command::kEvaluate,
                    Command::kSweep, Command::kBench, Command::kTrace,
                    Command::kAll}) {
    if (CommandName(c) == name) return c;
  }
  return std::nullopt;
}

fs::path RunDir(const RunConfig& config, const RunOptions& options) {
  const fs::path root = options.out.empty() ? fs::path(config.out_dir) : options.out;
  return root / ("run-" + ConfigHash(config));
}

namespace {

constexpr const char* kFailedMarker = ".failed";

struct Context {
  const RunConfig& config;
  const RunOptions& options;
  fs::path run;
  std::string hash;

  std::ostream& log() const {
    return options.log != nullptr ? *options.log : std::cout;
  }
  fs::path Stage(Command c) const { return run / std::string(CommandName(c)); }
  // Upstream artifact; missing files are a validation error naming the path.
  fs::path Need(Command c, const std::string& file) const {
    const fs::path p = Stage(c) / file;
    if (!fs::exists(p) || fs::exists(Stage(c) / kFailedMarker)) {
      throw ValidationError("missing upstream artifact " + p.string() +
                            " (run '" + std::string(CommandName(c)) +
                            "' first)");
    }
    return p;
  }
};

void RunStage(const Context& ctx, Command c,
              const std::function<void(const fs::path&)>& body) {
  const fs::path dir = ctx.Stage(c);
  if (fs::exists(dir)) {
    if (!ctx.options.force && !fs::exists(dir / kFailedMarker)) {
      throw ValidationError(dir.string() +
                            " already exists; pass --force to rerun");
    }
    fs::remove_all(dir);
  }
  fs::create_directories(dir);
  try {
    body(dir);
  } catch (const std::exception& e) {
    nn::WriteFileAtomic(dir / kFailedMarker, std::string(e.what()) + "\n");
    throw;
  }
  ctx.log() << CommandName(c) << ": wrote " << dir.string() << "\n";
}

std::string MethodFile(uq::MethodKind m) { return std::string(uq::MethodName(m)); }

nn::RngStream InferRng(const RunConfig& c) {
  return nn::RngStream(c.seed, nn::Tag("infer"));
}

ScoreOptions MakeScoreOptions(const Context& ctx) {
  ScoreOptions o;
  o.rng = InferRng(ctx.config);
  o.workers = ctx.options.workers;
  o.generate.reduce = ctx.config.generation.reduce;
  o.generate.step_reduce = ctx.config.generation.step_reduce;
  o.generate.steps = ctx.config.task.target_len;
  return o;
}

nlohmann::json ReadJson(const fs::path& p) {
  try {
    return nlohmann::json::parse(nn::ReadFile(p));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed " + p.string() + ": " + e.what());
  }
}

void GenData(const Context& ctx, const fs::path& dir) {
  const auto& c = ctx.config;
  const tasks::Dataset ds = tasks::Generate(c.task);
  const tasks::Splits s = tasks::SplitDataset(ds, c.split, c.seed);
  tasks::WriteDataset(dir / "dataset.jsonl", ds);
  const std::string parent = tasks::ContentHash(nn::ReadFile(dir / "dataset.jsonl"));
  nlohmann::json files = {{"dataset.jsonl", parent}};
  const std::pair<const char*, const tasks::Dataset*> parts[] = {
      {"train", &s.train}, {"calib", &s.calib}, {"test", &s.test}};
  for (const auto& [name, part] : parts) {
    const std::string file = std::string(name) + ".jsonl";
    tasks::WriteDataset(dir / file, *part, tasks::SplitInfo{name, parent});
    files[file] = tasks::ContentHash(nn::ReadFile(dir / file));
  }
  const nlohmann::json manifest = {
      {"config_hash", ctx.hash},
      {"files", files},
      {"counts", {{"dataset", ds.size()}, {"train", s.train.size()},
                  {"calib", s.calib.size()}, {"test", s.test.size()}}}};
  nn::WriteFileAtomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

void Train(const Context& ctx, const fs::path& dir) {
  const auto& c = ctx.config;
  const tasks::Dataset train = tasks::ReadDataset(ctx.Need(Command::kGenData, "train.jsonl"));
  const tasks::Dataset calib = tasks::ReadDataset(ctx.Need(Command::kGenData, "calib.jsonl"));
  const nn::TrainingSet data = tasks::BuildTrainingSet(train);
  const nn::ModelSpec spec = c.BaseSpec();
  const nn::ParamStore base = nn::InitParams(spec, c.seed);
  nn::TrainConfig tc = c.train;
  tc.seed = c.seed;

  std::vector<uq::ConvertedModel> models(c.methods.size());
  std::vector<uq::FitLog> logs(c.methods.size());
  // Methods are independent pure computations; run them side by side.
  RunChunks(c.methods.size(), ctx.options.workers,
            [&](std::size_t, std::size_t begin, std::size_t end) {
              for (std::size_t i = begin; i < end; ++i) {
                models[i] = uq::Convert(spec, base, c.Method(c.methods[i]),
                                        c.seed, c.uq.aggregation);
                logs[i] = uq::Fit(models[i], data, tc);
              }
            });
  nlohmann::json log = nlohmann::json::object();
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    auto& m = models[i];
    if (m.method.kind == uq::MethodKind::kComposed) {
      ScoreOptions o = MakeScoreOptions(ctx);
      m.calibration = CalibrateComposed(m, calib, o);
    }
    uq::SaveModel(m, dir, MethodFile(c.methods[i]));
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : logs[i]) {
      nlohmann::json losses = nlohmann::json::array();
      for (const auto& e : run) losses.push_back(e.mean_loss);
      runs.push_back(losses);
    }
    log[MethodFile(c.methods[i])] = runs;
  }
  const nlohmann::json manifest = {{"config_hash", ctx.hash},
                                   {"epoch_losses", log}};
  nn::WriteFileAtomic(dir / "train_log.json", manifest.dump(2) + "\n");
  // Wall-clock values live apart so every other artifact is reproducible.
  nlohmann::json timing = nlohmann::json::object();
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    timing[MethodFile(c.methods[i])] = models[i].conversion_seconds;
  }
  nn::WriteFileAtomic(dir / "timing.json", timing.dump(2) + "\n");
}

std::vector<uq::ConvertedModel> LoadModels(const Context& ctx) {
  std::vector<uq::ConvertedModel> out;
  for (auto m : ctx.config.methods) {
    out.push_back(uq::LoadModel(ctx.Need(Command::kTrain, MethodFile(m) + ".json")));
  }
  return out;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Answer-until-confident against single-shot answers at the same coverage.
void GenerationLoop(const Context& ctx, const fs::path& dir,
                    const std::vector<uq::ConvertedModel>& models,
                    const std::vector<ScoredSet>& calib_sets,
                    const std::vector<ScoredSet>& test_sets,
                    const tasks::Dataset& test, const std::string& calib_hash) {
  const auto& c = ctx.config;
  std::vector<std::vector<std::size_t>> prompts;
  std::vector<std::uint64_t> ids;
  for (const auto& ex : test.generative) {
    prompts.push_back(ex.prompt);
    ids.push_back(ex.id);
  }
  report::CsvTable table;
  table.header = {"method", "coverage", "loop_token_accuracy",
                  "single_shot_token_accuracy", "mean_tries"};
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto kind = ScoreKindFor(models[m]);
    const auto policy = selective::FitThreshold(
        selective::Scores(calib_sets[m].preds, kind), c.generation.percentile,
        kind, calib_hash);
    ScoreOptions so = MakeScoreOptions(ctx);
    std::vector<selective::LoopResult> results(prompts.size());
    RunChunks(prompts.size(), ctx.options.workers,
              [&](std::size_t, std::size_t begin, std::size_t end) {
                std::vector<std::vector<std::size_t>> p(prompts.begin() + begin,
                                                        prompts.begin() + end);
                std::vector<std::uint64_t> k(ids.begin() + begin, ids.begin() + end);
                auto r = selective::AnswerUntilConfident(
                    models[m], c.task, p, k, policy, c.generation.max_tries,
                    so.rng, so.generate);
                std::move(r.begin(), r.end(), results.begin() + begin);
              });
    std::string jsonl;
    std::vector<double> loop_acc;
    double tries = 0.0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      tries += static_cast<double>(r.tries);
      nlohmann::json j = {{"id", ids[i]}, {"tries", r.tries}};
      if (r.answer) {
        const double acc = report::SequenceAccuracy(
            r.answer->tokens, test.generative[i].target).token_accuracy;
        loop_acc.push_back(acc);
        j["answer"] = r.answer->tokens;
        j["sigma"] = r.answer->sigma;
        j["token_accuracy"] = acc;
      } else {
        j["answer"] = nullptr;
      }
      jsonl += j.dump() + "\n";
    }
    nn::WriteFileAtomic(dir / (MethodFile(c.methods[m]) + ".loop.jsonl"), jsonl);
    // Single-shot: the most confident first-try answers, same count.
    const auto& ts = test_sets[m];
    std::vector<std::size_t> order(ts.preds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return ts.preds[a].Score(kind) < ts.preds[b].Score(kind);
    });
    std::vector<double> single;
    for (std::size_t i = 0; i < loop_acc.size(); ++i) {
      single.push_back(ts.token_accuracy[order[i]]);
    }
    const double coverage =
        static_cast<double>(loop_acc.size()) / static_cast<double>(results.size());
    table.rows.push_back(
        {MethodFile(c.methods[m]), report::FormatNumber(coverage),
         loop_acc.empty() ? "" : report::FormatNumber(Mean(loop_acc)),
         single.empty() ? "" : report::FormatNumber(Mean(single)),
         report::FormatNumber(tries / static_cast<double>(results.size()))});
  }
  nn::WriteFileAtomic(dir / "loop.csv", report::WriteCsv(table));
}

void Evaluate(const Context& ctx, const fs::path& dir) {
  const auto& c = ctx.config;
  const fs::path calib_path = ctx.Need(Command::kGenData, "calib.jsonl");
  const fs::path test_path = ctx.Need(Command::kGenData, "test.jsonl");
  const tasks::Dataset calib = tasks::ReadDataset(calib_path);
  const tasks::Dataset test = tasks::ReadDataset(test_path);
  const std::string calib_hash = tasks::ContentHash(nn::ReadFile(calib_path));
  const std::string test_hash = tasks::ContentHash(nn::ReadFile(test_path));
  const auto models = LoadModels(ctx);
  const ScoreOptions so = MakeScoreOptions(ctx);

  std::vector<report::NominalRow> nominal;
  std::vector<ScoredSet> calib_sets, test_sets;
  nlohmann::json kinds = nlohmann::json::object();
  for (std::size_t m = 0; m < models.size(); ++m) {
    const std::string name = MethodFile(c.methods[m]);
    calib_sets.push_back(ScoreDataset(models[m], calib, so));
    test_sets.push_back(ScoreDataset(models[m], test, so));
    nn::WriteFileAtomic(dir / (name + ".calib.jsonl"),
                        selective::PredictionsToJsonl(calib_sets.back().preds));
    nn::WriteFileAtomic(dir / (name + ".test.jsonl"),
                        selective::PredictionsToJsonl(test_sets.back().preds));
    kinds[name] = selective::ScoreKindName(ScoreKindFor(models[m]));

    const auto& ts = test_sets.back();
    report::NominalRow row;
    row.method = name;
    std::vector<double> correct;
    for (const auto& p : ts.preds) correct.push_back(*p.correct ? 1.0 : 0.0);
    row.accuracy = Mean(correct);
    if (c.task.task == tasks::TaskKind::kExtractive) {
      row.exact_match = row.accuracy;
      row.f1 = Mean(ts.f1);
    }
    if (c.task.task == tasks::TaskKind::kGenerative) {
      row.token_accuracy = Mean(ts.token_accuracy);
    }
    nominal.push_back(row);
  }
  nn::WriteFileAtomic(dir / "nominal.csv",
                      report::WriteCsv(report::NominalTable(nominal)));
  if (c.task.task == tasks::TaskKind::kGenerative) {
    GenerationLoop(ctx, dir, models, calib_sets, test_sets, test, calib_hash);
  }
  const nlohmann::json manifest = {{"config_hash", ctx.hash},
                                   {"calib_hash", calib_hash},
                                   {"test_hash", test_hash},
                                   {"score_kinds", kinds}};
  nn::WriteFileAtomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

void SweepStage(const Context& ctx, const fs::path& dir) {
  const auto& c = ctx.config;
  const nlohmann::json manifest = ReadJson(ctx.Need(Command::kEvaluate, "manifest.json"));
  selective::SweepOptions opts;
  opts.calib_hash = manifest.at("calib_hash").get<std::string>();
  opts.test_hash = manifest.at("test_hash").get<std::string>();
  opts.self_calibrate = ctx.options.self_calibrate;

  report::EvalReport rep;
  rep.task = std::string(tasks::TaskName(c.task.task));
  rep.seeds = {c.seed};
  rep.config_hash = ctx.hash;
  std::vector<selective::MethodPredictions> preds;
  std::vector<report::MethodCurve> curves;
  for (auto m : c.methods) {
    const std::string name = MethodFile(m);
    selective::MethodPredictions mp;
    mp.method = name;
    const auto kind = selective::ParseScoreKind(
        manifest.at("score_kinds").at(name).get<std::string>());
    if (!kind) throw ValidationError("unknown score kind for " + name);
    mp.score = *kind;
    mp.calib = selective::PredictionsFromJsonl(
        nn::ReadFile(ctx.Need(Command::kEvaluate, name + ".calib.jsonl")));
    mp.test = selective::PredictionsFromJsonl(
        nn::ReadFile(ctx.Need(Command::kEvaluate, name + ".test.jsonl")));
    curves.push_back({name, selective::ComputeRiskCoverage(mp.test, mp.score)});
    rep.methods.push_back(name);
    preds.push_back(std::move(mp));
  }
  rep.sweep = selective::Sweep(preds, c.grid, opts);
  rep.nominal = report::ParseNominalTable(
      report::ReadCsv(nn::ReadFile(ctx.Need(Command::kEvaluate, "nominal.csv"))));
  report::EmitOutputs(rep, curves, dir);
}

void Bench(const Context& ctx, const fs::path& dir) {
  const auto& c = ctx.config;
  if (c.methods.front() != uq::MethodKind::kBaseline) {
    throw ValidationError("bench needs baseline as the first method");
  }
  const tasks::Dataset test = tasks::ReadDataset(ctx.Need(Command::kGenData, "test.jsonl"));
  auto models = LoadModels(ctx);
  const nlohmann::json timing = ReadJson(ctx.Need(Command::kTrain, "timing.json"));
  for (std::size_t m = 0; m < models.size(); ++m) {
    models[m].conversion_seconds =
        timing.value(MethodFile(c.methods[m]), 0.0);
  }
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < c.bench.batch; ++i) idx.push_back(i % test.size());
  const nn::Tensor batch = tasks::FeaturizeAll(test.Subset(idx));
  std::vector<report::NamedModel> named;
  for (std::size_t m = 0; m < models.size(); ++m) {
    named.push_back({MethodFile(c.methods[m]), &models[m]});
  }
  report::BenchOptions bo;
  bo.repetitions = c.bench.repetitions;
  bo.warmups = c.bench.warmups;
  bo.seed = c.seed;
  const auto rows = report::EfficiencyBench(named, batch, bo);
  nn::WriteFileAtomic(dir / "efficiency.csv",
                      report::WriteCsv(report::EfficiencyTable(rows)));
}

void Trace(const Context& ctx, const fs::path& dir) {
  const auto& c = ctx.config;
  if (c.task.task != tasks::TaskKind::kGenerative) {
    throw ValidationError("trace needs the generative task (task.task = "
                          "\"generative\")");
  }
  const tasks::Dataset test = tasks::ReadDataset(ctx.Need(Command::kGenData, "test.jsonl"));
  const auto models = LoadModels(ctx);
  const std::size_t steps = c.trace.steps > 0 ? c.trace.steps : c.task.target_len;
  const nn::RngStream rng(c.seed, nn::Tag("trace"));
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::string jsonl;
    for (std::size_t i = 0; i < std::min(c.trace.prompts, test.size()); ++i) {
      const auto& ex = test.generative[i];
      const auto records = report::TokenTrace(models[m], c.task, ex.prompt, steps,
                                              c.trace.k, rng.Split(ex.id), ex.id);
      for (const auto& r : records) {
        nlohmann::json j = report::ToJson(r);
        j["id"] = ex.id;
        jsonl += j.dump() + "\n";
      }
    }
    nn::WriteFileAtomic(dir / (MethodFile(c.methods[m]) + ".trace.jsonl"), jsonl);
  }
}

}  // namespace

void RunCommand(Command command, const RunConfig& config,
                const RunOptions& options) {
  Context ctx{config, options, RunDir(config, options), ConfigHash(config)};
  fs::create_directories(ctx.run);
  nn::WriteFileAtomic(ctx.run / "config.json", ConfigToJson(config).dump(2) + "\n");
  auto stage = [&](Command c, void (*fn)(const Context&, const fs::path&)) {
    RunStage(ctx, c, [&](const fs::path& dir) { fn(ctx, dir); });
  };
  switch (command) {
    case Command::kGenData: stage(command, GenData); break;
    case Command::kTrain: stage(command, Train); break;
    case Command::kEvaluate: stage(command, Evaluate); break;
    case Command::kSweep: stage(command, SweepStage); break;
    case Command::kBench: stage(command, Bench); break;
    case Command::kTrace: stage(command, Trace); break;
    case Command::kAll:
      stage(Command::kGenData, GenData);
      stage(Command::kTrain, Train);
      stage(Command::kEvaluate, Evaluate);
      stage(Command::kSweep, SweepStage);
      stage(Command::kBench, Bench);
      if (config.task.task == tasks::TaskKind::kGenerative) {
        stage(Command::kTrace, Trace);
      } else {
        ctx.log() << "trace: skipped (needs the generative task)\n";
      }
      break;
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"Selective question answering with uncertainty-aware models"};
  std::string command;
  std::string config_path;
  RunOptions options;
  std::string out;
  app.add_option("command", command,
                 "gen-data | train | evaluate | sweep | bench | trace | all")
      ->required();
  app.add_option("--config", config_path, "JSON run config (default: built-in)");
  app.add_option("--out", out, "Output root (overrides config out_dir)");
  app.add_option("--workers", options.workers, "Worker threads for scoring")
      ->check(CLI::PositiveNumber);
  app.add_flag("--force", options.force, "Replace completed stage outputs");
  app.add_flag("--self-calibrate", options.self_calibrate,
               "Fit sweep thresholds on the evaluated split itself");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  options.out = out;
  try {
    const auto cmd = ParseCommand(command);
    if (!cmd) throw ValidationError("unknown command '" + command + "'");
    RunConfig config = config_path.empty() ? ConfigFromJson(nlohmann::json::object())
                                           : LoadConfig(config_path);
    if (const char* env = std::getenv("SELQA_SEED")) {
      char* end = nullptr;
      const unsigned long long seed = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0') {
        throw ValidationError(std::string("SELQA_SEED is not an integer: ") + env);
      }
      std::cerr << "SELQA_SEED=" << seed << " overrides config seed "
                << config.seed << "\n";
      config.seed = seed;
      config.task.seed = seed;
    }
    RunCommand(*cmd, config, options);
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace selqa::cli
