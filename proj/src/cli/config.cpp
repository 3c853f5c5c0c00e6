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

#include "selqa/cli/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "selqa/nn/checkpoint.hpp"
#include "selqa/nn/error.hpp"
#include "selqa/selective/sweep.hpp"
#include "selqa/tasks/featurize.hpp"

namespace selqa::cli {

RunConfig::RunConfig() : grid(selective::DefaultGrid()) {}

uq::UqMethod RunConfig::Method(uq::MethodKind kind) const {
  return {kind, uq.samples, uq.members, uq.rate};
}

nn::ModelSpec RunConfig::BaseSpec() const {
  return nn::ModelSpec::Mlp(tasks::FeatureDim(task), model.hidden,
                            tasks::HeadDims(task), model.dropout);
}

nlohmann::json ConfigToJson(const RunConfig& c) {
  nlohmann::json task = c.task.ToJson();
  task.erase("seed");
  nlohmann::json methods = nlohmann::json::array();
  for (auto m : c.methods) methods.push_back(uq::MethodName(m));
  return {
      {"seed", c.seed},
      {"task", task},
      {"split", {{"train", c.split.train}, {"calib", c.split.calib},
                 {"test", c.split.test}}},
      {"model", {{"hidden", c.model.hidden}, {"dropout", c.model.dropout}}},
      {"methods", methods},
      {"uq", {{"samples", c.uq.samples}, {"members", c.uq.members},
              {"rate", c.uq.rate},
              {"aggregation", uq::AggregationName(c.uq.aggregation)}}},
      {"train", {{"epochs", c.train.epochs}, {"batch_size", c.train.batch_size},
                 {"learning_rate", c.train.learning_rate}}},
      {"grid", c.grid},
      {"bench", {{"repetitions", c.bench.repetitions},
                 {"warmups", c.bench.warmups}, {"batch", c.bench.batch}}},
      {"trace", {{"prompts", c.trace.prompts}, {"steps", c.trace.steps},
                 {"k", c.trace.k}}},
      {"generation", {{"max_tries", c.generation.max_tries},
                      {"percentile", c.generation.percentile},
                      {"reduce", selective::SequenceReduceName(c.generation.reduce)},
                      {"step_reduce", uq::ReduceModeName(c.generation.step_reduce)}}},
      {"out_dir", c.out_dir}};
}

namespace {

// Reads the keys of one JSON object, recording every problem.
class Section {
 public:
  Section(const nlohmann::json& j, std::string prefix,
          std::vector<std::string>& errors)
      : prefix_(std::move(prefix)), errors_(errors) {
    if (!j.is_object()) {
      errors_.push_back(Name("") + ": must be an object");
      return;
    }
    obj_ = &j;
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    seen_.insert(key);
    if (obj_ == nullptr || !obj_->contains(key)) return;
    const auto& v = obj_->at(key);
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) {
        errors_.push_back(Name(key) + ": expected a non-negative integer");
        return;
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) {
        errors_.push_back(Name(key) + ": expected a number");
        return;
      }
    }
    try {
      out = v.get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(Name(key) + ": wrong type");
    }
  }

  // Named enum value parsed with parse(); unknown names are reported.
  template <typename T, typename Parse>
  void GetEnum(const std::string& key, T& out, Parse parse) {
    std::string name;
    const std::size_t before = errors_.size();
    Get(key, name);
    if (errors_.size() != before || name.empty()) return;
    if (const auto v = parse(name)) {
      out = *v;
    } else {
      errors_.push_back(Name(key) + ": unknown value '" + name + "'");
    }
  }

  const nlohmann::json* Child(const std::string& key) {
    seen_.insert(key);
    if (obj_ == nullptr || !obj_->contains(key)) return nullptr;
    return &obj_->at(key);
  }

  void RejectUnknown() {
    if (obj_ == nullptr) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (!seen_.count(it.key())) {
        errors_.push_back(Name(it.key()) + ": unknown key");
      }
    }
  }

  std::string Name(const std::string& key) const {
    if (prefix_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? prefix_ : prefix_ + "." + key;
  }

 private:
  const nlohmann::json* obj_ = nullptr;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
};

void Require(bool ok, std::string msg, std::vector<std::string>& errors) {
  if (!ok) errors.push_back(std::move(msg));
}

void AppendLines(const std::string& prefix, const std::string& text,
                 std::vector<std::string>& errors) {
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto start = line.find_first_not_of(' ');
    if (start == std::string::npos) continue;
    line = line.substr(start);
    // Skip a bare "invalid ...:" heading when detail lines follow.
    if (first && !line.empty() && line.back() == ':' &&
        text.find('\n') != std::string::npos) {
      first = false;
      continue;
    }
    first = false;
    errors.push_back(prefix + line);
  }
}

}  // namespace

RunConfig ConfigFromJson(const nlohmann::json& j) {
  RunConfig c;
  std::vector<std::string> errors;
  Section root(j, "", errors);
  root.Get("seed", c.seed);
  root.Get("out_dir", c.out_dir);

  if (const auto* t = root.Child("task")) {
    if (t->is_object() && t->contains("seed")) {
      errors.push_back("task.seed: not allowed; set the top-level seed");
    } else {
      try {
        c.task = tasks::TaskSpec::FromJson(*t);
      } catch (const ValidationError& e) {
        AppendLines("task.", e.what(), errors);
      }
    }
  }
  if (const auto* s = root.Child("split")) {
    Section sec(*s, "split", errors);
    sec.Get("train", c.split.train);
    sec.Get("calib", c.split.calib);
    sec.Get("test", c.split.test);
    sec.RejectUnknown();
  }
  if (const auto* s = root.Child("model")) {
    Section sec(*s, "model", errors);
    sec.Get("hidden", c.model.hidden);
    sec.Get("dropout", c.model.dropout);
    sec.RejectUnknown();
  }
  if (const auto* s = root.Child("methods")) {
    if (!s->is_array()) {
      errors.push_back("methods: expected an array of method names");
    } else {
      c.methods.clear();
      for (const auto& v : *s) {
        const auto kind = v.is_string() ? uq::ParseMethodKind(v.get<std::string>())
                                        : std::nullopt;
        if (!kind) {
          errors.push_back("methods: unknown method " + v.dump() +
                           " (expected baseline, mve, mc_dropout, ensemble, "
                           "composed)");
        } else if (std::find(c.methods.begin(), c.methods.end(), *kind) !=
                   c.methods.end()) {
          errors.push_back("methods: duplicate method " + v.dump());
        } else {
          c.methods.push_back(*kind);
        }
      }
    }
  }
  if (const auto* s = root.Child("uq")) {
    Section sec(*s, "uq", errors);
    sec.Get("samples", c.uq.samples);
    sec.Get("members", c.uq.members);
    sec.Get("rate", c.uq.rate);
    sec.GetEnum("aggregation", c.uq.aggregation, uq::ParseAggregation);
    sec.RejectUnknown();
  }
  if (const auto* s = root.Child("train")) {
    Section sec(*s, "train", errors);
    sec.Get("epochs", c.train.epochs);
    sec.Get("batch_size", c.train.batch_size);
    sec.Get("learning_rate", c.train.learning_rate);
    sec.RejectUnknown();
  }
  if (const auto* s = root.Child("grid")) {
    try {
      c.grid = s->get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      errors.push_back("grid: expected an array of numbers");
    }
  }
  if (const auto* s = root.Child("bench")) {
    Section sec(*s, "bench", errors);
    sec.Get("repetitions", c.bench.repetitions);
    sec.Get("warmups", c.bench.warmups);
    sec.Get("batch", c.bench.batch);
    sec.RejectUnknown();
  }
  if (const auto* s = root.Child("trace")) {
    Section sec(*s, "trace", errors);
    sec.Get("prompts", c.trace.prompts);
    sec.Get("steps", c.trace.steps);
    sec.Get("k", c.trace.k);
    sec.RejectUnknown();
  }
  if (const auto* s = root.Child("generation")) {
    Section sec(*s, "generation", errors);
    sec.Get("max_tries", c.generation.max_tries);
    sec.Get("percentile", c.generation.percentile);
    sec.GetEnum("reduce", c.generation.reduce, selective::ParseSequenceReduce);
    sec.GetEnum("step_reduce", c.generation.step_reduce, uq::ParseReduceMode);
    sec.RejectUnknown();
  }
  root.RejectUnknown();

  // Constraints, checked on whatever parsed.
  c.task.seed = c.seed;
  try {
    c.task.Validate();
  } catch (const ValidationError& e) {
    AppendLines("task.", e.what(), errors);
  }
  const double total = c.split.train + c.split.calib + c.split.test;
  Require(c.split.train > 0 && c.split.calib > 0 && c.split.test > 0,
          "split: every ratio must be > 0", errors);
  Require(std::abs(total - 1.0) <= 1e-9, "split: ratios must sum to 1", errors);
  Require(!c.model.hidden.empty(), "model.hidden: need at least one layer",
          errors);
  Require(std::find(c.model.hidden.begin(), c.model.hidden.end(), 0u) ==
              c.model.hidden.end(),
          "model.hidden: widths must be >= 1", errors);
  Require(c.model.dropout >= 0.0 && c.model.dropout < 1.0,
          "model.dropout: must be in [0, 1)", errors);
  Require(!c.methods.empty(), "methods: need at least one method", errors);
  Require(c.uq.samples >= 2, "uq.samples: T must be >= 2", errors);
  Require(c.uq.members >= 1, "uq.members: N must be >= 1", errors);
  Require(c.uq.rate > 0.0 && c.uq.rate < 1.0, "uq.rate: must be in (0, 1)",
          errors);
  Require(c.train.epochs >= 1, "train.epochs: must be >= 1", errors);
  Require(c.train.batch_size >= 1, "train.batch_size: must be >= 1", errors);
  Require(c.train.learning_rate > 0.0, "train.learning_rate: must be > 0",
          errors);
  Require(!c.grid.empty(), "grid: need at least one percentile", errors);
  for (double p : c.grid) {
    Require(p >= 0.0 && p < 100.0,
            "grid: percentile " + std::to_string(p) + " outside [0, 100)",
            errors);
  }
  Require(c.bench.repetitions >= 5, "bench.repetitions: must be >= 5", errors);
  Require(c.bench.batch >= 1, "bench.batch: must be >= 1", errors);
  Require(c.trace.k >= 1 && c.trace.k <= std::max<std::size_t>(c.task.vocab_size, 1),
          "trace.k: must be in [1, vocab_size]", errors);
  Require(c.generation.max_tries >= 1, "generation.max_tries: must be >= 1",
          errors);
  Require(c.generation.percentile >= 0.0 && c.generation.percentile < 100.0,
          "generation.percentile: must be in [0, 100)", errors);
  Require(!c.out_dir.empty(), "out_dir: must not be empty", errors);

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return c;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("config file not found: " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(nn::ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " +
                          e.what());
  }
  return ConfigFromJson(j);
}

std::string ConfigHash(const RunConfig& config) {
  nlohmann::json j = ConfigToJson(config);
  j.erase("out_dir");
  return nn::HashHex(nn::Fnv1a64(j.dump()));
}

}  // namespace selqa::cli
