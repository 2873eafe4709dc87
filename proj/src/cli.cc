// Copyright 2026 The usersim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usersim/cli.h"

#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "usersim/error.h"
#include "usersim/hash.h"
#include "usersim/report.h"
#include "usersim/tasks.h"

#ifndef USERSIM_TEMPLATE_DIR
#define USERSIM_TEMPLATE_DIR "templates"
#endif

namespace usersim {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path CasesPath(const fs::path& data_dir, Dataset ds) {
  return data_dir / (std::string(DatasetName(ds)) + ".cases.jsonl");
}

fs::path CatalogPath(const fs::path& data_dir, Dataset ds) {
  return data_dir / (std::string(DatasetName(ds)) + ".catalog.json");
}

fs::path RatingsPath(const fs::path& data_dir) { return data_dir / "movielens.ratings.json"; }

namespace {

std::ifstream OpenInput(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("input not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read input: " + path.string());
  return in;
}

void WriteJson(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

json Ingest(const IngestRequest& request) {
  if (request.inputs.empty()) throw ConfigError("ingest needs an input path");
  fs::create_directories(request.out_dir);
  const Dataset ds = request.dataset;
  const std::string name(DatasetName(ds));

  if (ds == Dataset::kMovieLens) {
    fs::path movies, ratings;
    if (request.inputs.size() == 1 && fs::is_directory(request.inputs[0])) {
      movies = request.inputs[0] / "movies.csv";
      ratings = request.inputs[0] / "ratings.csv";
    } else if (request.inputs.size() == 2) {
      movies = request.inputs[0];
      ratings = request.inputs[1];
    } else {
      throw ConfigError("movielens ingest takes movies.csv and ratings.csv, or their directory: " +
                        request.inputs[0].string());
    }
    auto movies_in = OpenInput(movies);
    auto ratings_in = OpenInput(ratings);
    MovieLensOptions options;
    options.like_threshold = request.like_threshold;
    auto result = IngestMovieLens(movies_in, ratings_in, options);
    WriteJson(RatingsPath(request.out_dir), result.stats.ToJson());
    WriteJson(CatalogPath(request.out_dir, ds), result.catalog.ToJson());
    json counters = result.counters.ToJson();
    counters["movies"] = result.stats.per_movie.size();
    WriteJson(request.out_dir / (name + ".ingest.json"), counters);
    return counters;
  }

  if (request.inputs.size() != 1) throw ConfigError(name + " ingest takes one input file");
  auto in = OpenInput(request.inputs[0]);
  IngestResult result;
  switch (ds) {
    case Dataset::kRedial:
      result = IngestRedial(in);
      break;
    case Dataset::kReddit: {
      RedditOptions options;
      options.seed = request.seed;
      result = IngestReddit(in, options);
      break;
    }
    case Dataset::kImdb:
      result = IngestImdb(in);
      break;
    case Dataset::kMovieLens:
      break;
  }
  WriteCases(CasesPath(request.out_dir, ds), result.cases);
  WriteJson(CatalogPath(request.out_dir, ds), result.catalog.ToJson());
  json counters = result.counters.ToJson();
  counters["cases"] = result.cases.size();
  WriteJson(request.out_dir / (name + ".ingest.json"), counters);
  return counters;
}

const std::vector<Baseline>& TaskBaselines(Task task) {
  static const std::vector<Baseline> kT1 = {Baseline::kDI, Baseline::kIH};
  static const std::vector<Baseline> kPersona = {Baseline::kDI, Baseline::kDIPP};
  static const std::vector<Baseline> kVanilla = {Baseline::kVanilla};
  switch (task) {
    case Task::kT1: return kT1;
    case Task::kT2:
    case Task::kT3: return kPersona;
    case Task::kT4:
    case Task::kT5: return kVanilla;
  }
  return kVanilla;
}

namespace {

// Everything a run reads, loaded once.
class RunInputs {
 public:
  explicit RunInputs(fs::path data_dir) : data_dir_(std::move(data_dir)) {
    if (!fs::is_directory(data_dir_)) {
      throw ConfigError("data directory not found: " + data_dir_.string());
    }
  }

  bool Has(Dataset ds) const {
    return ds == Dataset::kMovieLens ? fs::exists(RatingsPath(data_dir_))
                                     : fs::exists(CasesPath(data_dir_, ds));
  }

  const std::vector<SourceCase>& Cases(Dataset ds) {
    auto it = cases_.find(ds);
    if (it != cases_.end()) return it->second;
    const fs::path p = CasesPath(data_dir_, ds);
    if (!fs::exists(p)) {
      throw ConfigError("no ingested " + std::string(DatasetName(ds)) + " cases: " + p.string());
    }
    Record(p);
    return cases_.emplace(ds, ReadCases(p)).first->second;
  }

  const RatingStats& Ratings() {
    if (!ratings_) {
      const fs::path p = RatingsPath(data_dir_);
      if (!fs::exists(p)) throw ConfigError("no ingested movielens ratings: " + p.string());
      Record(p);
      ratings_ = RatingStats::FromJson(ReadJson(p));
    }
    return *ratings_;
  }

  // Union of every ingested catalog.
  const ItemCatalog& Catalog() {
    if (!catalog_) {
      catalog_.emplace();
      for (Dataset ds : {Dataset::kRedial, Dataset::kReddit, Dataset::kImdb, Dataset::kMovieLens}) {
        const fs::path p = CatalogPath(data_dir_, ds);
        if (!fs::exists(p)) continue;
        Record(p);
        catalog_->Merge(ItemCatalog::FromJson(ReadJson(p)));
      }
    }
    return *catalog_;
  }

  void Record(const fs::path& p) { inputs_[p.filename().string()] = Sha256File(p); }
  const std::map<std::string, std::string>& inputs() const { return inputs_; }

 private:
  fs::path data_dir_;
  std::map<Dataset, std::vector<SourceCase>> cases_;
  std::optional<RatingStats> ratings_;
  std::optional<ItemCatalog> catalog_;
  std::map<std::string, std::string> inputs_;
};

std::vector<GroupSpec> GroupsFromConfig(const json& config) {
  if (!config.contains("groups")) return DefaultGroupSpecs(false);
  std::vector<GroupSpec> out;
  try {
    for (const auto& g : config.at("groups")) {
      GroupSpec s;
      s.name = g.at("name").get<std::string>();
      s.min_count = g.value("min_count", int64_t{1});
      if (g.contains("max_count")) s.max_count = g["max_count"].get<int64_t>();
      s.sample_size = g.at("sample_size").get<size_t>();
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("groups: ") + e.what());
  }
  return out;
}

TaskOptions OptionsFromConfig(const json& config, const RunRequest& request) {
  TaskOptions o;
  o.seed = request.seed;
  o.with_explanations = request.explanations;
  o.with_reasons = request.reasons;
  if (config.contains("options")) {
    const json& j = config["options"];
    try {
      o.abort_failure_rate = j.value("abort_failure_rate", o.abort_failure_rate);
      o.keep_unmatched = j.value("keep_unmatched", o.keep_unmatched);
      o.fuzzy_threshold = j.value("fuzzy_threshold", o.fuzzy_threshold);
      o.n_simulators = j.value("n_simulators", o.n_simulators);
      o.num_bins = j.value("num_bins", o.num_bins);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("options: ") + e.what());
    }
  }
  if (o.n_simulators < 1) throw ConfigError("options.n_simulators must be >= 1");
  if (o.num_bins < 1) throw ConfigError("options.num_bins must be >= 1");
  if (o.fuzzy_threshold < 0 || o.fuzzy_threshold >= 1) {
    throw ConfigError("options.fuzzy_threshold must be in [0, 1)");
  }
  return o;
}

}  // namespace

void ExecuteRun(const RunRequest& request, Backend* backend_override) {
  if (request.tasks.empty()) throw ConfigError("no task selected");
  if (!fs::is_regular_file(request.config_path)) {
    throw ConfigError("config not found: " + request.config_path.string());
  }
  const fs::path base = request.config_path.parent_path();
  const json config = ReadJson(request.config_path);
  if (!config.is_object()) throw ConfigError("config must be a JSON object");

  BackendConfig backend_config = BackendConfig::FromJson(config.value("backend", json::object()), base);
  if (backend_override == nullptr) backend_config.Validate();
  const TaskOptions options = OptionsFromConfig(config, request);

  const fs::path template_dir = config.contains("templates")
                                    ? Resolve(base, config["templates"].get<std::string>())
                                    : fs::path(USERSIM_TEMPLATE_DIR);
  const TemplateSet templates = TemplateSet::Load(template_dir);
  const PromptRenderer renderer(templates);

  // Check every requested task's inputs before any request is sent.
  RunInputs inputs(request.data_dir);
  std::optional<SurnameTable> surnames;
  bool needs_surnames = false;
  for (Task t : request.tasks) {
    for (Baseline b : TaskBaselines(t)) {
      if (request.baseline && *request.baseline != b) continue;
      needs_surnames |= (b == Baseline::kDI || b == Baseline::kDIPP);
    }
    if (request.baseline &&
        std::find(TaskBaselines(t).begin(), TaskBaselines(t).end(), *request.baseline) ==
            TaskBaselines(t).end()) {
      throw ConfigError("baseline " + std::string(BaselineName(*request.baseline)) +
                        " does not apply to " + std::string(TaskName(t)));
    }
  }
  if (needs_surnames) {
    if (!config.contains("surnames")) throw ConfigError("config has no surnames table");
    const fs::path p = Resolve(base, config["surnames"].get<std::string>());
    surnames = SurnameTable::Load(p);
    inputs.Record(p);
  }
  std::optional<EmbeddingProviders> embeddings;
  auto has_task = [&](Task t) {
    return std::find(request.tasks.begin(), request.tasks.end(), t) != request.tasks.end();
  };
  if (has_task(Task::kT4)) {
    if (!config.contains("embeddings")) throw ConfigError("config has no embeddings section");
    embeddings = MakeEmbeddingProviders(config["embeddings"], base);
    if (!embeddings->word || !embeddings->sentence) {
      throw ConfigError("embeddings need both word and sentence providers");
    }
  }

  std::unique_ptr<Backend> owned;
  Backend* backend = backend_override;
  if (backend == nullptr) {
    owned = MakeBackend(backend_config);
    backend = owned.get();
  }
  Gateway gateway(*backend, backend_config);

  std::unique_ptr<AspectExtractor> extractor;
  if (has_task(Task::kT3)) {
    if (!config.contains("absa")) throw ConfigError("config has no absa section");
    extractor = MakeExtractor(config["absa"], base, &gateway, &templates);
  }

  if (fs::exists(request.out_dir) && !fs::is_empty(request.out_dir)) {
    if (!request.force) {
      throw ConfigError("output directory is not empty: " + request.out_dir.string());
    }
    if (!fs::exists(request.out_dir / "manifest.json")) {
      throw ConfigError("refusing to replace a directory that is not a run: " +
                        request.out_dir.string());
    }
    fs::remove_all(request.out_dir);
  }

  TaskContext ctx{renderer, gateway, surnames ? &*surnames : nullptr, options};
  std::vector<TaskRun> runs;
  json manifest_tasks = json::array();
  for (Task task : request.tasks) {
    manifest_tasks.push_back(TaskName(task));
    for (Baseline b : TaskBaselines(task)) {
      if (request.baseline && *request.baseline != b) continue;
      const std::string label = fmt::format("{}/{}", TaskName(task), BaselineName(b));
      switch (task) {
        case Task::kT1:
          for (Dataset ds : {Dataset::kImdb, Dataset::kReddit, Dataset::kRedial}) {
            if (request.dataset ? *request.dataset != ds : !inputs.Has(ds)) continue;
            spdlog::info("{}/{}: running", label, DatasetName(ds));
            runs.push_back(RunT1(inputs.Cases(ds), inputs.Catalog(), b, ctx));
          }
          break;
        case Task::kT2: {
          spdlog::info("{}: running", label);
          const auto& stats = inputs.Ratings();
          const auto groups = SampleMovieGroups(stats, GroupsFromConfig(config), request.seed);
          runs.push_back(RunT2(stats, groups, b, ctx));
          break;
        }
        case Task::kT3:
          spdlog::info("{}: running", label);
          runs.push_back(RunT3(inputs.Cases(Dataset::kImdb), b, *extractor, ctx));
          break;
        case Task::kT4:
          spdlog::info("{}: running", label);
          runs.push_back(RunT4(inputs.Cases(Dataset::kReddit), *embeddings->word,
                               *embeddings->sentence, ctx));
          break;
        case Task::kT5:
          spdlog::info("{}: running", label);
          runs.push_back(RunT5(inputs.Cases(Dataset::kReddit), ctx));
          break;
      }
      if (!runs.empty()) {
        const auto& c = runs.back().report.counts;
        spdlog::info("{}: {} cases, {} failures, {} invalid", label, c.cases, c.failures,
                     c.invalid);
      }
    }
  }
  if (runs.empty()) throw ConfigError("nothing to run: no ingested data for the selected tasks");

  json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["tasks"] = manifest_tasks;
  manifest["baseline"] = request.baseline ? json(BaselineName(*request.baseline)) : json("all");
  manifest["seed"] = request.seed;
  manifest["options"] = options.ToJson();
  manifest["backend"] = backend_config.ToJson();
  manifest["backend"]["model"] = backend->model();
  manifest["config_sha256"] = Sha256File(request.config_path);
  manifest["templates"] = templates.Hashes();
  manifest["inputs"] = inputs.inputs();
  if (embeddings) manifest["embeddings"] = embeddings->description;
  if (extractor) manifest["absa"] = extractor->id();
  WriteRunDirectory(request.out_dir, runs, manifest);
}

// ---------------------------------------------------------------------------
// Command line

namespace {

int RunIngest(const std::string& dataset, const std::vector<std::string>& paths,
              const std::string& out, uint64_t seed, double like_threshold) {
  auto ds = ParseDataset(dataset);
  if (!ds) throw ConfigError("unknown dataset '" + dataset + "'");
  IngestRequest r;
  r.dataset = *ds;
  for (const auto& p : paths) r.inputs.emplace_back(p);
  r.out_dir = out;
  r.seed = seed;
  r.like_threshold = like_threshold;
  std::cout << Ingest(r).dump(2) << "\n";
  return 0;
}

int RunReport(const std::string& dir) {
  const auto reports = LoadReports(dir);
  RenderReports(reports, dir);
  for (const auto& t : BuildTables(reports)) std::cout << t.ToText() << "\n";
  return 0;
}

int RunVerify(const std::string& dir) {
  const auto result = VerifyRunDirectory(dir);
  for (const auto& p : result.problems) std::cerr << p << "\n";
  std::cout << (result.ok ? "ok" : "FAILED") << "\n";
  return result.ok ? 0 : 1;
}

}  // namespace

int RunCli(const std::vector<std::string>& args) {
  CLI::App app{"Evaluation harness for LLM-based user simulators", "usersim"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  auto* ingest = app.add_subcommand("ingest", "Convert a raw dataset into cases");
  std::string dataset;
  std::vector<std::string> paths;
  std::string ingest_out = "data";
  uint64_t ingest_seed = 0;
  double like_threshold = 3.5;
  ingest->add_option("dataset", dataset, "redial | reddit | movielens | imdb")->required();
  ingest->add_option("path", paths, "Raw input file(s)")->required();
  ingest->add_option("-o,--out", ingest_out, "Data directory")->capture_default_str();
  ingest->add_option("--seed", ingest_seed, "Seed for head-comment selection");
  ingest->add_option("--like-threshold", like_threshold, "MovieLens like threshold");

  auto* run = app.add_subcommand("run", "Run tasks against a simulator backend");
  std::string task, baseline, config, data_dir = "data", out_dir, scope;
  uint64_t seed = 0;
  bool explanations = false, reasons = false, force = false;
  run->add_option("--task", task, "t1..t5 or all")
      ->required()
      ->check(CLI::IsMember({"t1", "t2", "t3", "t4", "t5", "all"}));
  run->add_option("--baseline", baseline, "vanilla | di | di-pp | ih")
      ->check(CLI::IsMember({"vanilla", "di", "di-pp", "ih"}));
  run->add_option("--backend", config, "Run configuration (JSON)")->required();
  run->add_option("--seed", seed, "Run seed");
  run->add_flag("--explanations", explanations, "T5: also show full recommendation text");
  run->add_flag("--reasons", reasons, "T5: ask the simulator for a reason");
  run->add_option("--data", data_dir, "Data directory from ingest")->capture_default_str();
  run->add_option("--out", out_dir, "Run directory")->required();
  run->add_option("--dataset", scope, "T1: restrict to one dataset")
      ->check(CLI::IsMember({"redial", "reddit", "imdb"}));
  run->add_flag("--force", force, "Replace an existing run directory");

  auto* report = app.add_subcommand("report", "Render tables and charts for a run");
  std::string report_dir;
  report->add_option("run-dir", report_dir)->required();

  auto* verify = app.add_subcommand("verify", "Re-check manifest hashes of a run");
  std::string verify_dir;
  verify->add_option("run-dir", verify_dir)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);
  try {
    if (*ingest) return RunIngest(dataset, paths, ingest_out, ingest_seed, like_threshold);
    if (*report) return RunReport(report_dir);
    if (*verify) return RunVerify(verify_dir);
    RunRequest r;
    if (task == "all") {
      r.tasks = {Task::kT1, Task::kT2, Task::kT3, Task::kT4, Task::kT5};
    } else {
      r.tasks = {*ParseTask(task)};
    }
    if (!baseline.empty()) r.baseline = ParseBaseline(baseline);
    if (!scope.empty()) r.dataset = ParseDataset(scope);
    r.seed = seed;
    r.explanations = explanations;
    r.reasons = reasons;
    r.config_path = config;
    r.data_dir = data_dir;
    r.out_dir = out_dir;
    r.force = force;
    ExecuteRun(r);
    std::cout << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int RunCli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCli(args);
}

}  // namespace usersim
