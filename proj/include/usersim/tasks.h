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

#ifndef USERSIM_TASKS_H_
#define USERSIM_TASKS_H_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "usersim/absa.h"
#include "usersim/corpus.h"
#include "usersim/embeddings.h"
#include "usersim/gateway.h"
#include "usersim/metrics.h"
#include "usersim/parsers.h"
#include "usersim/persona.h"

namespace usersim {

// Raised when more than the configured fraction of cases failed.
class TaskAbortedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskOptions {
  uint64_t seed = 0;
  double abort_failure_rate = 0.5;
  // T1
  bool keep_unmatched = true;
  double fuzzy_threshold = kDefaultFuzzyThreshold;
  // T2
  int n_simulators = 100;
  // T4
  int num_bins = 5;
  // T5: the items-only variant always runs; this adds the full-text one.
  bool with_explanations = false;
  bool with_reasons = false;

  nlohmann::json ToJson() const;
};

struct TaskCounts {
  int64_t source_cases = 0;  // inputs considered
  int64_t skipped = 0;       // inputs that produced no prompt
  int64_t cases = 0;         // prompts sent
  int64_t failures = 0;      // backend failures
  int64_t invalid = 0;       // replies that did not parse
  std::map<std::string, int64_t> skip_reasons;

  nlohmann::json ToJson() const;
};

struct TaskReport {
  Task task = Task::kT1;
  Baseline baseline = Baseline::kVanilla;
  std::string scope;  // dataset name, or "movielens" for T2
  nlohmann::json backend;
  nlohmann::json metrics;  // simulator side
  nlohmann::json human;    // human reference, same shape as metrics
  nlohmann::json series;   // chart data
  TaskCounts counts;
  std::vector<nlohmann::json> records;  // one per prompt

  // "<task>_<baseline>_<scope>"
  std::string Name() const;
  nlohmann::json ToJson() const;
};

struct TaskRun {
  std::vector<PromptCase> prompts;
  std::vector<SimulatorReply> replies;
  TaskReport report;
};

// Shared inputs for a run.
struct TaskContext {
  const PromptRenderer& renderer;
  Gateway& gateway;
  const SurnameTable* surnames = nullptr;  // required by DI / DI+PP
  TaskOptions options;
};

// ItemsTalk over one dataset (DI or IH).
TaskRun RunT1(const std::vector<SourceCase>& cases, const ItemCatalog& catalog,
              Baseline baseline, TaskContext& ctx);

// BinPref: n_simulators personas per sampled movie (DI or DI+PP).
TaskRun RunT2(const RatingStats& stats,
              const std::map<std::string, std::vector<std::string>>& groups,
              Baseline baseline, TaskContext& ctx);

// OpenPref on one sampled review per IMDB user (DI or DI+PP).
TaskRun RunT3(const std::vector<SourceCase>& cases, Baseline baseline,
              AspectExtractor& extractor, TaskContext& ctx);

// RecRequest, one synthetic request per Reddit request.
TaskRun RunT4(const std::vector<SourceCase>& cases, const WordEmbeddingProvider& words,
              SentenceEmbeddingProvider& sentences, TaskContext& ctx);

// Feedback: accept/reject (both polarities) and comparison per request.
TaskRun RunT5(const std::vector<SourceCase>& cases, TaskContext& ctx);

// Corpus diversity block used by T4 for both columns.
nlohmann::json CorpusDiversity(const std::vector<std::string>& texts,
                               const WordEmbeddingProvider& words,
                               SentenceEmbeddingProvider& sentences, int num_bins,
                               EmbeddingCache& cache);

// Human item distribution for T1 under a baseline: per eligible case, the
// mentioned items minus the items shown as history.
Distribution HumanItemDistribution(const std::vector<SourceCase>& cases, Baseline baseline,
                                   int64_t* eligible = nullptr);

// Responders that feed human data back as simulator output.
namespace null_responders {
// T1: the case's non-history human items, one "Title (yyyy)" per line.
ScriptedBackend::Responder ItemsTalk(const std::vector<SourceCase>& cases);
// T3: the review whose length the prompt targets.
ScriptedBackend::Responder OpenPreference(const std::vector<SourceCase>& cases);
// T4: the human request text.
ScriptedBackend::Responder RecRequest(const std::vector<SourceCase>& cases);
// T5: accepts positive, rejects negative, prefers the positive slot.
ScriptedBackend::Responder Feedback();
}  // namespace null_responders

}  // namespace usersim

#endif  // USERSIM_TASKS_H_
