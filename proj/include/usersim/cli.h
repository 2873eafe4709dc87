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

#ifndef USERSIM_CLI_H_
#define USERSIM_CLI_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "usersim/corpus.h"
#include "usersim/gateway.h"
#include "usersim/persona.h"

namespace usersim {

inline constexpr const char* kToolVersion = "0.3.0";

// Files written by `ingest` into a data directory.
std::filesystem::path CasesPath(const std::filesystem::path& data_dir, Dataset ds);
std::filesystem::path CatalogPath(const std::filesystem::path& data_dir, Dataset ds);
std::filesystem::path RatingsPath(const std::filesystem::path& data_dir);

struct IngestRequest {
  Dataset dataset = Dataset::kRedial;
  // One raw file; MovieLens takes movies.csv and ratings.csv, or their
  // directory.
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out_dir;
  uint64_t seed = 0;
  double like_threshold = 3.5;
};

// Returns the ingest counters.
nlohmann::json Ingest(const IngestRequest& request);

struct RunRequest {
  std::vector<Task> tasks;
  std::optional<Baseline> baseline;  // unset: every baseline of each task
  std::optional<Dataset> dataset;    // T1 scope; unset: every ingested dataset
  uint64_t seed = 0;
  bool explanations = false;
  bool reasons = false;
  std::filesystem::path config_path;
  std::filesystem::path data_dir;
  std::filesystem::path out_dir;
  bool force = false;  // replace an existing run directory
};

// Baselines a task accepts; the first one is listed first in run order.
const std::vector<Baseline>& TaskBaselines(Task task);

// Executes the run and writes the run directory. `backend` replaces the
// configured backend when non-null (the config still supplies gateway
// settings). Throws ConfigError / DataError / TaskAbortedError.
void ExecuteRun(const RunRequest& request, Backend* backend = nullptr);

// Command-line entry point; `args` excludes the program name.
int RunCli(const std::vector<std::string>& args);
int RunCli(int argc, char** argv);

}  // namespace usersim

#endif  // USERSIM_CLI_H_
