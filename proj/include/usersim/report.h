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

#ifndef USERSIM_REPORT_H_
#define USERSIM_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "usersim/tasks.h"

namespace usersim {

struct Table {
  std::string name;   // file stem
  std::string title;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;

  std::string ToCsv() const;
  std::string ToText() const;  // aligned columns
};

// Reals use fixed 4 decimals; undefined values render as "Undefined".
std::string FormatCell(const nlohmann::json& value);

// Tables for whatever tasks the reports cover. Tasks without reports are
// omitted and listed in the notes of the run summary table.
std::vector<Table> BuildTables(const std::vector<nlohmann::json>& reports);

struct Chart {
  std::string name;  // file stem
  std::string svg;
  std::string csv;   // underlying series
};

std::vector<Chart> BuildCharts(const std::vector<nlohmann::json>& reports);

// Writes tables/*.csv, tables/*.txt, charts/*.svg and charts/*.csv under
// `run_dir`. Returns the written paths relative to `run_dir`.
std::vector<std::string> RenderReports(const std::vector<nlohmann::json>& reports,
                                       const std::filesystem::path& run_dir);

// reports/*.json in name order. Throws DataError when there are none.
std::vector<nlohmann::json> LoadReports(const std::filesystem::path& run_dir);

// Writes a complete run directory:
//   manifest.json, cases/<name>.jsonl, replies/<name>.jsonl,
//   reports/<name>.json, tables/*, charts/*.
// `manifest` carries the run parameters; file hashes are added here.
void WriteRunDirectory(const std::filesystem::path& run_dir, const std::vector<TaskRun>& runs,
                       nlohmann::json manifest);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> problems;
};

// Re-hashes every file listed in the manifest and reports unlisted files.
VerifyResult VerifyRunDirectory(const std::filesystem::path& run_dir);

}  // namespace usersim

#endif  // USERSIM_REPORT_H_
