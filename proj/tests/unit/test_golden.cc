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

#include <gtest/gtest.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <set>

#include "test_util.h"
#include "usersim/cli.h"
#include "usersim/report.h"

// Full five-task run over the bundled replay fixture. Set
// USERSIM_UPDATE_GOLDEN=1 to rewrite tests/golden from the current output.

namespace usersim {
namespace {

namespace fs = std::filesystem;

void IngestSampleData(const fs::path& data) {
  const fs::path raw = testing::SampleDir() / "raw";
  for (Dataset ds : {Dataset::kRedial, Dataset::kReddit, Dataset::kImdb}) {
    Ingest({ds, {raw / (std::string(DatasetName(ds)) + ".jsonl")}, data, 0, 3.5});
  }
  Ingest({Dataset::kMovieLens, {raw / "movielens"}, data, 0, 3.5});
}

void FullRun(const fs::path& data, const fs::path& out) {
  RunRequest r;
  r.tasks = {Task::kT1, Task::kT2, Task::kT3, Task::kT4, Task::kT5};
  r.explanations = true;
  r.reasons = true;
  r.config_path = testing::SampleDir() / "config.json";
  r.data_dir = data;
  r.out_dir = out;
  ExecuteRun(r);
}

bool IsGoldenFile(const std::string& rel) {
  return rel.starts_with("tables/") || (rel.starts_with("charts/") && rel.ends_with(".csv"));
}

class Golden : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    spdlog::set_level(spdlog::level::warn);
    tmp_ = new testing::TempDir();
    IngestSampleData(*tmp_ / "data");
    FullRun(*tmp_ / "data", *tmp_ / "a");
    FullRun(*tmp_ / "data", *tmp_ / "b");
  }
  static void TearDownTestSuite() {
    delete tmp_;
    tmp_ = nullptr;
  }
  static testing::TempDir* tmp_;
};

testing::TempDir* Golden::tmp_ = nullptr;

TEST_F(Golden, TwoRunsAreByteIdentical) {
  const auto a = testing::ListTree(*tmp_ / "a");
  const auto b = testing::ListTree(*tmp_ / "b");
  ASSERT_EQ(a, b);
  EXPECT_GT(a.size(), 30u);
  for (const auto& rel : a) {
    EXPECT_EQ(testing::ReadText(*tmp_ / "a" / rel), testing::ReadText(*tmp_ / "b" / rel)) << rel;
  }
}

TEST_F(Golden, EveryTaskRanWithoutReplayMisses) {
  const auto reports = LoadReports(*tmp_ / "a");
  std::set<std::string> tasks;
  for (const auto& r : reports) {
    tasks.insert(r["task"].get<std::string>());
    EXPECT_EQ(r["counts"]["failures"], 0) << r["task"] << "/" << r["baseline"];
  }
  EXPECT_EQ(tasks, (std::set<std::string>{"t1", "t2", "t3", "t4", "t5"}));
  EXPECT_TRUE(VerifyRunDirectory(*tmp_ / "a").ok);
}

TEST_F(Golden, MatchesCommittedTablesAndCharts) {
  const fs::path golden = testing::SourceDir() / "tests" / "golden";
  std::vector<std::string> produced;
  for (const auto& rel : testing::ListTree(*tmp_ / "a")) {
    if (IsGoldenFile(rel)) produced.push_back(rel);
  }
  const char* update = std::getenv("USERSIM_UPDATE_GOLDEN");
  if (update != nullptr && std::string(update) == "1") {
    fs::remove_all(golden);
    for (const auto& rel : produced) {
      testing::WriteText(golden / rel, testing::ReadText(*tmp_ / "a" / rel));
    }
    GTEST_SKIP() << "golden files rewritten";
  }
  ASSERT_TRUE(fs::is_directory(golden));
  EXPECT_EQ(testing::ListTree(golden), produced);
  for (const auto& rel : produced) {
    if (!fs::exists(golden / rel)) continue;
    EXPECT_EQ(testing::ReadText(*tmp_ / "a" / rel), testing::ReadText(golden / rel)) << rel;
  }
}

}  // namespace
}  // namespace usersim
