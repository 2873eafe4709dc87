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

#include <fstream>

#include "test_util.h"
#include "usersim/error.h"
#include "usersim/report.h"

namespace usersim {
namespace {

using nlohmann::json;

std::vector<SourceCase> RedditSample() {
  std::ifstream in(testing::SampleDir() / "raw" / "reddit.jsonl");
  return IngestReddit(in, {}).cases;
}

TaskRun T5Run() {
  static const TemplateSet templates = TemplateSet::Load(testing::SourceDir() / "templates");
  PromptRenderer renderer(templates);
  ScriptedBackend backend(null_responders::Feedback(), "null-model");
  Gateway gateway(backend, BackendConfig{});
  TaskContext ctx{renderer, gateway, nullptr, TaskOptions{}};
  return RunT5(RedditSample(), ctx);
}

const Table* Find(const std::vector<Table>& tables, const std::string& name) {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

TEST(FormatCell, Kinds) {
  EXPECT_EQ(FormatCell(json(3)), "3");
  EXPECT_EQ(FormatCell(json(0.123456)), "0.1235");
  EXPECT_EQ(FormatCell(json{{"undefined", "zero variance"}}), "Undefined");
  EXPECT_EQ(FormatCell(json("x")), "x");
  EXPECT_EQ(FormatCell(json()), "");
}

TEST(Table, CsvEscapingAndText) {
  Table t{"n", "Title", {"a", "b"}, {{"x,y", "say \"hi\""}, {"1", "2"}}, {"a note"}};
  EXPECT_EQ(t.ToCsv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n1,2\n");
  const std::string text = t.ToText();
  EXPECT_NE(text.find("Title\n"), std::string::npos);
  EXPECT_NE(text.find("note: a note"), std::string::npos);
}

TEST(BuildTables, SingleReportListsMissingTasks) {
  const json report = T5Run().report.ToJson();
  const auto tables = BuildTables({report});
  ASSERT_EQ(tables.size(), 2u);
  const Table* coherence = Find(tables, "feedback_coherence");
  ASSERT_NE(coherence, nullptr);
  EXPECT_NE(coherence->ToCsv().find("1.0000"), std::string::npos);
  EXPECT_EQ(Find(tables, "items_entropy"), nullptr);
  const Table* summary = Find(tables, "run_summary");
  ASSERT_NE(summary, nullptr);
  EXPECT_EQ(summary->notes,
            (std::vector<std::string>{"t1: no report in this run", "t2: no report in this run",
                                      "t3: no report in this run", "t4: no report in this run"}));
  EXPECT_EQ(summary->rows.size(), 1u);
}

json ItemsReport(const std::vector<int>& human, const std::vector<int>& sim) {
  return {{"task", "t1"},
          {"baseline", "ih"},
          {"scope", "redial"},
          {"backend", {{"model", "m"}}},
          {"metrics", {{"entropy", 1.0}}},
          {"human", {{"entropy", 2.0}}},
          {"series",
           {{"human", {{"sorted_counts", human}}}, {"simulator", {{"sorted_counts", sim}}}}},
          {"counts", {{"source_cases", 1}, {"skipped", 0}, {"cases", 1}, {"failures", 0},
                      {"invalid", 0}}}};
}

TEST(BuildCharts, ItemRanksAndEmptySeries) {
  const auto charts = BuildCharts({ItemsReport({5, 3, 1}, {4, 4})});
  ASSERT_EQ(charts.size(), 1u);
  EXPECT_EQ(charts[0].name, "t1_items_ih_redial");
  EXPECT_EQ(charts[0].csv, "rank,human,simulator\n1,5,4\n2,3,4\n3,1,0\n");
  EXPECT_EQ(charts[0].svg.find("no data"), std::string::npos);

  const auto empty = BuildCharts({ItemsReport({}, {})});
  EXPECT_NE(empty[0].svg.find("no data"), std::string::npos);
  EXPECT_TRUE(empty[0].svg.starts_with("<svg"));
}

TEST(BuildTables, ItemsEntropyLayout) {
  const auto tables = BuildTables({ItemsReport({1}, {1})});
  const Table* t = Find(tables, "items_entropy");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->header, (std::vector<std::string>{"Generator", "Baseline", "imdb", "reddit",
                                                 "redial"}));
  ASSERT_EQ(t->rows.size(), 2u);
  EXPECT_EQ(t->rows[0], (std::vector<std::string>{"Human", "ih", "", "", "2.0000"}));
  EXPECT_EQ(t->rows[1], (std::vector<std::string>{"m", "ih", "", "", "1.0000"}));
}

TEST(RunDirectory, WriteVerifyAndTamper) {
  testing::TempDir tmp;
  const auto dir = tmp / "run";
  WriteRunDirectory(dir, {T5Run()}, json{{"seed", 0}});
  const auto files = testing::ListTree(dir);
  for (const char* f : {"manifest.json", "cases/t5_vanilla_reddit.jsonl",
                        "replies/t5_vanilla_reddit.jsonl", "reports/t5_vanilla_reddit.json",
                        "tables/feedback_coherence.csv", "tables/run_summary.txt",
                        "charts/t5_coherence.svg", "charts/t5_coherence.csv"}) {
    EXPECT_NE(std::find(files.begin(), files.end(), f), files.end()) << f;
  }
  EXPECT_TRUE(VerifyRunDirectory(dir).ok);
  EXPECT_EQ(LoadReports(dir).size(), 1u);

  testing::WriteText(dir / "tables" / "run_summary.txt", "edited\n");
  testing::WriteText(dir / "extra.txt", "x");
  std::filesystem::remove(dir / "charts" / "t5_coherence.svg");
  const auto v = VerifyRunDirectory(dir);
  EXPECT_FALSE(v.ok);
  auto has = [&](const std::string& s) {
    return std::find(v.problems.begin(), v.problems.end(), s) != v.problems.end();
  };
  EXPECT_TRUE(has("hash mismatch: tables/run_summary.txt"));
  EXPECT_TRUE(has("not in manifest: extra.txt"));
  EXPECT_TRUE(has("missing: charts/t5_coherence.svg"));
  EXPECT_FALSE(VerifyRunDirectory(tmp / "nowhere").ok);
}

TEST(RunDirectory, ReplyFileIsAReplayFixture) {
  testing::TempDir tmp;
  const TaskRun run = T5Run();
  WriteRunDirectory(tmp.path(), {run}, json::object());
  const auto fixture = ReplayBackend::LoadFixture(tmp / "replies/t5_vanilla_reddit.jsonl");
  ReplayBackend replay(fixture, true);
  for (size_t i = 0; i < run.prompts.size(); ++i) {
    EXPECT_EQ(replay.Complete(run.prompts[i]), run.replies[i].raw_text);
  }
}

TEST(LoadReports, EmptyDirectoryIsAnError) {
  testing::TempDir tmp;
  EXPECT_THROW(LoadReports(tmp.path()), DataError);
}

}  // namespace
}  // namespace usersim
