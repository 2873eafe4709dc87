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
#include "usersim/tasks.h"
#include "usersim/text.h"

namespace usersim {
namespace {

using nlohmann::json;

const json& Spot() {
  static const json j = testing::ReadJson(testing::Fixture("oracles/spot.json"));
  return j;
}

IngestResult IngestSample(Dataset ds) {
  std::ifstream in(testing::SampleDir() / "raw" / (std::string(DatasetName(ds)) + ".jsonl"));
  switch (ds) {
    case Dataset::kRedial: return IngestRedial(in);
    case Dataset::kReddit: return IngestReddit(in, {});
    case Dataset::kImdb: return IngestImdb(in);
    default: break;
  }
  throw std::invalid_argument("no sample for this dataset");
}

// Renderer, surnames and a gateway over a scripted backend.
struct Harness {
  explicit Harness(ScriptedBackend::Responder responder)
      : templates(TemplateSet::Load(testing::SourceDir() / "templates")),
        renderer(templates),
        surnames(std::vector<std::string>{"Smith", "Garcia", "Nguyen", "Begay", "Johnson"}),
        backend(std::move(responder)),
        gateway(backend, Config(), [](auto) {}) {}

  static BackendConfig Config() {
    BackendConfig c;
    c.max_retries = 0;
    c.max_in_flight = 2;
    return c;
  }

  TaskContext Context(TaskOptions options = {}) {
    return TaskContext{renderer, gateway, &surnames, options};
  }

  TemplateSet templates;
  PromptRenderer renderer;
  SurnameTable surnames;
  ScriptedBackend backend;
  Gateway gateway;
};

class T1Null : public ::testing::TestWithParam<std::tuple<Dataset, Baseline>> {};

TEST_P(T1Null, HumanRepliesReproduceHumanEntropy) {
  const auto [ds, baseline] = GetParam();
  const IngestResult data = IngestSample(ds);
  Harness h(null_responders::ItemsTalk(data.cases));
  TaskContext ctx = h.Context();
  const TaskRun run = RunT1(data.cases, data.catalog, baseline, ctx);
  const json& m = run.report.metrics;
  EXPECT_GT(run.report.counts.cases, 0);
  EXPECT_EQ(run.report.counts.invalid, 0);
  EXPECT_EQ(m["fuzzy_matches"], 0);
  EXPECT_EQ(m["matched_items"], m["extracted_items"]);
  EXPECT_NEAR(m["entropy"].get<double>(), run.report.human["entropy"].get<double>(), 1e-12);
  EXPECT_EQ(m["distinct_items"], run.report.human["distinct_items"]);
  int64_t eligible = 0;
  const Distribution human = HumanItemDistribution(data.cases, baseline, &eligible);
  EXPECT_EQ(eligible, run.report.counts.cases);
  EXPECT_NEAR(Entropy(human), run.report.human["entropy"].get<double>(), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(
    Datasets, T1Null,
    ::testing::Combine(::testing::Values(Dataset::kRedial, Dataset::kReddit, Dataset::kImdb),
                       ::testing::Values(Baseline::kDI, Baseline::kIH)));

TEST(T1, RejectsOtherBaselines) {
  Harness h([](const PromptCase&) { return std::string("x"); });
  TaskContext ctx = h.Context();
  EXPECT_THROW(RunT1({}, {}, Baseline::kVanilla, ctx), std::invalid_argument);
}

struct ConstructedMovies {
  RatingStats stats;
  std::map<std::string, std::vector<std::string>> groups;
  std::map<std::string, double> avg;
};

ConstructedMovies Constructed() {
  ConstructedMovies out;
  for (const auto& m : Spot()["constructed_preference"]["movies"]) {
    const std::string key = m["key"];
    MovieRating r;
    r.display = m["display"];
    for (double x : m["ratings"].get<std::vector<double>>()) {
      ++r.num_ratings;
      r.half_star_sum += static_cast<int64_t>(x * 2);
      if (x >= 3.5) ++r.num_liked;
    }
    out.avg[key] = r.AverageRating();
    out.stats.per_movie[key] = r;
    out.groups["all"].push_back(key);
  }
  return out;
}

TEST(T2, ConstructedPreferenceMatchesOracle) {
  const ConstructedMovies movies = Constructed();
  Harness h([&](const PromptCase& pc) {
    return movies.avg.at(pc.prompt_items.at(0).key) >= 3.0 ? std::string("Yes.")
                                                           : std::string("No");
  });
  TaskOptions o;
  o.n_simulators = 3;
  TaskContext ctx = h.Context(o);
  const TaskRun run = RunT2(movies.stats, movies.groups, Baseline::kDIPP, ctx);
  const auto& oracle = Spot()["constructed_preference"];
  EXPECT_EQ(run.report.counts.cases, 150);
  const json& sim = run.report.metrics["all"]["pearson"];
  EXPECT_NEAR(sim["r"].get<double>(), oracle["r"].get<double>(), 1e-9);
  EXPECT_NEAR(sim["p_value"].get<double>(), oracle["p"].get<double>(), 1e-12);
  const json& human = run.report.human["all"]["pearson"];
  EXPECT_NEAR(human["r"].get<double>(), oracle["human_r"].get<double>(), 1e-9);
  EXPECT_NEAR(human["p_value"].get<double>(), oracle["human_p"].get<double>(), 1e-12);
}

TEST(T2, ConstantAnswersLeaveCorrelationUndefined) {
  const ConstructedMovies movies = Constructed();
  Harness h([](const PromptCase&) { return std::string("Yes"); });
  TaskOptions o;
  o.n_simulators = 1;
  TaskContext ctx = h.Context(o);
  const TaskRun run = RunT2(movies.stats, movies.groups, Baseline::kDI, ctx);
  EXPECT_TRUE(run.report.metrics["all"]["pearson"]["r"].contains("undefined"));
  EXPECT_DOUBLE_EQ(run.report.metrics["all"]["mean_positive_rate"].get<double>(), 1.0);
}

TEST(T2, PersonasAreDeterministicPerSeed) {
  const ConstructedMovies movies = Constructed();
  auto prompts = [&](uint64_t seed) {
    Harness h([](const PromptCase&) { return std::string("No"); });
    TaskOptions o;
    o.n_simulators = 4;
    o.seed = seed;
    TaskContext ctx = h.Context(o);
    std::vector<std::string> out;
    for (const auto& pc : RunT2(movies.stats, movies.groups, Baseline::kDIPP, ctx).prompts) {
      out.push_back(pc.prompt_text);
    }
    return out;
  };
  EXPECT_EQ(prompts(7), prompts(7));
  EXPECT_NE(prompts(7), prompts(8));
}

// Aspects are the distinct words longer than five letters; sentiment by
// a two-word lexicon.
class LexiconExtractor : public AspectExtractor {
 public:
  std::string id() const override { return "lexicon"; }
  std::vector<Extraction> ExtractBatch(const std::vector<std::string>& texts) override {
    std::vector<Extraction> out;
    for (const auto& t : texts) {
      Extraction e{true, {}, {}};
      const Sentiment s = t.find("weak") != std::string::npos ? Sentiment::kNegative
                          : t.find("superb") != std::string::npos ? Sentiment::kPositive
                                                                   : Sentiment::kNeutral;
      for (const auto& tok : Tokenize(t)) {
        if (tok.size() > 5) e.pairs.push_back({tok, s, {}});
      }
      out.push_back(std::move(e));
    }
    return out;
  }
};

TEST(T3, HumanRepliesReproduceHumanAspects) {
  const IngestResult data = IngestSample(Dataset::kImdb);
  Harness h(null_responders::OpenPreference(data.cases));
  LexiconExtractor ex;
  TaskContext ctx = h.Context();
  const TaskRun run = RunT3(data.cases, Baseline::kDI, ex, ctx);
  EXPECT_EQ(run.report.counts.cases, static_cast<int64_t>(data.cases.size()));
  EXPECT_EQ(run.report.metrics, run.report.human);
  EXPECT_GT(run.report.metrics["num_pairs"].get<int64_t>(), 0);
}

TEST(T3, ExtractionFailuresAreCounted) {
  const IngestResult data = IngestSample(Dataset::kImdb);
  Harness h([](const PromptCase&) { return std::string("not in the fixture"); });
  FixtureExtractor ex({});
  TaskContext ctx = h.Context();
  const TaskRun run = RunT3(data.cases, Baseline::kDIPP, ex, ctx);
  EXPECT_EQ(run.report.metrics["extraction_failures"], data.cases.size());
  EXPECT_TRUE(run.report.metrics["aspect_entropy"].contains("undefined"));
}

TEST(T4, CorpusDiversityMatchesOracle) {
  const json& o = Spot()["corpus_30"];
  std::map<std::string, Vector> words, sentences;
  for (const auto& [w, v] : o["word_vectors"].items()) words[w] = v.get<Vector>();
  for (const auto& [t, v] : o["sentence_vectors"].items()) sentences[t] = v.get<Vector>();
  const auto table = WordVectorTable::FromMap("oracle", words);
  FixtureSentenceProvider sp("oracle", sentences);
  EmbeddingCache cache;
  const json j =
      CorpusDiversity(o["texts"].get<std::vector<std::string>>(), table, sp, 5, cache);
  EXPECT_EQ(j["tokens"], o["tokens"]);
  EXPECT_EQ(j["vocabulary"], o["vocabulary"]);
  EXPECT_EQ(j["out_of_vocabulary"], o["out_of_vocabulary"]);
  EXPECT_NEAR(j["type_token_ratio"].get<double>(), o["type_token_ratio"].get<double>(), 1e-12);
  EXPECT_NEAR(j["word_diversity"].get<double>(), o["word_diversity"].get<double>(), 1e-9);
  EXPECT_NEAR(j["sentence_diversity"].get<double>(), o["sentence_diversity"].get<double>(), 1e-9);
  EXPECT_NEAR(j["mean_length"].get<double>(), o["mean_length"].get<double>(), 1e-9);
  ASSERT_EQ(j["bins"].size(), 5u);
  for (size_t b = 0; b < 5; ++b) {
    EXPECT_EQ(j["bins"][b]["requests"], o["bins"][b]["requests"]) << b;
    if (o["bins"][b]["diversity"].is_null()) {
      EXPECT_TRUE(j["bins"][b]["diversity"].contains("undefined"));
    } else {
      EXPECT_NEAR(j["bins"][b]["diversity"].get<double>(),
                  o["bins"][b]["diversity"].get<double>(), 1e-9);
    }
  }
}

TEST(T4, HumanRepliesReproduceHumanDiversity) {
  const IngestResult data = IngestSample(Dataset::kReddit);
  Harness h(null_responders::RecRequest(data.cases));
  const auto table = WordVectorTable::Load(testing::SampleDir() / "vectors.txt");
  auto shared = std::make_shared<WordVectorTable>(table);
  MeanWordSentenceProvider sp(shared);
  TaskContext ctx = h.Context();
  const TaskRun run = RunT4(data.cases, table, sp, ctx);
  EXPECT_GT(run.report.counts.cases, 0);
  EXPECT_EQ(run.report.metrics, run.report.human);
}

TEST(T5, HumanRepliesAreFullyCoherent) {
  const IngestResult data = IngestSample(Dataset::kReddit);
  Harness h(null_responders::Feedback());
  TaskOptions o;
  o.with_explanations = true;
  TaskContext ctx = h.Context(o);
  const TaskRun run = RunT5(data.cases, ctx);
  EXPECT_EQ(run.report.counts.cases, static_cast<int64_t>(data.cases.size()) * 6);
  EXPECT_EQ(run.report.metrics, run.report.human);
  for (const char* v : {"items_only", "with_explanations"}) {
    EXPECT_DOUBLE_EQ(run.report.metrics[v]["accept_reject"]["coherent"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(run.report.metrics[v]["compare"]["coherent"].get<double>(), 1.0);
  }
}

TEST(T5, SlotBiasIsDebiased) {
  const IngestResult data = IngestSample(Dataset::kReddit);
  Harness h([](const PromptCase& pc) -> std::string {
    return pc.feedback->mode == FeedbackMode::kCompare ? "AGENT 1" : "Accept";
  });
  TaskContext ctx = h.Context();
  const TaskRun run = RunT5(data.cases, ctx);
  int64_t slot1 = 0, compares = 0;
  for (const auto& pc : run.prompts) {
    if (pc.feedback->mode != FeedbackMode::kCompare) continue;
    ++compares;
    slot1 += pc.feedback->positive_slot == 1;
  }
  const json& v = run.report.metrics["items_only"];
  EXPECT_DOUBLE_EQ(v["compare"]["coherent"].get<double>(),
                   static_cast<double>(slot1) / static_cast<double>(compares));
  EXPECT_DOUBLE_EQ(v["accept_reject"]["positive"]["coherent"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(v["accept_reject"]["negative"]["incoherent"].get<double>(), 1.0);
}

TEST(T5, ReasonsAreRecorded) {
  const IngestResult data = IngestSample(Dataset::kReddit);
  Harness h([](const PromptCase& pc) -> std::string {
    return pc.feedback->mode == FeedbackMode::kCompare ? "AGENT 2. Better fit."
                                                       : "Reject. Not what I asked.";
  });
  TaskOptions o;
  o.with_reasons = true;
  TaskContext ctx = h.Context(o);
  const TaskRun run = RunT5(data.cases, ctx);
  ASSERT_FALSE(run.report.records.empty());
  EXPECT_EQ(run.report.records[0]["reason"], "Not what I asked.");
  EXPECT_NE(run.prompts[0].prompt_text.find("Provide a short reason"), std::string::npos);
}

TEST(Abort, MoreThanHalfFailedAbortsTheTask) {
  const IngestResult data = IngestSample(Dataset::kReddit);
  int n = 0;
  Harness h([&](const PromptCase&) -> std::string {
    if (n++ % 3 != 0) throw TransientError("overloaded");
    return "Accept";
  });
  TaskContext ctx = h.Context();
  EXPECT_THROW(RunT5(data.cases, ctx), TaskAbortedError);

  int m = 0;
  Harness ok([&](const PromptCase&) -> std::string {
    if (m++ % 3 == 0) throw TransientError("overloaded");
    return "Accept";
  });
  TaskContext ctx2 = ok.Context();
  const TaskRun run = RunT5(data.cases, ctx2);
  EXPECT_GT(run.report.counts.failures, 0);
}

TEST(Abort, DiAndDiPpNeedSurnames) {
  const ConstructedMovies movies = Constructed();
  Harness h([](const PromptCase&) { return std::string("Yes"); });
  TaskContext ctx = h.Context();
  ctx.surnames = nullptr;
  EXPECT_THROW(RunT2(movies.stats, movies.groups, Baseline::kDI, ctx), ConfigError);
}

}  // namespace
}  // namespace usersim
