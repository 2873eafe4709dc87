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

#include <cmath>

#include "test_util.h"
#include "usersim/metrics.h"
#include "usersim/text.h"

namespace usersim {
namespace {

using nlohmann::json;

const json& Instances() {
  static const json j = testing::ReadJson(testing::Fixture("oracles/metric_instances.json"));
  return j;
}

const json& Spot() {
  static const json j = testing::ReadJson(testing::Fixture("oracles/spot.json"));
  return j;
}

constexpr double kTol = 1e-9;

TEST(Entropy, MatchesOracle) {
  ASSERT_EQ(Instances()["entropy"].size(), 1000u);
  for (const auto& inst : Instances()["entropy"]) {
    const auto counts = inst["counts"].get<std::vector<int64_t>>();
    EXPECT_NEAR(EntropyOfCounts(counts), inst["expected"].get<double>(), kTol);
    Distribution d;
    for (size_t i = 0; i < counts.size(); ++i) d.Add("c" + std::to_string(i), counts[i]);
    EXPECT_NEAR(Entropy(d), inst["expected"].get<double>(), kTol);
  }
}

TEST(Entropy, WorkedExampleAndBounds) {
  const std::vector<int64_t> c = {2, 1, 1};
  EXPECT_DOUBLE_EQ(EntropyOfCounts(c), 1.5);
  const std::vector<int64_t> one = {7};
  EXPECT_EQ(EntropyOfCounts(one), 0.0);
  const std::vector<int64_t> uniform(16, 3);
  EXPECT_NEAR(EntropyOfCounts(uniform), 4.0, 1e-12);
  EXPECT_THROW(Entropy(Distribution{}), std::invalid_argument);
  const std::vector<int64_t> neg = {1, -1};
  EXPECT_THROW(EntropyOfCounts(neg), std::invalid_argument);
}

TEST(Pearson, MatchesOracle) {
  ASSERT_EQ(Instances()["pearson"].size(), 1000u);
  for (const auto& inst : Instances()["pearson"]) {
    const auto x = inst["x"].get<std::vector<double>>();
    const auto y = inst["y"].get<std::vector<double>>();
    const auto r = Pearson(x, y);
    ASSERT_TRUE(r.r.defined());
    EXPECT_NEAR(*r.r.value, inst["r"].get<double>(), kTol);
    EXPECT_NEAR(*r.p_value.value, inst["p"].get<double>(), 1e-8);
  }
  const auto& p20 = Spot()["pearson_20"];
  const auto r = Pearson(p20["x"].get<std::vector<double>>(), p20["y"].get<std::vector<double>>());
  EXPECT_NEAR(*r.r.value, p20["r"].get<double>(), kTol);
  EXPECT_NEAR(*r.p_value.value, p20["p"].get<double>(), 1e-10);
  EXPECT_EQ(r.n, 20u);
}

TEST(Pearson, Properties) {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {2, 1, 4, 3, 5};
  const auto a = Pearson(x, y);
  const auto b = Pearson(y, x);
  EXPECT_DOUBLE_EQ(*a.r.value, *b.r.value);
  EXPECT_NEAR(*Pearson(x, x).r.value, 1.0, 1e-12);
  const std::vector<double> flat = {3, 3, 3, 3, 3};
  const auto u = Pearson(x, flat);
  EXPECT_FALSE(u.r.defined());
  EXPECT_FALSE(u.p_value.defined());
  EXPECT_FALSE(u.r.undefined_reason.empty());
  const std::vector<double> one = {1};
  EXPECT_THROW(Pearson(one, one), std::invalid_argument);
  const std::vector<double> shorter = {1, 2};
  EXPECT_THROW(Pearson(x, shorter), std::invalid_argument);
}

TEST(TypeTokenRatio, MatchesOracle) {
  for (const auto& inst : Instances()["type_token_ratio"]) {
    EXPECT_NEAR(TypeTokenRatio(inst["tokens"].get<std::vector<std::string>>()),
                inst["expected"].get<double>(), 1e-15);
  }
  EXPECT_THROW(TypeTokenRatio({}), std::invalid_argument);
}

TEST(CosineDiversity, MatchesOracle) {
  for (const auto& inst : Instances()["cosine_diversity"]) {
    const auto s = CosineDiversity(inst["vectors"].get<std::vector<std::vector<double>>>());
    ASSERT_TRUE(s.defined());
    EXPECT_NEAR(*s.value, inst["expected"].get<double>(), kTol);
  }
}

TEST(CosineDiversity, EdgeCases) {
  EXPECT_NEAR(*CosineDiversity({{1, 2}, {2, 4}, {0.5, 1}}).value, 0.0, 1e-12);
  const auto opposite = CosineDiversity({{1, 0}, {-1, 0}});
  EXPECT_FALSE(opposite.defined());
  EXPECT_THROW(CosineDiversity({{1, 0}, {0, 0}}), std::invalid_argument);
  EXPECT_THROW(CosineDiversity({}), std::invalid_argument);
  EXPECT_THROW(CosineDiversity({{1, 0}, {1, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(CosineDiversity({{1, NAN}}), std::invalid_argument);
  // A common scale factor does not change the result; the centroid is taken
  // over raw vectors, so scaling one member alone does.
  const auto a = CosineDiversity({{1, 0.2}, {0.3, 1}, {0.5, 0.5}});
  const auto b = CosineDiversity({{10, 2}, {3, 10}, {5, 5}});
  const auto c = CosineDiversity({{10, 2}, {0.03, 0.1}, {5, 5}});
  EXPECT_GT(std::abs(*a.value - *c.value), 1e-3);
  EXPECT_NEAR(*a.value, *b.value, 1e-12);
}

TEST(AspectStats, MatchesOracle) {
  for (const auto& inst : Instances()["aspect_stats"]) {
    std::vector<AspectSentiment> pairs;
    for (const auto& p : inst["pairs"]) {
      pairs.push_back({p[0].get<std::string>(), *ParseSentiment(p[1].get<std::string>()), {}});
    }
    const auto s = ComputeAspectStats(pairs);
    EXPECT_EQ(s.num_pairs, inst["num_pairs"].get<int64_t>());
    EXPECT_EQ(s.num_aspects, inst["num_aspects"].get<int64_t>());
    EXPECT_NEAR(s.aspect_entropy, inst["aspect_entropy"].get<double>(), kTol);
    EXPECT_NEAR(s.sentiment_entropy, inst["sentiment_entropy"].get<double>(), kTol);
    EXPECT_EQ(s.sentiment_counts[0], inst["sentiment_counts"][0].get<int64_t>());
    EXPECT_EQ(s.sentiment_counts[1], inst["sentiment_counts"][1].get<int64_t>());
    EXPECT_EQ(s.sentiment_counts[2], inst["sentiment_counts"][2].get<int64_t>());
  }
  EXPECT_THROW(ComputeAspectStats({}), std::invalid_argument);
}

TEST(PositiveRate, CountsValidRepliesOnly) {
  EXPECT_DOUBLE_EQ(*PositiveRate({3, 1, 10}).value, 0.75);
  EXPECT_FALSE(PositiveRate({0, 0, 4}).defined());
}

TEST(EntropyBins, HistogramMatchesOracle) {
  const auto& h = Spot()["histogram_50"];
  const auto e = h["entropies"].get<std::vector<double>>();
  int used = 0;
  const auto bins = AssignEntropyBins(e, 5, &used);
  EXPECT_EQ(used, 5);
  std::vector<int64_t> counts(5, 0);
  for (size_t b : bins) ++counts[b];
  EXPECT_EQ(counts, h["counts"].get<std::vector<int64_t>>());
}

TEST(EntropyBins, EqualEntropiesCollapse) {
  const std::vector<double> e(6, 2.0);
  const std::vector<std::vector<double>> v(6, {1.0, 0.0});
  const auto bins = EntropyBinnedDiversity(e, v, 3);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].members.size(), 6u);
  EXPECT_NEAR(*bins[0].diversity.value, 0.0, 1e-12);
  EXPECT_THROW(AssignEntropyBins({1.0, 2.0}, 3), std::invalid_argument);
  EXPECT_THROW(AssignEntropyBins({1.0, 2.0}, 0), std::invalid_argument);
  EXPECT_THROW(EntropyBinnedDiversity({1.0, 2.0}, {{1.0}}, 1), std::invalid_argument);
}

TEST(EntropyBins, SparseBinIsUndefined) {
  const std::vector<double> e = {0.0, 0.1, 0.2, 5.0};
  const std::vector<std::vector<double>> v = {{1, 0}, {0, 1}, {1, 1}, {1, 2}};
  const auto bins = EntropyBinnedDiversity(e, v, 2);
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_EQ(bins[0].members, (std::vector<size_t>{0, 1, 2}));
  EXPECT_TRUE(bins[0].diversity.defined());
  EXPECT_FALSE(bins[1].diversity.defined());
  EXPECT_DOUBLE_EQ(bins[1].upper, 5.0);
}

TEST(WordEntropy, Tokens) {
  EXPECT_DOUBLE_EQ(WordEntropy("a a b c"), 1.5);
  EXPECT_EQ(WordEntropy("!!!"), 0.0);
}

TEST(Coherence, WorkedExample) {
  std::vector<FeedbackRecord> records;
  auto add = [&](FeedbackOutcome o, int n) {
    for (int i = 0; i < n; ++i) {
      records.push_back({"r", Polarity::kPositive, FeedbackMode::kCompare, o, false});
    }
  };
  add(FeedbackOutcome::kPreferPositive, 9);
  add(FeedbackOutcome::kPreferNegative, 1);
  add(FeedbackOutcome::kNeither, 1);
  add(FeedbackOutcome::kInvalid, 2);
  const auto report = ComputeCoherence(records);
  const auto& v = report.variants.at(false);
  EXPECT_DOUBLE_EQ(*v.CompareCoherent().value, 0.9);
  EXPECT_DOUBLE_EQ(*v.NeitherRate().value, 1.0 / 11.0);
  EXPECT_EQ(v.invalid, 2);
  EXPECT_FALSE(v.AcceptRejectCoherent().defined());
  EXPECT_EQ(report.ToJson()["items_only"]["compare"]["prefer_positive"], 9);
}

TEST(Coherence, AcceptRejectCells) {
  std::vector<FeedbackRecord> records = {
      {"a", Polarity::kPositive, FeedbackMode::kAcceptReject, FeedbackOutcome::kAccept, true},
      {"b", Polarity::kPositive, FeedbackMode::kAcceptReject, FeedbackOutcome::kAccept, true},
      {"c", Polarity::kPositive, FeedbackMode::kAcceptReject, FeedbackOutcome::kReject, true},
      {"d", Polarity::kNegative, FeedbackMode::kAcceptReject, FeedbackOutcome::kAccept, true},
      {"e", Polarity::kNegative, FeedbackMode::kAcceptReject, FeedbackOutcome::kReject, true},
  };
  const auto& v = ComputeCoherence(records).variants.at(true);
  EXPECT_DOUBLE_EQ(*v.PositiveCoherent().value, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*v.PositiveLikelyIncoherent().value, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*v.NegativeCoherent().value, 0.5);
  EXPECT_DOUBLE_EQ(*v.NegativeIncoherent().value, 0.5);
  EXPECT_DOUBLE_EQ(*v.AcceptRejectCoherent().value, 3.0 / 5.0);
  const std::vector<FeedbackRecord> junk = {
      {"x", Polarity::kPositive, FeedbackMode::kAcceptReject, FeedbackOutcome::kInvalid, true}};
  EXPECT_THROW(ComputeCoherence(junk), std::invalid_argument);
}

TEST(DebiasChoice, MapsSlots) {
  EXPECT_EQ(DebiasChoice(1, 1), FeedbackOutcome::kPreferPositive);
  EXPECT_EQ(DebiasChoice(2, 1), FeedbackOutcome::kPreferNegative);
  EXPECT_EQ(DebiasChoice(2, 2), FeedbackOutcome::kPreferPositive);
  EXPECT_EQ(DebiasChoice(0, 2), FeedbackOutcome::kNeither);
  EXPECT_EQ(DebiasChoice(5, 2), FeedbackOutcome::kInvalid);
  EXPECT_THROW(DebiasChoice(1, 0), std::invalid_argument);
}

TEST(ItemDistribution, DropsPromptItemsAndCountsOncePerCase) {
  const auto d = ItemDistribution({{"a", "b", "b", "c"}, {"a", "c"}}, {{"a"}, {}});
  EXPECT_EQ(d.CountOf("a"), 1);
  EXPECT_EQ(d.CountOf("b"), 1);
  EXPECT_EQ(d.CountOf("c"), 2);
  EXPECT_EQ(d.total(), 4);
  const auto sorted = d.SortedByFrequency();
  EXPECT_EQ(sorted[0].first, "c");
  EXPECT_EQ(sorted[1].first, "a");
}

TEST(Stat, JsonRoundTrip) {
  EXPECT_EQ(Stat::Of(0.25).ToJson(), json(0.25));
  const json u = Stat::Undefined("zero variance").ToJson();
  EXPECT_EQ(u, (json{{"undefined", "zero variance"}}));
  const Stat back = Stat::FromJson(u);
  EXPECT_FALSE(back.defined());
  EXPECT_EQ(back.undefined_reason, "zero variance");
  EXPECT_DOUBLE_EQ(*Stat::FromJson(json(1.5)).value, 1.5);
}

}  // namespace
}  // namespace usersim
