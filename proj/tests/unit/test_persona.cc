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

#include <array>

#include "test_util.h"
#include "usersim/error.h"
#include "usersim/persona.h"
#include "usersim/text.h"

namespace usersim {
namespace {

const TemplateSet& Templates() {
  static const TemplateSet t = TemplateSet::Load(testing::SourceDir() / "templates");
  return t;
}

SurnameTable Names(int n) {
  std::vector<std::string> v;
  for (int i = 0; i < n; ++i) v.push_back("Name" + std::to_string(i));
  return SurnameTable(v);
}

TEST(SamplePersona, PickinessIsUniformOverThreeLevels) {
  const SurnameTable names = Names(50);
  Rng rng(101);
  std::array<int, 3> counts{};
  constexpr int kDraws = 30000;
  for (int i = 0; i < kDraws; ++i) {
    const auto p = SamplePersona(Baseline::kDIPP, names, rng);
    ASSERT_TRUE(p.pickiness);
    ++counts[static_cast<int>(*p.pickiness)];
  }
  for (int c : counts) EXPECT_NEAR(c / double(kDraws), 1.0 / 3.0, 0.02);
}

TEST(SamplePersona, TitlesAndSurnames) {
  const SurnameTable names = Names(5);
  Rng rng(3);
  int ms = 0;
  std::set<std::string> seen;
  for (int i = 0; i < 4000; ++i) {
    const auto p = SamplePersona(Baseline::kDI, names, rng);
    EXPECT_FALSE(p.pickiness);
    EXPECT_TRUE(names.Contains(p.surname));
    seen.insert(p.surname);
    ms += p.title == Honorific::kMs;
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_NEAR(ms / 4000.0, 0.5, 0.03);
  EXPECT_THROW(SamplePersona(Baseline::kDI, SurnameTable(), rng), ConfigError);
}

TEST(SurnameTable, LoadsPooledAndCensusFormats) {
  testing::TempDir tmp;
  testing::WriteText(tmp / "pooled.csv", "surname\nSMITH\nGarcia\nsmith\nO'BRIEN\n");
  const auto pooled = SurnameTable::Load(tmp / "pooled.csv");
  EXPECT_EQ(pooled.names(), (std::vector<std::string>{"Smith", "Garcia", "O'brien"}));

  testing::WriteText(tmp / "census.csv",
                     "name,rank,count,pctwhite,pctblack,pctapi,pctaian,pcthispanic\n"
                     "SMITH,1,1000,70,20,1,1,8\n"
                     "NGUYEN,2,500,1,0,97,0,2\n"
                     "GARCIA,3,800,5,1,1,1,92\n"
                     "BEGAY,4,50,0,0,0,99,(S)\n");
  const auto census = SurnameTable::Load(tmp / "census.csv", 1);
  EXPECT_EQ(census.names(),
            (std::vector<std::string>{"Smith", "Nguyen", "Garcia", "Begay"}));
  EXPECT_THROW(SurnameTable::Load(tmp / "missing.csv"), ConfigError);
  testing::WriteText(tmp / "bad.csv", "foo,bar\n1,2\n");
  EXPECT_THROW(SurnameTable::Load(tmp / "bad.csv"), ConfigError);
}

TEST(AssignAgents, PositiveSlotIsBalanced) {
  Rng rng(17);
  int slot1 = 0;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const auto a = AssignAgents("pos", "neg", rng);
    if (a.positive_slot == 1) {
      ++slot1;
      EXPECT_EQ(a.agent1, "pos");
    } else {
      EXPECT_EQ(a.agent2, "pos");
    }
  }
  EXPECT_NEAR(slot1 / double(kDraws), 0.5, 0.015);
}

TEST(SampleNegativeRecommendation, DeterministicAndNeverSelf) {
  std::vector<SourceCase> cases(6);
  for (size_t i = 0; i < cases.size(); ++i) cases[i].id = std::to_string(i);
  std::vector<size_t> a, b;
  Rng r1(9), r2(9);
  std::set<size_t> seen;
  for (int i = 0; i < 300; ++i) {
    a.push_back(SampleNegativeRecommendation(2, cases, r1));
    b.push_back(SampleNegativeRecommendation(2, cases, r2));
    EXPECT_NE(a.back(), 2u);
    seen.insert(a.back());
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(seen.size(), 5u);
  std::vector<SourceCase> one(1);
  EXPECT_THROW(SampleNegativeRecommendation(0, one, r1), DataError);
}

TEST(TemplateSet, RenderAndPlaceholders) {
  const auto t = TemplateSet::FromMap({{"x", "Hi {prefix} {surname}, {x} {prefix}. {not a field} {}"}});
  EXPECT_EQ(t.Placeholders("x"), (std::vector<std::string>{"prefix", "surname", "x"}));
  EXPECT_EQ(t.Render("x", {{"prefix", "Ms."}, {"surname", "Lee"}, {"x", "{y}"}}),
            "Hi Ms. Lee, {y} Ms.. {not a field} {}");
  try {
    t.Render("x", {{"prefix", "Ms."}});
    FAIL();
  } catch (const MissingFieldError& e) {
    EXPECT_EQ(e.field(), "surname");
  }
  EXPECT_THROW(t.Get("nope"), ConfigError);
}

TEST(TemplateSet, MissingRequiredTemplateIsConfigError) {
  testing::TempDir tmp;
  testing::WriteText(tmp / "t1_di.txt", "x");
  EXPECT_THROW(TemplateSet::Load(tmp.path()), ConfigError);
  EXPECT_THROW(TemplateSet::Load(tmp / "absent"), ConfigError);
}

TEST(TemplateSet, BundledPromptsAvoidMetricTerms) {
  for (const auto& [name, text] : Templates().all()) {
    const std::string lower = ToLowerAscii(text);
    for (const auto& term : MetricDenyList()) {
      EXPECT_EQ(lower.find(term), std::string::npos) << name << " contains " << term;
    }
  }
}

PersonaSpec Lee(std::optional<Pickiness> p = std::nullopt) {
  return {Honorific::kMs, "Lee", p};
}

TEST(PromptRenderer, ItemsTalkDirectInstruction) {
  PromptRenderer r(Templates());
  SourceCase c;
  c.id = "7";
  c.mentioned_items = {{"heat (1995)", "Heat (1995)"}, {"up (2009)", "Up (2009)"}};
  const auto pc = r.ItemsTalk(Baseline::kDI, c, Lee(), 1);
  ASSERT_TRUE(pc);
  EXPECT_EQ(pc->prompt_text,
            "Pretend to be Ms. Lee. You decide to talk about 2 movies. What would these 2 "
            "movies be? Reply as a list of <Title (yyyy)>. Say nothing else.");
  EXPECT_EQ(pc->target_num, 2);
  EXPECT_EQ(pc->id, "t1/di/redial/7");
}

TEST(PromptRenderer, ItemsTalkHistory) {
  PromptRenderer r(Templates());
  SourceCase c;
  c.id = "7";
  c.mentioned_items = {{"heat (1995)", "Heat (1995)"},
                       {"up (2009)", "Up (2009)"},
                       {"jaws (1975)", "Jaws (1975)"}};
  const auto redial = r.ItemsTalk(Baseline::kIH, c, std::nullopt, 1);
  ASSERT_TRUE(redial);
  EXPECT_EQ(redial->prompt_text,
            "A person mentions Heat (1995) and Up (2009) in a conversation about movies and "
            "proceeds to mention 1 more. What would these 1 movies be? Reply as a list of "
            "<Title (yyyy)>. Say nothing else.");
  c.mentioned_items.pop_back();
  EXPECT_FALSE(r.ItemsTalk(Baseline::kIH, c, std::nullopt, 1));

  c.dataset = Dataset::kReddit;
  EXPECT_THROW(r.ItemsTalk(Baseline::kIH, c, std::nullopt, 1), MissingFieldError);
  c.timestamp_utc = 1500000000;
  const auto reddit = r.ItemsTalk(Baseline::kIH, c, std::nullopt, 1);
  ASSERT_TRUE(reddit);
  EXPECT_NE(reddit->prompt_text.find("At UTC time 2017-07-14 02:40:00, a person starts to "
                                     "talk about the movies Heat (1995)"),
            std::string::npos);
  EXPECT_EQ(reddit->target_num, 1);
}

TEST(PromptRenderer, ImdbHistoryUsesTenDistinctMovies) {
  PromptRenderer r(Templates());
  SourceCase c;
  c.dataset = Dataset::kImdb;
  c.id = "u";
  for (int i = 0; i < 12; ++i) {
    const std::string d = "M" + std::to_string(i) + " (2000)";
    c.reviews.push_back({{"m" + std::to_string(i) + " (2000)", d}, "t" + std::to_string(i), "b"});
    c.mentioned_items.push_back(c.reviews.back().movie);
  }
  const auto pc = r.ItemsTalk(Baseline::kIH, c, std::nullopt, 1);
  ASSERT_TRUE(pc);
  EXPECT_EQ(pc->prompt_items.size(), 10u);
  EXPECT_EQ(pc->target_num, 2);
  EXPECT_NE(pc->prompt_text.find("M0 (2000): t0\nM1 (2000): t1\n"), std::string::npos);
}

TEST(PromptRenderer, BinaryAndOpenPreference) {
  PromptRenderer r(Templates());
  const ItemRef heat{"heat (1995)", "Heat (1995)"};
  EXPECT_EQ(r.BinaryPreference(Baseline::kDIPP, heat, Lee(Pickiness::kExtremelyPicky), 0)
                .prompt_text,
            "Pretend to be Ms. Lee. You are extremely picky about movies. You watched the "
            "movie Heat (1995). Did you like the movie? Answer Yes or No. Don't say anything "
            "else.");
  EXPECT_THROW(r.BinaryPreference(Baseline::kDIPP, heat, Lee(), 0), MissingFieldError);
  EXPECT_THROW(r.BinaryPreference(Baseline::kIH, heat, Lee(), 0), std::invalid_argument);

  SourceCase c;
  c.dataset = Dataset::kImdb;
  c.id = "u";
  c.reviews = {{heat, "t", "Très bien"}};
  const auto pc = r.OpenPreference(Baseline::kDI, c, 0, Lee(), 0);
  EXPECT_EQ(pc.target_len, 9);
  EXPECT_NE(pc.prompt_text.find("should not exceed 9 characters"), std::string::npos);
  EXPECT_THROW(r.OpenPreference(Baseline::kDI, c, 1, Lee(), 0), MissingFieldError);
}

TEST(PromptRenderer, FeedbackPrompts) {
  PromptRenderer r(Templates());
  SourceCase c;
  c.dataset = Dataset::kReddit;
  c.id = "p";
  c.request_text = "Something like Heat?";
  FeedbackSetup s;
  s.reason_requested = true;
  const auto ar = r.AcceptReject(c, "Ronin (1998)", s, 0);
  EXPECT_NE(ar.prompt_text.find("USER: Something like Heat?\nAGENT: Ronin (1998)\n"),
            std::string::npos);
  EXPECT_TRUE(ar.prompt_text.ends_with("Provide a short reason (less than 40 words) for your "
                                       "response."));
  s.mode = FeedbackMode::kCompare;
  s.reason_requested = false;
  s.positive_slot = 2;
  const auto cmp = r.Compare(c, {"bad pick", "good pick", 2}, s, 0);
  EXPECT_NE(cmp.prompt_text.find("AGENT 1's response: bad pick\nAGENT 2's response: good pick"),
            std::string::npos);
  c.request_text.reset();
  EXPECT_THROW(r.AcceptReject(c, "x", s, 0), MissingFieldError);
}

TEST(RecommendationPayload, TitlesOrFullText) {
  Comment c{"c", "Try Heat (1995), it is tense.", {{"heat (1995)", "Heat (1995)"},
                                                   {"ronin (1998)", "Ronin (1998)"}}};
  EXPECT_EQ(RecommendationPayload(c, false), "Heat (1995), Ronin (1998)");
  EXPECT_EQ(RecommendationPayload(c, true), c.text);
}

}  // namespace
}  // namespace usersim
