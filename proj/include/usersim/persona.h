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

#ifndef USERSIM_PERSONA_H_
#define USERSIM_PERSONA_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "usersim/corpus.h"
#include "usersim/rng.h"

namespace usersim {

enum class Task { kT1, kT2, kT3, kT4, kT5 };
enum class Baseline { kVanilla, kDI, kDIPP, kIH };

std::string_view TaskName(Task t);  // "t1".."t5"
std::optional<Task> ParseTask(std::string_view s);
std::string_view BaselineName(Baseline b);  // "vanilla", "di", "di-pp", "ih"
std::optional<Baseline> ParseBaseline(std::string_view s);

enum class Honorific { kMr, kMs };
enum class Pickiness { kNotPicky, kModeratelyPicky, kExtremelyPicky };

std::string_view HonorificText(Honorific h);  // "Mr." / "Ms."
std::string_view PickinessText(Pickiness p);  // "not picky", ...

struct PersonaSpec {
  Honorific title = Honorific::kMr;
  std::string surname;
  std::optional<Pickiness> pickiness;

  nlohmann::json ToJson() const;
};

// Pooled census surnames, deduplicated, in first-seen order.
class SurnameTable {
 public:
  SurnameTable() = default;
  explicit SurnameTable(std::vector<std::string> names);

  // Accepts either a pooled list (a "surname" column) or the raw census
  // table (name, count, pctwhite, pctblack, pctapi, pcthispanic, pctaian...),
  // from which the `per_group` most common surnames of each group are taken.
  // Throws ConfigError when the file is missing or has no usable column.
  static SurnameTable Load(const std::filesystem::path& path,
                           size_t per_group = 500);

  const std::vector<std::string>& names() const { return names_; }
  bool Contains(std::string_view name) const;
  bool empty() const { return names_.empty(); }

 private:
  std::vector<std::string> names_;
};

// Title uniform over {Mr, Ms}, surname uniform over the table, pickiness
// uniform over three levels for DI+PP only.
PersonaSpec SamplePersona(Baseline baseline, const SurnameTable& surnames,
                          Rng& rng);

// Template files, one per prompt, with {placeholder} fields.
class TemplateSet {
 public:
  static TemplateSet Load(const std::filesystem::path& dir);
  static TemplateSet FromMap(std::map<std::string, std::string> templates);

  const std::string& Get(std::string_view name) const;
  bool Has(std::string_view name) const;

  // Fills every {field}. A field absent from `values` raises
  // MissingFieldError naming it.
  std::string Render(std::string_view name,
                     const std::map<std::string, std::string>& values) const;

  // Placeholder names used by a template, in order of first use.
  std::vector<std::string> Placeholders(std::string_view name) const;

  // name -> sha256 of the template text.
  std::map<std::string, std::string> Hashes() const;
  const std::map<std::string, std::string, std::less<>>& all() const {
    return templates_;
  }

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

// Names of the templates a complete set must carry.
const std::vector<std::string>& RequiredTemplateNames();

// Terms that must never appear in a simulator prompt (zero-shot guarantee).
const std::vector<std::string>& MetricDenyList();

enum class FeedbackMode { kAcceptReject, kCompare };
enum class Polarity { kPositive, kNegative };

std::string_view FeedbackModeName(FeedbackMode m);
std::string_view PolarityName(Polarity p);

struct FeedbackSetup {
  FeedbackMode mode = FeedbackMode::kAcceptReject;
  Polarity polarity = Polarity::kPositive;  // accept/reject mode
  int positive_slot = 0;                    // compare mode: 1 or 2
  bool explanation_shown = false;
  bool reason_requested = false;
  std::string negative_source_id;
};

struct PromptCase {
  std::string id;
  Task task = Task::kT1;
  Baseline baseline = Baseline::kVanilla;
  std::optional<PersonaSpec> persona;
  Dataset source_dataset = Dataset::kRedial;
  std::string source_id;
  std::optional<int> target_num;
  std::optional<int64_t> target_len;
  // Items shown to the simulator (history, or the rated/reviewed movie).
  std::vector<ItemRef> prompt_items;
  std::string prompt_text;
  uint64_t rng_seed = 0;
  std::optional<FeedbackSetup> feedback;

  nlohmann::json ToJson() const;
};

// History sizes for the interaction-history baseline.
inline constexpr size_t kRedialHistory = 2;
inline constexpr size_t kRedditHistory = 1;
inline constexpr size_t kImdbHistory = 10;

size_t HistorySize(Dataset ds);

struct AgentAssignment {
  std::string agent1;
  std::string agent2;
  int positive_slot = 1;
};

// Places the positive comment in slot 1 or 2 with probability 1/2.
AgentAssignment AssignAgents(const std::string& positive_comment,
                             const std::string& negative_comment, Rng& rng);

// Head comment of a uniformly sampled different request. Throws DataError
// when fewer than two requests exist. Returns the index into `all_cases`.
size_t SampleNegativeRecommendation(size_t request_index,
                                    const std::vector<SourceCase>& all_cases,
                                    Rng& rng);

// Renders every simulator prompt. Rendering is a pure function of the
// inputs; the same arguments always produce the same prompt text.
class PromptRenderer {
 public:
  explicit PromptRenderer(const TemplateSet& templates) : templates_(templates) {}

  const TemplateSet& templates() const { return templates_; }

  // ItemsTalk. Returns nullopt when the case has too few items for its
  // history or target_num would be < 1.
  std::optional<PromptCase> ItemsTalk(Baseline baseline, const SourceCase& source,
                                      const std::optional<PersonaSpec>& persona,
                                      uint64_t seed) const;

  // BinPref for one movie label "Title (yyyy)".
  PromptCase BinaryPreference(Baseline baseline, const ItemRef& movie,
                              const PersonaSpec& persona, uint64_t seed) const;

  // OpenPref for review `review_index` of an IMDB case.
  PromptCase OpenPreference(Baseline baseline, const SourceCase& source,
                            size_t review_index, const PersonaSpec& persona,
                            uint64_t seed) const;

  // RecRequest from a Reddit request.
  PromptCase RecommendationRequest(const SourceCase& source, uint64_t seed) const;

  PromptCase AcceptReject(const SourceCase& request, const std::string& response,
                          const FeedbackSetup& setup, uint64_t seed) const;

  PromptCase Compare(const SourceCase& request, const AgentAssignment& agents,
                     const FeedbackSetup& setup, uint64_t seed) const;

 private:
  std::string WithReason(std::string text, bool reason) const;

  const TemplateSet& templates_;
};

// Recommendation payload shown to the simulator for a Reddit comment: titles
// only, or the full comment text when explanations are shown.
std::string RecommendationPayload(const Comment& comment, bool with_explanation);

}  // namespace usersim

#endif  // USERSIM_PERSONA_H_
