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

#ifndef USERSIM_PARSERS_H_
#define USERSIM_PARSERS_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "usersim/corpus.h"

namespace usersim {

enum class OutcomeKind { kItemList, kBinary, kAcceptReject, kAgentChoice, kFreeText };
enum class BinaryAnswer { kYes, kNo };
enum class FeedbackLabel { kAccept, kReject };
enum class AgentChoice { kAgent1, kAgent2, kNeither };

std::string_view OutcomeKindName(OutcomeKind k);

struct ParsedItem {
  std::string raw;                 // title text as extracted, without year
  int year = 0;
  std::optional<std::string> key;  // catalog key when matched
  bool fuzzy = false;              // matched through the edit-distance fallback

  // Distribution category: the catalog key, or "unmatched:<normalized raw>".
  std::string Category() const;
};

struct ParsedOutcome {
  OutcomeKind kind = OutcomeKind::kFreeText;
  bool valid = false;
  std::vector<ParsedItem> items;
  std::optional<BinaryAnswer> binary;
  std::optional<FeedbackLabel> feedback;
  std::optional<AgentChoice> choice;
  // Explanation after an accept/reject token, or the T3 response.
  std::string text;

  size_t matched() const;
  nlohmann::json ToJson() const;
};

inline constexpr double kDefaultFuzzyThreshold = 0.15;

// Resolves extracted (title, year) pairs to catalog keys: exact canonical
// key first, then the closest same-year key within a normalized edit
// distance of `fuzzy_threshold` (distance / longer key length).
class CatalogMatcher {
 public:
  explicit CatalogMatcher(const ItemCatalog& catalog,
                          double fuzzy_threshold = kDefaultFuzzyThreshold);

  bool Contains(std::string_view key) const;
  // Best fuzzy candidate for a normalized key, with its normalized distance.
  std::optional<std::pair<std::string, double>> Fuzzy(std::string_view key,
                                                       int year) const;
  double threshold() const { return threshold_; }

 private:
  std::map<std::string, int, std::less<>> keys_;
  std::map<int, std::vector<std::string>> by_year_;
  double threshold_;
};

// Extracts "Title (yyyy)" entries from list-like or conversational text.
// Invalid when nothing is extractable.
ParsedOutcome ParseItemList(std::string_view raw_text, const CatalogMatcher& matcher);

// Leading yes/no after stripping punctuation and whitespace.
ParsedOutcome ParseBinary(std::string_view raw_text);

// Leading accept/reject; the rest of the reply is kept as the explanation.
ParsedOutcome ParseAcceptReject(std::string_view raw_text);

// Earliest "agent 1", "agent 2" or "neither" mention.
ParsedOutcome ParseAgentChoice(std::string_view raw_text);

// Any non-blank reply.
ParsedOutcome ParseFreeText(std::string_view raw_text);

}  // namespace usersim

#endif  // USERSIM_PARSERS_H_
