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

#include "usersim/parsers.h"

#include <algorithm>
#include <regex>

#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

std::string_view OutcomeKindName(OutcomeKind k) {
  switch (k) {
    case OutcomeKind::kItemList: return "item_list";
    case OutcomeKind::kBinary: return "binary";
    case OutcomeKind::kAcceptReject: return "accept_reject";
    case OutcomeKind::kAgentChoice: return "agent_choice";
    case OutcomeKind::kFreeText: return "free_text";
  }
  return "free_text";
}

std::string ParsedItem::Category() const {
  if (key) return *key;
  try {
    return "unmatched:" + NormalizeTitle(raw, year);
  } catch (const std::invalid_argument&) {
    return "unmatched:" + ToLowerAscii(raw);
  }
}

size_t ParsedOutcome::matched() const {
  return static_cast<size_t>(
      std::count_if(items.begin(), items.end(), [](const ParsedItem& i) { return i.key.has_value(); }));
}

json ParsedOutcome::ToJson() const {
  json j = {{"kind", OutcomeKindName(kind)}, {"valid", valid}};
  if (kind == OutcomeKind::kItemList) {
    json a = json::array();
    for (const auto& it : items) {
      json e = {{"raw", it.raw}, {"year", it.year}, {"category", it.Category()}};
      if (it.fuzzy) e["fuzzy"] = true;
      a.push_back(std::move(e));
    }
    j["items"] = std::move(a);
  }
  if (binary) j["binary"] = *binary == BinaryAnswer::kYes ? "yes" : "no";
  if (feedback) j["feedback"] = *feedback == FeedbackLabel::kAccept ? "accept" : "reject";
  if (choice) {
    j["choice"] = *choice == AgentChoice::kAgent1   ? "agent1"
                  : *choice == AgentChoice::kAgent2 ? "agent2"
                                                    : "neither";
  }
  if (!text.empty()) j["text"] = text;
  return j;
}

// ---------------------------------------------------------------------------
// Catalog matching

namespace {

constexpr size_t kYearSuffix = 7;  // " (yyyy)"

std::string_view TitlePart(std::string_view key) {
  return key.size() > kYearSuffix ? key.substr(0, key.size() - kYearSuffix) : key;
}

}  // namespace

CatalogMatcher::CatalogMatcher(const ItemCatalog& catalog, double fuzzy_threshold)
    : threshold_(fuzzy_threshold) {
  for (const auto& [key, item] : catalog.items()) {
    keys_.emplace(key, item.year);
    by_year_[item.year].push_back(key);
  }
}

bool CatalogMatcher::Contains(std::string_view key) const { return keys_.count(key) > 0; }

std::optional<std::pair<std::string, double>> CatalogMatcher::Fuzzy(std::string_view key,
                                                                   int year) const {
  auto bucket = by_year_.find(year);
  if (bucket == by_year_.end()) return std::nullopt;
  const std::string_view q = TitlePart(key);
  std::optional<std::pair<std::string, double>> best;
  for (const auto& cand : bucket->second) {
    const std::string_view c = TitlePart(cand);
    const double longer = static_cast<double>(std::max(q.size(), c.size()));
    const double len_gap = q.size() > c.size() ? q.size() - c.size() : c.size() - q.size();
    if (len_gap / longer > threshold_) continue;
    const double d = static_cast<double>(EditDistance(q, c)) / longer;
    if (d <= threshold_ && (!best || d < best->second)) best.emplace(cand, d);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Item lists

namespace {

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

// Quote and emphasis marks, ASCII and the UTF-8 curly forms.
size_t QuoteLen(std::string_view s, bool at_end) {
  static const std::string_view kMulti[] = {"\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x98",
                                            "\xE2\x80\x99"};
  for (auto q : kMulti) {
    if (at_end ? s.ends_with(q) : s.starts_with(q)) return q.size();
  }
  if (s.empty()) return 0;
  const char c = at_end ? s.back() : s.front();
  return (c == '"' || c == '\'' || c == '*' || c == '_' || c == '`') ? 1 : 0;
}

std::string_view StripDecoration(std::string_view s) {
  for (bool changed = true; changed;) {
    changed = false;
    s = TrimView(s);
    if (size_t n = QuoteLen(s, false)) s.remove_prefix(n), changed = true;
    if (size_t n = QuoteLen(s, true)) s.remove_suffix(n), changed = true;
    while (!s.empty() && (s.back() == ',' || s.back() == ':' || s.back() == '-' || s.back() == ';')) {
      s.remove_suffix(1);
      changed = true;
    }
    while (!s.empty() && (s.front() == ',' || s.front() == ';' || s.front() == ':' ||
                          s.front() == '&' || s.front() == ')')) {
      s.remove_prefix(1);
      changed = true;
    }
  }
  return s;
}

std::string_view StripListMarker(std::string_view s) {
  static const std::regex kMarker(R"(^\s*(?:[-*+>#]+|\d{1,3}[.):]|\xE2\x80\xA2)\s+)");
  for (;;) {
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(s.begin(), s.end(), m, kMarker)) return s;
    s.remove_prefix(static_cast<size_t>(m.length(0)));
  }
}

std::string_view StripLeadingConjunction(std::string_view s) {
  for (std::string_view w : {"and ", "or ", "also "}) {
    if (StartsWithIgnoreCase(s, w)) return TrimView(s.substr(w.size()));
  }
  return s;
}

std::vector<std::string_view> SplitOnSpace(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && IsSpace(s[i])) ++i;
    const size_t start = i;
    while (i < s.size() && !IsSpace(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Title guess for an unmatched segment: the text after the last clause break.
std::string_view UnmatchedTitle(std::string_view seg) {
  size_t cut = 0;
  for (std::string_view sep : {", ", "; ", ". ", "! ", "? "}) {
    const size_t p = seg.rfind(sep);
    if (p != std::string_view::npos) cut = std::max(cut, p + sep.size());
  }
  return StripDecoration(StripLeadingConjunction(StripDecoration(seg.substr(cut))));
}

std::optional<std::string> TryKey(std::string_view title, int year) {
  try {
    return NormalizeTitle(title, year);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

constexpr size_t kFuzzyMaxWords = 10;

ParsedItem MatchSegment(std::string_view seg, int year, const CatalogMatcher& matcher) {
  ParsedItem item;
  item.year = year;
  const auto words = SplitOnSpace(seg);
  for (size_t i = 0; i < words.size(); ++i) {
    const std::string_view suffix =
        StripDecoration(seg.substr(static_cast<size_t>(words[i].data() - seg.data())));
    auto key = TryKey(suffix, year);
    if (key && matcher.Contains(*key)) {
      item.raw = std::string(suffix);
      item.key = std::move(key);
      return item;
    }
  }
  std::optional<std::pair<std::string, double>> best;
  std::string best_raw;
  const size_t first = words.size() > kFuzzyMaxWords ? words.size() - kFuzzyMaxWords : 0;
  for (size_t i = first; i < words.size(); ++i) {
    const std::string_view suffix =
        StripDecoration(seg.substr(static_cast<size_t>(words[i].data() - seg.data())));
    auto key = TryKey(suffix, year);
    if (!key) continue;
    auto cand = matcher.Fuzzy(*key, year);
    if (cand && (!best || cand->second < best->second)) {
      best = std::move(cand);
      best_raw = std::string(suffix);
    }
  }
  if (best) {
    item.raw = std::move(best_raw);
    item.key = best->first;
    item.fuzzy = true;
    return item;
  }
  item.raw = std::string(UnmatchedTitle(seg));
  return item;
}

}  // namespace

ParsedOutcome ParseItemList(std::string_view raw_text, const CatalogMatcher& matcher) {
  static const std::regex kYear(R"([\(\[]\s*(\d{4})\s*[\)\]])");
  ParsedOutcome out;
  out.kind = OutcomeKind::kItemList;
  size_t prev_end = 0;
  auto begin = std::regex_iterator<std::string_view::const_iterator>(raw_text.begin(),
                                                                     raw_text.end(), kYear);
  for (auto it = begin; it != decltype(begin)(); ++it) {
    const auto& m = *it;
    const auto pos = static_cast<size_t>(m.position(0));
    size_t start = prev_end;
    const size_t nl = raw_text.rfind('\n', pos == 0 ? 0 : pos - 1);
    if (nl != std::string_view::npos && nl + 1 > start && nl < pos) start = nl + 1;
    prev_end = pos + static_cast<size_t>(m.length(0));
    std::string_view seg = raw_text.substr(start, pos - start);
    seg = StripDecoration(StripLeadingConjunction(StripDecoration(StripListMarker(seg))));
    if (seg.empty()) continue;
    const int year = std::stoi(m.str(1));
    ParsedItem item = MatchSegment(seg, year, matcher);
    if (item.raw.empty()) continue;
    out.items.push_back(std::move(item));
  }
  out.valid = !out.items.empty();
  return out;
}

// ---------------------------------------------------------------------------
// Short answers

namespace {

// First alphabetic word, lowercased, and the text after it.
std::pair<std::string, std::string_view> LeadingWord(std::string_view s) {
  size_t i = 0;
  while (i < s.size() && !std::isalpha(static_cast<unsigned char>(s[i]))) {
    if (static_cast<unsigned char>(s[i]) >= 0x80) {
      // Curly quotes and other non-ASCII punctuation before the word.
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(s[i]))) return {"", s};
    ++i;
  }
  size_t j = i;
  while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
  return {ToLowerAscii(s.substr(i, j - i)), s.substr(j)};
}

std::string_view StripLeadPunct(std::string_view s) {
  s = TrimView(s);
  while (!s.empty() && (s.front() == '.' || s.front() == ',' || s.front() == '!' ||
                        s.front() == ':' || s.front() == ';' || s.front() == '-' ||
                        s.front() == '*' || s.front() == '"' || s.front() == '\'')) {
    s.remove_prefix(1);
    s = TrimView(s);
  }
  return s;
}

}  // namespace

ParsedOutcome ParseBinary(std::string_view raw_text) {
  ParsedOutcome out;
  out.kind = OutcomeKind::kBinary;
  const auto [word, rest] = LeadingWord(raw_text);
  if (word == "yes") {
    out.binary = BinaryAnswer::kYes;
  } else if (word == "no") {
    out.binary = BinaryAnswer::kNo;
  }
  out.valid = out.binary.has_value();
  return out;
}

ParsedOutcome ParseAcceptReject(std::string_view raw_text) {
  ParsedOutcome out;
  out.kind = OutcomeKind::kAcceptReject;
  const auto [word, rest] = LeadingWord(raw_text);
  if (word == "accept" || word == "accepted") {
    out.feedback = FeedbackLabel::kAccept;
  } else if (word == "reject" || word == "rejected") {
    out.feedback = FeedbackLabel::kReject;
  }
  out.valid = out.feedback.has_value();
  if (out.valid) out.text = std::string(StripLeadPunct(rest));
  return out;
}

ParsedOutcome ParseAgentChoice(std::string_view raw_text) {
  static const std::regex kAgent(R"(agent\s*#?\s*([12])\b)", std::regex::icase);
  static const std::regex kNeither(R"(\bneither\b)", std::regex::icase);
  ParsedOutcome out;
  out.kind = OutcomeKind::kAgentChoice;
  std::match_results<std::string_view::const_iterator> agent, neither;
  const bool has_agent = std::regex_search(raw_text.begin(), raw_text.end(), agent, kAgent);
  const bool has_neither =
      std::regex_search(raw_text.begin(), raw_text.end(), neither, kNeither);
  if (has_neither && (!has_agent || neither.position(0) < agent.position(0))) {
    out.choice = AgentChoice::kNeither;
  } else if (has_agent) {
    out.choice = agent.str(1) == "1" ? AgentChoice::kAgent1 : AgentChoice::kAgent2;
  }
  out.valid = out.choice.has_value();
  return out;
}

ParsedOutcome ParseFreeText(std::string_view raw_text) {
  ParsedOutcome out;
  out.kind = OutcomeKind::kFreeText;
  out.valid = !TrimView(raw_text).empty();
  if (out.valid) out.text = std::string(raw_text);
  return out;
}

}  // namespace usersim
