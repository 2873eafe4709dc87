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

#include "usersim/text.h"

#include <time.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

namespace usersim {
namespace {

bool IsAsciiAlnum(unsigned char c) { return c < 0x80 && std::isalnum(c); }

// Base letters for U+0100..U+017F, one char per code point.
constexpr std::string_view kLatinExtA =
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIiJjJjKkkLlLlLlLlLlNnNnNn"
    "nNnOoOoOoOoRrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";
static_assert(kLatinExtA.size() == 0x80);

// ASCII replacement for U+00C0..U+00FF. Empty entries are dropped.
constexpr std::array<std::string_view, 64> kLatin1 = {
    "A", "A", "A", "A", "A", "A", "AE", "C", "E", "E", "E", "E", "I",
    "I", "I", "I", "D", "N", "O", "O", "O", "O", "O", "",   "O", "U",
    "U", "U", "U", "Y", "TH", "ss", "a", "a", "a", "a", "a", "a", "ae",
    "c", "e", "e", "e", "e", "i", "i", "i", "i", "d", "n", "o", "o",
    "o", "o", "o", "",  "o", "u", "u", "u", "u", "y", "th", "y"};

// Decodes one UTF-8 code point at s[i]; advances i. Invalid bytes decode as
// themselves.
char32_t DecodeUtf8(std::string_view s, size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](size_t k) -> unsigned {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) & 0x3F : 0;
  };
  if (b0 < 0x80) {
    i += 1;
    return b0;
  }
  if ((b0 >> 5) == 0x6 && i + 1 < s.size()) {
    char32_t cp = ((b0 & 0x1F) << 6) | cont(1);
    i += 2;
    return cp;
  }
  if ((b0 >> 4) == 0xE && i + 2 < s.size()) {
    char32_t cp = ((b0 & 0x0F) << 12) | (cont(1) << 6) | cont(2);
    i += 3;
    return cp;
  }
  if ((b0 >> 3) == 0x1E && i + 3 < s.size()) {
    char32_t cp = ((b0 & 0x07) << 18) | (cont(1) << 12) | (cont(2) << 6) |
                  cont(3);
    i += 4;
    return cp;
  }
  i += 1;
  return b0;
}

// Folds diacritics and maps punctuation per the key rule. Output is ASCII
// except for code points with no folding, which are kept verbatim.
std::string FoldForKey(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    const size_t start = i;
    const char32_t cp = DecodeUtf8(s, i);
    if (cp < 0x80) {
      const auto c = static_cast<unsigned char>(cp);
      if (IsAsciiAlnum(c)) {
        out.push_back(static_cast<char>(std::tolower(c)));
      } else if (c == '&') {
        out += " and ";
      } else if (c == '-' || c == '/' || c == ':' || c == '_' ||
                 std::isspace(c)) {
        out.push_back(' ');
      }
      // Any other ASCII punctuation is removed.
      continue;
    }
    std::string_view folded;
    if (cp >= 0xC0 && cp <= 0xFF) {
      folded = kLatin1[cp - 0xC0];
    } else if (cp >= 0x100 && cp <= 0x17F) {
      if (cp == 0x132 || cp == 0x133) {
        folded = "ij";
      } else if (cp == 0x152 || cp == 0x153) {
        folded = "oe";
      } else {
        folded = kLatinExtA.substr(cp - 0x100, 1);
      }
    } else if ((cp >= 0x2010 && cp <= 0x2015) || cp == 0xB7 || cp == 0x2027) {
      out.push_back(' ');  // dashes, middle dots
      continue;
    } else if ((cp >= 0x2016 && cp <= 0x206F) || cp == 0xA0 ||
               (cp >= 0x80 && cp < 0xC0)) {
      if (cp == 0xA0) out.push_back(' ');
      continue;  // general punctuation, Latin-1 symbols
    } else {
      out.append(s.substr(start, i - start));
      continue;
    }
    for (char c : folded) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::vector<std::string> SplitWords(std::string_view s) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) words.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

bool IsArticle(std::string_view w) {
  return w == "the" || w == "a" || w == "an";
}

// Strips a trailing inverted English article: "Matrix, The" -> "Matrix".
std::string_view StripInvertedArticle(std::string_view title,
                                      std::string* article) {
  for (std::string_view art : {"The", "A", "An"}) {
    const std::string suffix = std::string(", ") + std::string(art);
    if (title.size() > suffix.size()) {
      const std::string_view tail = title.substr(title.size() - suffix.size());
      if (ToLowerAscii(tail) == ToLowerAscii(suffix)) {
        if (article != nullptr) *article = std::string(art);
        return title.substr(0, title.size() - suffix.size());
      }
    }
  }
  return title;
}

}  // namespace

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view TrimView(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string Trim(std::string_view s) { return std::string(TrimView(s)); }

bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

size_t Utf8Length(std::string_view s) {
  size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::optional<std::pair<std::string, int>> SplitTitleYear(std::string_view s) {
  s = TrimView(s);
  if (s.size() < 6 || s.back() != ')') return std::nullopt;
  const size_t open = s.rfind('(');
  if (open == std::string_view::npos || s.size() - open != 6) {
    return std::nullopt;
  }
  int year = 0;
  for (size_t i = open + 1; i < open + 5; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    year = year * 10 + (s[i] - '0');
  }
  return std::make_pair(Trim(s.substr(0, open)), year);
}

std::string DeinvertTitle(std::string_view title) {
  std::string article;
  const std::string_view base = StripInvertedArticle(TrimView(title), &article);
  if (article.empty()) return Trim(title);
  return article + " " + Trim(base);
}

std::string NormalizeTitle(std::string_view title, int year) {
  std::string_view t = TrimView(title);
  if (auto split = SplitTitleYear(t); split && split->second == year) {
    t = TrimView(t.substr(0, t.rfind('(')));
  }
  t = StripInvertedArticle(t, nullptr);
  std::vector<std::string> words = SplitWords(FoldForKey(t));
  size_t first = 0;
  while (words.size() - first > 1 && IsArticle(words[first])) ++first;
  std::string key;
  for (size_t i = first; i < words.size(); ++i) {
    if (!key.empty()) key.push_back(' ');
    key += words[i];
  }
  if (key.empty()) {
    throw std::invalid_argument("title normalizes to empty key: '" +
                                std::string(title) + "'");
  }
  key += " (" + std::to_string(year) + ")";
  return key;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

size_t EditDistance(std::string_view a, std::string_view b) {
  std::vector<size_t> prev(b.size() + 1);
  std::vector<size_t> cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string JoinStrings(const std::vector<std::string>& parts,
                        std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string FormatUtc(int64_t unix_seconds) {
  const time_t t = static_cast<time_t>(unix_seconds);
  struct tm tm_utc {};
  gmtime_r(&t, &tm_utc);
  char buf[32];
  strftime(buf, sizeof(buf), "%Y-%m-%d %H:%M:%S", &tm_utc);
  return buf;
}

int UtcYear(int64_t unix_seconds) {
  const time_t t = static_cast<time_t>(unix_seconds);
  struct tm tm_utc {};
  gmtime_r(&t, &tm_utc);
  return tm_utc.tm_year + 1900;
}

}  // namespace usersim
