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

#ifndef USERSIM_TEXT_H_
#define USERSIM_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace usersim {

std::string ToLowerAscii(std::string_view s);
std::string_view TrimView(std::string_view s);
std::string Trim(std::string_view s);
bool StartsWithIgnoreCase(std::string_view s, std::string_view prefix);

// Number of Unicode code points in a UTF-8 string. Continuation bytes are not
// counted, so malformed input degrades gracefully.
size_t Utf8Length(std::string_view s);

// Canonical item key for a (title, year) pair.
//
// Rule set, applied in order:
//   1. a trailing "(yyyy)" equal to `year` is removed from the title;
//   2. an inverted trailing article ("Matrix, The") is removed;
//   3. Latin-1 / Latin Extended-A letters are folded to ASCII, "&" -> "and";
//   4. ASCII is lowercased; '-', '/', ':', '_', Unicode dashes and middle
//      dots become spaces; other punctuation is removed;
//   5. whitespace is collapsed;
//   6. leading "the" / "a" / "an" words are dropped while more than one word
//      remains;
//   7. " (yyyy)" is appended.
// The rule is idempotent: NormalizeTitle(TitlePart(k), year) == k.
// Throws std::invalid_argument for an empty result.
std::string NormalizeTitle(std::string_view title, int year);

// Splits "Title (yyyy)" into ("Title", yyyy). Returns nullopt when there is
// no trailing four-digit year in parentheses.
std::optional<std::pair<std::string, int>> SplitTitleYear(std::string_view s);

// "Matrix, The" -> "The Matrix". Leaves other titles unchanged.
std::string DeinvertTitle(std::string_view title);

// Lowercase word tokens: split on ASCII non-alphanumerics, drop empties.
// Bytes >= 0x80 count as word characters so UTF-8 words stay whole.
std::vector<std::string> Tokenize(std::string_view text);

// Levenshtein distance over bytes.
size_t EditDistance(std::string_view a, std::string_view b);

std::string JoinStrings(const std::vector<std::string>& parts,
                        std::string_view sep);

// Formats a UTC unix timestamp as "YYYY-MM-DD HH:MM:SS".
std::string FormatUtc(int64_t unix_seconds);

// Calendar year of a UTC unix timestamp.
int UtcYear(int64_t unix_seconds);

}  // namespace usersim

#endif  // USERSIM_TEXT_H_
