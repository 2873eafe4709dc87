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

#ifndef USERSIM_CORPUS_H_
#define USERSIM_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace usersim {

// Items released after this year are rejected at ingest.
inline constexpr int kMaxItemYear = 2021;
inline constexpr int kCaseSchemaVersion = 1;

enum class Dataset { kRedial, kReddit, kMovieLens, kImdb };

std::string_view DatasetName(Dataset d);
std::optional<Dataset> ParseDataset(std::string_view name);

struct Item {
  std::string canonical_key;
  std::string title;  // display form, article not inverted
  int year = 0;
  std::map<std::string, std::string> source_ids;  // dataset name -> native id

  // "Title (yyyy)", the form used inside prompts.
  std::string Display() const;
};

// Builds an item from a title and year. Returns nullopt when the year is past
// kMaxItemYear. Throws std::invalid_argument for an empty normalized title.
std::optional<Item> MakeItem(std::string_view title, int year);

// Builds an item from "Title (yyyy)". Returns nullopt when there is no year or
// the year is past kMaxItemYear.
std::optional<Item> MakeItemFromLabel(std::string_view label);

// Lightweight reference to a catalog item as stored inside cases.
struct ItemRef {
  std::string key;
  std::string display;

  friend bool operator==(const ItemRef&, const ItemRef&) = default;
};

ItemRef RefOf(const Item& item);

class ItemCatalog {
 public:
  // Inserts (or merges source ids into) an item and adds `count` to its
  // mention count. Returns the stored item.
  const Item& Admit(const Item& item, int64_t count = 1);

  const Item* Find(std::string_view key) const;
  int64_t CountOf(std::string_view key) const;
  size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

  const std::map<std::string, Item, std::less<>>& items() const {
    return items_;
  }
  const std::map<std::string, int64_t, std::less<>>& counts() const {
    return counts_;
  }

  void Merge(const ItemCatalog& other);

  nlohmann::json ToJson() const;
  static ItemCatalog FromJson(const nlohmann::json& j);

 private:
  std::map<std::string, Item, std::less<>> items_;
  std::map<std::string, int64_t, std::less<>> counts_;
};

struct MovieRating {
  std::string display;
  int64_t num_ratings = 0;
  // Sum of ratings in half-star units; keeps the mean exact.
  int64_t half_star_sum = 0;
  // Ratings at or above the like threshold.
  int64_t num_liked = 0;

  double AverageRating() const {
    return static_cast<double>(half_star_sum) / (2.0 * num_ratings);
  }
  double LikedFraction() const {
    return static_cast<double>(num_liked) / static_cast<double>(num_ratings);
  }
};

struct RatingStats {
  std::map<std::string, MovieRating, std::less<>> per_movie;
  double like_threshold = 3.5;

  nlohmann::json ToJson() const;
  static RatingStats FromJson(const nlohmann::json& j);
};

struct Review {
  ItemRef movie;
  std::string title;
  std::string body;
};

struct Comment {
  std::string id;
  std::string text;
  std::vector<ItemRef> items;
};

struct SourceCase {
  Dataset dataset = Dataset::kRedial;
  std::string id;
  std::vector<ItemRef> mentioned_items;
  // IMDB: the user's reviews in dataset order.
  std::vector<Review> reviews;
  // Reddit: post creation time.
  std::optional<int64_t> timestamp_utc;
  std::optional<std::string> request_text;
  std::optional<int64_t> request_length;  // code points of request_text
  std::vector<ItemRef> request_items;
  // Reddit: exactly one retained head comment.
  std::vector<Comment> thread_comments;

  nlohmann::json ToJson() const;
  static SourceCase FromJson(const nlohmann::json& j);
};

struct IngestCounters {
  int64_t records_read = 0;
  int64_t malformed = 0;
  int64_t excluded = 0;
  std::map<std::string, int64_t> reasons;  // exclusion reason -> count

  void Exclude(const std::string& reason) {
    ++excluded;
    ++reasons[reason];
  }
  nlohmann::json ToJson() const;
};

struct IngestResult {
  std::vector<SourceCase> cases;
  ItemCatalog catalog;
  IngestCounters counters;
};

// ReDial conversations (JSON lines as released). Only seeker (initiator)
// messages contribute mentions, in utterance order, deduplicated.
IngestResult IngestRedial(std::istream& in);

// Decides whether a Reddit request is about movies.
using RequestPredicate =
    std::function<bool(std::string_view title, std::string_view body,
                       std::string_view flair)>;

// Default request filter: rejects posts whose flair or title names a TV show
// or series.
RequestPredicate DefaultMovieRequestFilter();

struct RedditOptions {
  uint64_t seed = 0;
  RequestPredicate is_movie_request = DefaultMovieRequestFilter();
};

// Reddit requests (one JSON object per line, see docs/data-formats.md).
IngestResult IngestReddit(std::istream& in, const RedditOptions& options);

struct MovieLensOptions {
  double like_threshold = 3.5;
};

struct MovieLensResult {
  RatingStats stats;
  ItemCatalog catalog;
  IngestCounters counters;
};

// MovieLens movies.csv + ratings.csv. Means are exact over every admitted
// rating. Throws DataError if no rating survives.
MovieLensResult IngestMovieLens(std::istream& movies_csv,
                                std::istream& ratings_csv,
                                const MovieLensOptions& options = {});

inline constexpr int kImdbMinReviews = 11;

// IMDB reviews (one JSON object per line). Users with fewer than
// kImdbMinReviews admitted reviews are excluded.
IngestResult IngestImdb(std::istream& in);

struct GroupSpec {
  std::string name;
  int64_t min_count = 1;                 // inclusive
  std::optional<int64_t> max_count;      // inclusive
  size_t sample_size = 0;

  bool Admits(int64_t n) const {
    return n >= min_count && (!max_count || n <= *max_count);
  }
};

// frequent: >= 5000 ratings, 200 movies; infrequent: 51..499 ratings, 200
// movies; random (optional): any count, 300 movies.
std::vector<GroupSpec> DefaultGroupSpecs(bool include_random = false);

// Uniform sampling without replacement among eligible movies. Throws
// DataError naming the group when the pool is too small.
std::map<std::string, std::vector<std::string>> SampleMovieGroups(
    const RatingStats& stats, const std::vector<GroupSpec>& specs,
    uint64_t seed);

// JSONL persistence for cases.
void WriteCases(const std::filesystem::path& path,
                const std::vector<SourceCase>& cases);
std::vector<SourceCase> ReadCases(const std::filesystem::path& path);

}  // namespace usersim

#endif  // USERSIM_CORPUS_H_
