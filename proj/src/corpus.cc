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

#include "usersim/corpus.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <boost/tokenizer.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <regex>
#include <set>
#include <unordered_map>

#include "usersim/error.h"
#include "usersim/rng.h"
#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

std::string_view DatasetName(Dataset d) {
  switch (d) {
    case Dataset::kRedial:
      return "redial";
    case Dataset::kReddit:
      return "reddit";
    case Dataset::kMovieLens:
      return "movielens";
    case Dataset::kImdb:
      return "imdb";
  }
  return "unknown";
}

std::optional<Dataset> ParseDataset(std::string_view name) {
  const std::string n = ToLowerAscii(name);
  if (n == "redial") return Dataset::kRedial;
  if (n == "reddit") return Dataset::kReddit;
  if (n == "movielens") return Dataset::kMovieLens;
  if (n == "imdb") return Dataset::kImdb;
  return std::nullopt;
}

std::string Item::Display() const {
  return title + " (" + std::to_string(year) + ")";
}

std::optional<Item> MakeItem(std::string_view title, int year) {
  if (year > kMaxItemYear) return std::nullopt;
  Item item;
  item.title = DeinvertTitle(title);
  item.year = year;
  item.canonical_key = NormalizeTitle(title, year);
  return item;
}

std::optional<Item> MakeItemFromLabel(std::string_view label) {
  auto split = SplitTitleYear(label);
  if (!split) return std::nullopt;
  return MakeItem(split->first, split->second);
}

ItemRef RefOf(const Item& item) { return {item.canonical_key, item.Display()}; }

// ---------------------------------------------------------------------------
// ItemCatalog

const Item& ItemCatalog::Admit(const Item& item, int64_t count) {
  auto [it, inserted] = items_.try_emplace(item.canonical_key, item);
  if (!inserted) {
    for (const auto& [ds, id] : item.source_ids) it->second.source_ids[ds] = id;
  }
  counts_[item.canonical_key] += count;
  return it->second;
}

const Item* ItemCatalog::Find(std::string_view key) const {
  auto it = items_.find(key);
  return it == items_.end() ? nullptr : &it->second;
}

int64_t ItemCatalog::CountOf(std::string_view key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

void ItemCatalog::Merge(const ItemCatalog& other) {
  for (const auto& [key, item] : other.items_) Admit(item, other.CountOf(key));
}

json ItemCatalog::ToJson() const {
  json items = json::array();
  for (const auto& [key, item] : items_) {
    items.push_back({{"key", key},
                     {"title", item.title},
                     {"year", item.year},
                     {"source_ids", item.source_ids},
                     {"count", CountOf(key)}});
  }
  return {{"schema_version", kCaseSchemaVersion}, {"items", std::move(items)}};
}

ItemCatalog ItemCatalog::FromJson(const json& j) {
  ItemCatalog catalog;
  for (const auto& e : j.at("items")) {
    Item item;
    item.canonical_key = e.at("key").get<std::string>();
    item.title = e.at("title").get<std::string>();
    item.year = e.at("year").get<int>();
    if (e.contains("source_ids")) {
      item.source_ids = e.at("source_ids").get<std::map<std::string, std::string>>();
    }
    const int64_t count = e.value("count", int64_t{0});
    if (count < 0) throw DataError("negative count for " + item.canonical_key);
    catalog.Admit(item, count);
  }
  return catalog;
}

// ---------------------------------------------------------------------------
// Serialization

json RatingStats::ToJson() const {
  json movies = json::object();
  for (const auto& [key, m] : per_movie) {
    movies[key] = {{"display", m.display},
                   {"num_ratings", m.num_ratings},
                   {"half_star_sum", m.half_star_sum},
                   {"num_liked", m.num_liked},
                   {"avg_rating", m.AverageRating()}};
  }
  return {{"schema_version", kCaseSchemaVersion},
          {"like_threshold", like_threshold},
          {"movies", std::move(movies)}};
}

RatingStats RatingStats::FromJson(const json& j) {
  RatingStats stats;
  stats.like_threshold = j.value("like_threshold", 3.5);
  for (const auto& [key, m] : j.at("movies").items()) {
    MovieRating r;
    r.display = m.at("display").get<std::string>();
    r.num_ratings = m.at("num_ratings").get<int64_t>();
    r.half_star_sum = m.at("half_star_sum").get<int64_t>();
    r.num_liked = m.value("num_liked", int64_t{0});
    if (r.num_ratings < 1) throw DataError("movie without ratings: " + key);
    stats.per_movie.emplace(key, std::move(r));
  }
  return stats;
}

namespace {

json RefsToJson(const std::vector<ItemRef>& refs) {
  json a = json::array();
  for (const auto& r : refs) a.push_back({{"key", r.key}, {"display", r.display}});
  return a;
}

std::vector<ItemRef> RefsFromJson(const json& a) {
  std::vector<ItemRef> refs;
  for (const auto& e : a) {
    refs.push_back({e.at("key").get<std::string>(),
                    e.at("display").get<std::string>()});
  }
  return refs;
}

}  // namespace

json SourceCase::ToJson() const {
  json j = {{"schema_version", kCaseSchemaVersion},
            {"dataset", DatasetName(dataset)},
            {"id", id},
            {"mentioned_items", RefsToJson(mentioned_items)}};
  if (!reviews.empty()) {
    json rs = json::array();
    for (const auto& r : reviews) {
      rs.push_back({{"movie", {{"key", r.movie.key}, {"display", r.movie.display}}},
                    {"title", r.title},
                    {"body", r.body}});
    }
    j["reviews"] = std::move(rs);
  }
  if (timestamp_utc) j["timestamp_utc"] = *timestamp_utc;
  if (request_text) j["request_text"] = *request_text;
  if (request_length) j["request_length"] = *request_length;
  if (!request_items.empty()) j["request_items"] = RefsToJson(request_items);
  if (!thread_comments.empty()) {
    json cs = json::array();
    for (const auto& c : thread_comments) {
      cs.push_back({{"id", c.id}, {"text", c.text}, {"items", RefsToJson(c.items)}});
    }
    j["thread_comments"] = std::move(cs);
  }
  return j;
}

SourceCase SourceCase::FromJson(const json& j) {
  const int version = j.value("schema_version", 0);
  if (version != kCaseSchemaVersion) {
    throw DataError("unsupported case schema version " + std::to_string(version));
  }
  SourceCase c;
  auto ds = ParseDataset(j.at("dataset").get<std::string>());
  if (!ds) throw DataError("unknown dataset in case record");
  c.dataset = *ds;
  c.id = j.at("id").get<std::string>();
  c.mentioned_items = RefsFromJson(j.at("mentioned_items"));
  if (j.contains("reviews")) {
    for (const auto& r : j["reviews"]) {
      c.reviews.push_back({{r.at("movie").at("key").get<std::string>(),
                            r.at("movie").at("display").get<std::string>()},
                           r.at("title").get<std::string>(),
                           r.at("body").get<std::string>()});
    }
  }
  if (j.contains("timestamp_utc")) c.timestamp_utc = j["timestamp_utc"].get<int64_t>();
  if (j.contains("request_text")) c.request_text = j["request_text"].get<std::string>();
  if (j.contains("request_length")) {
    c.request_length = j["request_length"].get<int64_t>();
  }
  if (j.contains("request_items")) c.request_items = RefsFromJson(j["request_items"]);
  if (j.contains("thread_comments")) {
    for (const auto& e : j["thread_comments"]) {
      c.thread_comments.push_back({e.at("id").get<std::string>(),
                                   e.at("text").get<std::string>(),
                                   RefsFromJson(e.at("items"))});
    }
  }
  return c;
}

json IngestCounters::ToJson() const {
  return {{"records_read", records_read},
          {"malformed", malformed},
          {"excluded", excluded},
          {"reasons", reasons}};
}

void WriteCases(const std::filesystem::path& path,
                const std::vector<SourceCase>& cases) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& c : cases) out << c.ToJson().dump() << '\n';
}

std::vector<SourceCase> ReadCases(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<SourceCase> cases;
  std::string line;
  while (std::getline(in, line)) {
    if (TrimView(line).empty()) continue;
    cases.push_back(SourceCase::FromJson(json::parse(line)));
  }
  return cases;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

// Appends `ref` unless an item with the same key is already present.
void AppendUnique(std::vector<ItemRef>& refs, const ItemRef& ref) {
  for (const auto& r : refs) {
    if (r.key == ref.key) return;
  }
  refs.push_back(ref);
}

std::string IdString(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
  return v.dump();
}

// Resolves a "Title (yyyy)" label to a catalog item; records why it failed.
std::optional<Item> ResolveLabel(std::string_view label, Dataset ds,
                                 std::string_view native_id,
                                 IngestCounters& counters) {
  auto split = SplitTitleYear(label);
  if (!split) {
    ++counters.reasons["mention_without_year"];
    return std::nullopt;
  }
  if (split->second > kMaxItemYear) {
    ++counters.reasons["mention_after_2021"];
    return std::nullopt;
  }
  try {
    auto item = MakeItem(split->first, split->second);
    if (item && !native_id.empty()) {
      item->source_ids[std::string(DatasetName(ds))] = std::string(native_id);
    }
    return item;
  } catch (const std::invalid_argument&) {
    ++counters.reasons["mention_empty_title"];
    return std::nullopt;
  }
}

}  // namespace

IngestResult IngestRedial(std::istream& in) {
  static const std::regex kMention(R"(@(\d+))");
  IngestResult result;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimView(line).empty()) continue;
    ++result.counters.records_read;
    json conv;
    try {
      conv = json::parse(line);
      if (!conv.contains("messages") || !conv.contains("initiatorWorkerId")) {
        throw std::runtime_error("missing messages/initiatorWorkerId");
      }
    } catch (const std::exception& e) {
      ++result.counters.malformed;
      spdlog::warn("redial: skipping malformed record at line {}: {}", line_no,
                   e.what());
      continue;
    }
    const json& mentions = conv.contains("movieMentions") &&
                                   conv["movieMentions"].is_object()
                               ? conv["movieMentions"]
                               : json::object();
    const std::string seeker = IdString(conv["initiatorWorkerId"]);
    SourceCase c;
    c.dataset = Dataset::kRedial;
    c.id = conv.contains("conversationId") ? IdString(conv["conversationId"])
                                           : "line" + std::to_string(line_no);
    std::vector<Item> admitted;
    for (const auto& msg : conv["messages"]) {
      if (!msg.contains("senderWorkerId") ||
          IdString(msg["senderWorkerId"]) != seeker) {
        continue;
      }
      const std::string text = msg.value("text", "");
      for (auto it = std::sregex_iterator(text.begin(), text.end(), kMention);
           it != std::sregex_iterator(); ++it) {
        const std::string movie_id = (*it)[1].str();
        if (!mentions.contains(movie_id) || !mentions[movie_id].is_string()) {
          ++result.counters.reasons["mention_unannotated"];
          continue;
        }
        auto item = ResolveLabel(mentions[movie_id].get<std::string>(),
                                 Dataset::kRedial, movie_id, result.counters);
        if (!item) continue;
        const bool seen =
            std::any_of(c.mentioned_items.begin(), c.mentioned_items.end(),
                        [&](const ItemRef& r) { return r.key == item->canonical_key; });
        if (seen) continue;
        c.mentioned_items.push_back(RefOf(*item));
        admitted.push_back(std::move(*item));
      }
    }
    if (c.mentioned_items.empty()) {
      result.counters.Exclude("no_seeker_mentions");
      continue;
    }
    for (const auto& item : admitted) result.catalog.Admit(item);
    result.cases.push_back(std::move(c));
  }
  if (result.cases.empty()) {
    throw DataError("redial: no conversation admitted");
  }
  return result;
}

RequestPredicate DefaultMovieRequestFilter() {
  return [](std::string_view title, std::string_view /*body*/,
            std::string_view flair) {
    static const std::regex kTv(R"(\b(tv|television)\s*(show|shows|series)\b|\bseries\b|\bsitcoms?\b|\banime\b)",
                                std::regex::icase);
    const std::string t(title);
    const std::string f(flair);
    return !std::regex_search(f, kTv) && !std::regex_search(t, kTv);
  };
}

IngestResult IngestReddit(std::istream& in, const RedditOptions& options) {
  IngestResult result;
  const Rng root(options.seed);
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimView(line).empty()) continue;
    ++result.counters.records_read;
    json post;
    try {
      post = json::parse(line);
      if (!post.contains("id")) throw std::runtime_error("missing id");
    } catch (const std::exception& e) {
      ++result.counters.malformed;
      spdlog::warn("reddit: skipping malformed record at line {}: {}", line_no,
                   e.what());
      continue;
    }
    const std::string id = IdString(post["id"]);
    // 1. posts after 2021 (and posts without a timestamp).
    if (!post.contains("created_utc") || !post["created_utc"].is_number()) {
      spdlog::warn("reddit: request {} has no timestamp; excluded", id);
      result.counters.Exclude("missing_timestamp");
      continue;
    }
    const auto created = post["created_utc"].get<int64_t>();
    if (UtcYear(created) > kMaxItemYear) {
      result.counters.Exclude("post_after_2021");
      continue;
    }
    // 2. comments without (admissible) movie mentions.
    std::vector<Comment> comments;
    std::vector<std::vector<Item>> comment_items;
    if (post.contains("comments")) {
      for (const auto& cj : post["comments"]) {
        Comment comment;
        comment.id = cj.contains("id") ? IdString(cj["id"]) : "";
        comment.text = cj.value("body", cj.value("text", ""));
        std::vector<Item> items;
        for (const auto& label : cj.value("movies", json::array())) {
          if (!label.is_string()) continue;
          auto item = ResolveLabel(label.get<std::string>(), Dataset::kReddit,
                                   "", result.counters);
          if (!item) continue;
          const size_t before = comment.items.size();
          AppendUnique(comment.items, RefOf(*item));
          if (comment.items.size() > before) items.push_back(std::move(*item));
        }
        if (comment.items.empty()) continue;
        comments.push_back(std::move(comment));
        comment_items.push_back(std::move(items));
      }
    }
    // 3. requests that are not about movies.
    const std::string title = post.value("title", "");
    const std::string body = post.value("body", post.value("text", ""));
    const std::string flair =
        post.contains("flair") && post["flair"].is_string() ? post["flair"].get<std::string>() : "";
    if (!options.is_movie_request(title, body, flair)) {
      result.counters.Exclude("not_about_movies");
      continue;
    }
    if (comments.empty()) {
      result.counters.Exclude("no_commented_movies");
      continue;
    }
    // 4. one head comment per request.
    Rng rng = root.Derive(id);
    const size_t pick = rng.Uniform(comments.size());

    SourceCase c;
    c.dataset = Dataset::kReddit;
    c.id = id;
    c.timestamp_utc = created;
    std::string request = Trim(title);
    if (!TrimView(body).empty()) {
      request = request.empty() ? Trim(body) : request + ". " + Trim(body);
    }
    c.request_text = request;
    c.request_length = static_cast<int64_t>(Utf8Length(request));
    std::vector<Item> admitted;
    for (const auto& label : post.value("movies", json::array())) {
      if (!label.is_string()) continue;
      auto item = ResolveLabel(label.get<std::string>(), Dataset::kReddit, "",
                               result.counters);
      if (!item) continue;
      const size_t before = c.request_items.size();
      AppendUnique(c.request_items, RefOf(*item));
      if (c.request_items.size() > before) admitted.push_back(std::move(*item));
    }
    c.mentioned_items = c.request_items;
    for (const auto& ref : comments[pick].items) AppendUnique(c.mentioned_items, ref);
    for (auto& item : comment_items[pick]) admitted.push_back(std::move(item));
    c.thread_comments.push_back(std::move(comments[pick]));

    std::set<std::string> counted;
    for (const auto& item : admitted) {
      if (counted.insert(item.canonical_key).second) result.catalog.Admit(item);
    }
    result.cases.push_back(std::move(c));
  }
  if (result.cases.empty()) throw DataError("reddit: no request admitted");
  return result;
}

namespace {

// Strips a trailing alternate-title parenthetical: "Haine, La (Hate)" ->
// "Haine, La".
std::string StripAka(std::string title) {
  title = Trim(title);
  while (!title.empty() && title.back() == ')') {
    const size_t open = title.rfind(" (");
    if (open == std::string::npos || open == 0) break;
    title = Trim(title.substr(0, open));
  }
  return title;
}

}  // namespace

MovieLensResult IngestMovieLens(std::istream& movies_csv,
                                std::istream& ratings_csv,
                                const MovieLensOptions& options) {
  MovieLensResult result;
  result.stats.like_threshold = options.like_threshold;

  // movieId -> canonical key
  std::unordered_map<int64_t, std::string> id_to_key;
  std::string line;
  bool header = true;
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  while (std::getline(movies_csv, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    try {
      Tokenizer tok(line);
      fields.assign(tok.begin(), tok.end());
    } catch (const std::exception&) {
      ++result.counters.malformed;
      continue;
    }
    if (fields.size() < 2) {
      ++result.counters.malformed;
      continue;
    }
    int64_t movie_id = 0;
    if (std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), movie_id).ec !=
        std::errc()) {
      ++result.counters.malformed;
      continue;
    }
    auto split = SplitTitleYear(fields[1]);
    if (!split) {
      result.counters.Exclude("movie_without_year");
      continue;
    }
    if (split->second > kMaxItemYear) {
      result.counters.Exclude("movie_after_2021");
      continue;
    }
    std::optional<Item> item;
    try {
      item = MakeItem(StripAka(split->first), split->second);
    } catch (const std::invalid_argument&) {
      result.counters.Exclude("movie_empty_title");
      continue;
    }
    item->source_ids["movielens"] = std::to_string(movie_id);
    id_to_key.emplace(movie_id, item->canonical_key);
    const Item& stored = result.catalog.Admit(*item, 0);
    auto& rating = result.stats.per_movie[stored.canonical_key];
    rating.display = stored.Display();
  }

  header = true;
  const auto like_half_stars =
      static_cast<int64_t>(std::llround(options.like_threshold * 2.0));
  while (std::getline(ratings_csv, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++result.counters.records_read;
    // userId,movieId,rating,timestamp
    const char* p = line.data();
    const char* end = p + line.size();
    const char* c1 = std::find(p, end, ',');
    const char* c2 = c1 == end ? end : std::find(c1 + 1, end, ',');
    const char* c3 = c2 == end ? end : std::find(c2 + 1, end, ',');
    int64_t movie_id = 0;
    double rating = 0;
    if (c2 == end ||
        std::from_chars(c1 + 1, c2, movie_id).ec != std::errc() ||
        std::from_chars(c2 + 1, c3, rating).ec != std::errc()) {
      ++result.counters.malformed;
      continue;
    }
    const double half = rating * 2.0;
    if (rating < 0.5 || rating > 5.0 || half != std::floor(half)) {
      result.counters.Exclude("rating_out_of_scale");
      continue;
    }
    auto it = id_to_key.find(movie_id);
    if (it == id_to_key.end()) {
      result.counters.Exclude("rating_for_excluded_movie");
      continue;
    }
    auto& m = result.stats.per_movie[it->second];
    const auto half_stars = static_cast<int64_t>(half);
    ++m.num_ratings;
    m.half_star_sum += half_stars;
    if (half_stars >= like_half_stars) ++m.num_liked;
  }
  // Movies without ratings carry no statistics.
  for (auto it = result.stats.per_movie.begin(); it != result.stats.per_movie.end();) {
    if (it->second.num_ratings == 0) {
      it = result.stats.per_movie.erase(it);
    } else {
      ++it;
    }
  }
  if (result.stats.per_movie.empty()) {
    throw DataError("movielens: no rating admitted; empty stats are invalid");
  }
  ItemCatalog rated;
  for (const auto& [key, m] : result.stats.per_movie) {
    rated.Admit(*result.catalog.Find(key), m.num_ratings);
  }
  result.catalog = std::move(rated);
  if (result.counters.reasons.count("rating_out_of_scale") > 0) {
    spdlog::warn("movielens: rejected {} ratings outside [0.5, 5]",
                 result.counters.reasons["rating_out_of_scale"]);
  }
  return result;
}

IngestResult IngestImdb(std::istream& in) {
  IngestResult result;
  struct UserReviews {
    std::vector<Review> reviews;
    std::vector<Item> items;
  };
  std::vector<std::string> user_order;
  std::unordered_map<std::string, UserReviews> users;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimView(line).empty()) continue;
    ++result.counters.records_read;
    json r;
    try {
      r = json::parse(line);
      if (!r.contains("user_id") || !r.contains("movie")) {
        throw std::runtime_error("missing user_id/movie");
      }
    } catch (const std::exception& e) {
      ++result.counters.malformed;
      spdlog::warn("imdb: skipping malformed record at line {}: {}", line_no,
                   e.what());
      continue;
    }
    const std::string user = IdString(r["user_id"]);
    auto [it, inserted] = users.try_emplace(user);
    if (inserted) user_order.push_back(user);
    auto item = ResolveLabel(r["movie"].get<std::string>(), Dataset::kImdb,
                             r.contains("movie_id") ? IdString(r["movie_id"]) : "",
                             result.counters);
    if (!item) continue;  // post-2021 reviews are dropped, the user is kept
    it->second.reviews.push_back({RefOf(*item), r.value("review_title", ""),
                                  r.value("review", r.value("review_body", ""))});
    it->second.items.push_back(std::move(*item));
  }
  for (const auto& user : user_order) {
    auto& ur = users[user];
    if (ur.reviews.size() < static_cast<size_t>(kImdbMinReviews)) {
      result.counters.Exclude("fewer_than_11_reviews");
      continue;
    }
    SourceCase c;
    c.dataset = Dataset::kImdb;
    c.id = user;
    for (const auto& rv : ur.reviews) AppendUnique(c.mentioned_items, rv.movie);
    std::set<std::string> counted;
    for (const auto& item : ur.items) {
      if (counted.insert(item.canonical_key).second) result.catalog.Admit(item);
    }
    c.reviews = std::move(ur.reviews);
    result.cases.push_back(std::move(c));
  }
  if (result.cases.empty()) throw DataError("imdb: no user admitted");
  return result;
}

std::vector<GroupSpec> DefaultGroupSpecs(bool include_random) {
  std::vector<GroupSpec> specs = {
      {"frequent", 5000, std::nullopt, 200},
      {"infrequent", 51, 499, 200},
  };
  if (include_random) specs.push_back({"random", 1, std::nullopt, 300});
  return specs;
}

std::map<std::string, std::vector<std::string>> SampleMovieGroups(
    const RatingStats& stats, const std::vector<GroupSpec>& specs,
    uint64_t seed) {
  if (stats.per_movie.empty()) throw DataError("rating stats are empty");
  const Rng root(seed);
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& spec : specs) {
    std::vector<std::string> eligible;
    for (const auto& [key, m] : stats.per_movie) {
      if (spec.Admits(m.num_ratings)) eligible.push_back(key);
    }
    if (eligible.size() < spec.sample_size) {
      throw DataError("group '" + spec.name + "' has " +
                      std::to_string(eligible.size()) +
                      " eligible movies, needs " +
                      std::to_string(spec.sample_size));
    }
    Rng rng = root.Derive(spec.name);
    groups[spec.name] = rng.SampleWithoutReplacement(std::move(eligible), spec.sample_size);
  }
  return groups;
}

}  // namespace usersim
