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

#include "usersim/persona.h"

#include <algorithm>
#include <boost/tokenizer.hpp>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "usersim/error.h"
#include "usersim/hash.h"
#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

std::string_view TaskName(Task t) {
  switch (t) {
    case Task::kT1:
      return "t1";
    case Task::kT2:
      return "t2";
    case Task::kT3:
      return "t3";
    case Task::kT4:
      return "t4";
    case Task::kT5:
      return "t5";
  }
  return "?";
}

std::optional<Task> ParseTask(std::string_view s) {
  const std::string n = ToLowerAscii(s);
  if (n == "t1") return Task::kT1;
  if (n == "t2") return Task::kT2;
  if (n == "t3") return Task::kT3;
  if (n == "t4") return Task::kT4;
  if (n == "t5") return Task::kT5;
  return std::nullopt;
}

std::string_view BaselineName(Baseline b) {
  switch (b) {
    case Baseline::kVanilla:
      return "vanilla";
    case Baseline::kDI:
      return "di";
    case Baseline::kDIPP:
      return "di-pp";
    case Baseline::kIH:
      return "ih";
  }
  return "?";
}

std::optional<Baseline> ParseBaseline(std::string_view s) {
  const std::string n = ToLowerAscii(s);
  if (n == "vanilla") return Baseline::kVanilla;
  if (n == "di") return Baseline::kDI;
  if (n == "di-pp" || n == "di_pp" || n == "di+pp") return Baseline::kDIPP;
  if (n == "ih") return Baseline::kIH;
  return std::nullopt;
}

std::string_view HonorificText(Honorific h) {
  return h == Honorific::kMr ? "Mr." : "Ms.";
}

std::string_view PickinessText(Pickiness p) {
  switch (p) {
    case Pickiness::kNotPicky:
      return "not picky";
    case Pickiness::kModeratelyPicky:
      return "moderately picky";
    case Pickiness::kExtremelyPicky:
      return "extremely picky";
  }
  return "?";
}

json PersonaSpec::ToJson() const {
  json j = {{"title", HonorificText(title)}, {"surname", surname}};
  if (pickiness) j["pickiness"] = PickinessText(*pickiness);
  return j;
}

// ---------------------------------------------------------------------------
// Surnames

SurnameTable::SurnameTable(std::vector<std::string> names) {
  std::unordered_set<std::string> seen;
  for (auto& n : names) {
    if (n.empty()) continue;
    if (seen.insert(n).second) names_.push_back(std::move(n));
  }
}

bool SurnameTable::Contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

namespace {

// "GUZMAN" -> "Guzman", "MCDONALD" -> "Mcdonald".
std::string TitleCase(std::string_view raw) {
  std::string out = ToLowerAscii(Trim(raw));
  bool start = true;
  for (char& c : out) {
    if (start && std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    start = !std::isalpha(static_cast<unsigned char>(c)) && c != '\'';
  }
  return out;
}

double ParsePercent(const std::string& s) {
  // Census suppresses small cells as "(S)".
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return 0.0;
  }
}

}  // namespace

SurnameTable SurnameTable::Load(const std::filesystem::path& path,
                                size_t per_group) {
  std::ifstream in(path);
  if (!in) throw ConfigError("surname table missing: " + path.string());
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("surname table empty: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  {
    Tokenizer tok(line);
    for (const auto& h : tok) header.push_back(ToLowerAscii(Trim(h)));
  }
  auto col = [&](std::string_view name) -> std::optional<size_t> {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimView(line).empty()) continue;
    Tokenizer tok(line);
    rows.emplace_back(tok.begin(), tok.end());
  }

  if (auto surname = col("surname")) {
    std::vector<std::string> names;
    for (const auto& r : rows) {
      if (*surname < r.size()) names.push_back(TitleCase(r[*surname]));
    }
    SurnameTable table(std::move(names));
    if (table.empty()) throw ConfigError("surname table has no rows: " + path.string());
    return table;
  }

  auto name = col("name");
  auto count = col("count");
  static const std::vector<std::string> kGroups = {"pctwhite", "pctblack", "pctapi",
                                                   "pcthispanic", "pctaian"};
  if (!name || !count) {
    throw ConfigError("surname table needs a 'surname' column or census columns: " +
                      path.string());
  }
  std::vector<std::string> pooled;
  for (const auto& group : kGroups) {
    auto pct = col(group);
    if (!pct) throw ConfigError("census surname table lacks column " + group);
    std::vector<std::pair<double, std::string>> scored;
    for (const auto& r : rows) {
      if (std::max({*name, *count, *pct}) >= r.size()) continue;
      const double est = ParsePercent(r[*count]) * ParsePercent(r[*pct]) / 100.0;
      scored.emplace_back(est, TitleCase(r[*name]));
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (size_t i = 0; i < scored.size() && i < per_group; ++i) {
      pooled.push_back(scored[i].second);
    }
  }
  SurnameTable table(std::move(pooled));
  if (table.empty()) throw ConfigError("surname table has no rows: " + path.string());
  return table;
}

PersonaSpec SamplePersona(Baseline baseline, const SurnameTable& surnames, Rng& rng) {
  if (surnames.empty()) throw ConfigError("surname table missing or empty");
  PersonaSpec p;
  p.title = rng.Coin() ? Honorific::kMs : Honorific::kMr;
  p.surname = surnames.names()[rng.Uniform(surnames.names().size())];
  if (baseline == Baseline::kDIPP) {
    p.pickiness = static_cast<Pickiness>(rng.Uniform(3));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Templates

const std::vector<std::string>& RequiredTemplateNames() {
  static const std::vector<std::string> kNames = {
      "t1_di",      "t1_ih_imdb", "t1_ih_reddit",     "t1_ih_redial",
      "t2_di",      "t2_di_pp",   "t3_di",            "t3_di_pp",
      "t4_vanilla", "t5_accept_reject", "t5_compare", "t5_reason_suffix"};
  return kNames;
}

const std::vector<std::string>& MetricDenyList() {
  static const std::vector<std::string> kTerms = {
      "entropy",  "diversity",   "diverse", "type-token", "token ratio",
      "pearson",  "correlation", "metric",  "evaluat",    "score",
      "cosine",   "positive rate", "benchmark", "coherence"};
  return kTerms;
}

TemplateSet TemplateSet::Load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("template directory missing: " + dir.string());
  }
  std::map<std::string, std::string> loaded;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (!text.empty() && text.back() == '\n') text.pop_back();
    loaded[entry.path().stem().string()] = std::move(text);
  }
  TemplateSet set = FromMap(std::move(loaded));
  for (const auto& name : RequiredTemplateNames()) {
    if (!set.Has(name)) throw ConfigError("template missing: " + name + ".txt");
  }
  return set;
}

TemplateSet TemplateSet::FromMap(std::map<std::string, std::string> templates) {
  TemplateSet set;
  for (auto& [k, v] : templates) set.templates_.emplace(k, std::move(v));
  return set;
}

const std::string& TemplateSet::Get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw ConfigError("unknown template: " + std::string(name));
  }
  return it->second;
}

bool TemplateSet::Has(std::string_view name) const {
  return templates_.find(name) != templates_.end();
}

namespace {

bool IsFieldStart(char c) {
  return std::islower(static_cast<unsigned char>(c)) || c == '_';
}
bool IsFieldChar(char c) {
  return IsFieldStart(c) || std::isdigit(static_cast<unsigned char>(c));
}

// Calls on_text / on_field for each literal run and {field} reference. A
// brace not followed by an identifier and '}' is literal text.
template <typename OnText, typename OnField>
void ScanTemplate(std::string_view t, OnText on_text, OnField on_field) {
  size_t i = 0;
  size_t lit = 0;
  while (i < t.size()) {
    if (t[i] == '{' && i + 1 < t.size() && IsFieldStart(t[i + 1])) {
      size_t j = i + 1;
      while (j < t.size() && IsFieldChar(t[j])) ++j;
      if (j < t.size() && t[j] == '}') {
        on_text(t.substr(lit, i - lit));
        on_field(t.substr(i + 1, j - i - 1));
        i = j + 1;
        lit = i;
        continue;
      }
    }
    ++i;
  }
  on_text(t.substr(lit));
}

}  // namespace

std::string TemplateSet::Render(std::string_view name,
                                const std::map<std::string, std::string>& values) const {
  std::string out;
  ScanTemplate(
      Get(name), [&](std::string_view text) { out += text; },
      [&](std::string_view field) {
        auto it = values.find(std::string(field));
        if (it == values.end()) throw MissingFieldError(std::string(field));
        out += it->second;
      });
  return out;
}

std::vector<std::string> TemplateSet::Placeholders(std::string_view name) const {
  std::vector<std::string> fields;
  ScanTemplate(
      Get(name), [](std::string_view) {},
      [&](std::string_view field) {
        if (std::find(fields.begin(), fields.end(), field) == fields.end()) {
          fields.emplace_back(field);
        }
      });
  return fields;
}

std::map<std::string, std::string> TemplateSet::Hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, text] : templates_) out[name] = Sha256Hex(text);
  return out;
}

// ---------------------------------------------------------------------------
// Prompt cases

std::string_view FeedbackModeName(FeedbackMode m) {
  return m == FeedbackMode::kAcceptReject ? "accept_reject" : "compare";
}

std::string_view PolarityName(Polarity p) {
  return p == Polarity::kPositive ? "positive" : "negative";
}

json PromptCase::ToJson() const {
  json items = json::array();
  for (const auto& r : prompt_items) items.push_back({{"key", r.key}, {"display", r.display}});
  json j = {{"id", id},
            {"task", TaskName(task)},
            {"baseline", BaselineName(baseline)},
            {"source_dataset", DatasetName(source_dataset)},
            {"source_id", source_id},
            {"prompt_items", std::move(items)},
            {"prompt_text", prompt_text},
            {"prompt_sha256", Sha256Hex(prompt_text)},
            {"rng_seed", rng_seed}};
  if (persona) j["persona"] = persona->ToJson();
  if (target_num) j["target_num"] = *target_num;
  if (target_len) j["target_len"] = *target_len;
  if (feedback) {
    j["feedback"] = {{"mode", FeedbackModeName(feedback->mode)},
                     {"explanation_shown", feedback->explanation_shown},
                     {"reason_requested", feedback->reason_requested},
                     {"negative_source_id", feedback->negative_source_id}};
    if (feedback->mode == FeedbackMode::kAcceptReject) {
      j["feedback"]["polarity"] = PolarityName(feedback->polarity);
    } else {
      j["feedback"]["positive_slot"] = feedback->positive_slot;
    }
  }
  return j;
}

size_t HistorySize(Dataset ds) {
  switch (ds) {
    case Dataset::kRedial:
      return kRedialHistory;
    case Dataset::kReddit:
      return kRedditHistory;
    case Dataset::kImdb:
      return kImdbHistory;
    case Dataset::kMovieLens:
      break;
  }
  throw std::invalid_argument("no interaction history for movielens");
}

AgentAssignment AssignAgents(const std::string& positive_comment,
                             const std::string& negative_comment, Rng& rng) {
  AgentAssignment a;
  a.positive_slot = rng.Coin() ? 2 : 1;
  if (a.positive_slot == 1) {
    a.agent1 = positive_comment;
    a.agent2 = negative_comment;
  } else {
    a.agent1 = negative_comment;
    a.agent2 = positive_comment;
  }
  return a;
}

size_t SampleNegativeRecommendation(size_t request_index,
                                    const std::vector<SourceCase>& all_cases,
                                    Rng& rng) {
  if (all_cases.size() < 2) {
    throw DataError("negative sampling needs at least two requests");
  }
  // Uniform over the other n-1 requests.
  size_t pick = rng.Uniform(all_cases.size() - 1);
  if (pick >= request_index) ++pick;
  return pick;
}

std::string RecommendationPayload(const Comment& comment, bool with_explanation) {
  if (with_explanation) return comment.text;
  std::vector<std::string> titles;
  for (const auto& it : comment.items) titles.push_back(it.display);
  return JoinStrings(titles, ", ");
}

namespace {

std::map<std::string, std::string> PersonaFields(const PersonaSpec& p) {
  std::map<std::string, std::string> f = {{"prefix", std::string(HonorificText(p.title))},
                                          {"surname", p.surname}};
  if (p.pickiness) f["pickiness"] = std::string(PickinessText(*p.pickiness));
  return f;
}

std::string JoinDisplays(const std::vector<ItemRef>& refs, std::string_view sep) {
  std::vector<std::string> parts;
  for (const auto& r : refs) parts.push_back(r.display);
  return JoinStrings(parts, sep);
}

}  // namespace

std::optional<PromptCase> PromptRenderer::ItemsTalk(
    Baseline baseline, const SourceCase& source,
    const std::optional<PersonaSpec>& persona, uint64_t seed) const {
  PromptCase pc;
  pc.task = Task::kT1;
  pc.baseline = baseline;
  pc.source_dataset = source.dataset;
  pc.source_id = source.id;
  pc.rng_seed = seed;
  pc.id = "t1/" + std::string(BaselineName(baseline)) + "/" +
          std::string(DatasetName(source.dataset)) + "/" + source.id;
  const int total = static_cast<int>(source.mentioned_items.size());
  std::map<std::string, std::string> fields;

  if (baseline == Baseline::kDI) {
    if (!persona) throw MissingFieldError("persona");
    pc.persona = persona;
    pc.target_num = total;
    if (total < 1) return std::nullopt;
    fields = PersonaFields(*persona);
    fields["target_num"] = std::to_string(total);
    pc.prompt_text = templates_.Render("t1_di", fields);
    return pc;
  }
  if (baseline != Baseline::kIH) {
    throw std::invalid_argument("ItemsTalk supports the di and ih baselines");
  }

  const size_t history = HistorySize(source.dataset);
  std::string name;
  switch (source.dataset) {
    case Dataset::kRedial: {
      if (source.mentioned_items.size() < history) return std::nullopt;
      pc.prompt_items.assign(source.mentioned_items.begin(),
                             source.mentioned_items.begin() + history);
      fields["movies"] = JoinDisplays(pc.prompt_items, " and ");
      name = "t1_ih_redial";
      break;
    }
    case Dataset::kReddit: {
      if (!source.timestamp_utc) throw MissingFieldError("timestamp_utc");
      if (source.mentioned_items.size() < history) return std::nullopt;
      pc.prompt_items.assign(source.mentioned_items.begin(),
                             source.mentioned_items.begin() + history);
      fields["movies"] = JoinDisplays(pc.prompt_items, ", ");
      fields["time"] = FormatUtc(*source.timestamp_utc);
      name = "t1_ih_reddit";
      break;
    }
    case Dataset::kImdb: {
      if (source.reviews.empty()) throw MissingFieldError("reviews");
      std::vector<std::string> lines;
      std::set<std::string> used;
      for (const auto& r : source.reviews) {
        if (pc.prompt_items.size() == history) break;
        if (!used.insert(r.movie.key).second) continue;
        pc.prompt_items.push_back(r.movie);
        lines.push_back(r.movie.display + ": " + r.title);
      }
      if (pc.prompt_items.size() < history) return std::nullopt;
      fields["history"] = JoinStrings(lines, "\n");
      name = "t1_ih_imdb";
      break;
    }
    case Dataset::kMovieLens:
      throw std::invalid_argument("ItemsTalk has no movielens variant");
  }
  const int target = total - static_cast<int>(pc.prompt_items.size());
  pc.target_num = target;
  if (target < 1) return std::nullopt;
  fields["target_num"] = std::to_string(target);
  pc.prompt_text = templates_.Render(name, fields);
  return pc;
}

PromptCase PromptRenderer::BinaryPreference(Baseline baseline, const ItemRef& movie,
                                            const PersonaSpec& persona,
                                            uint64_t seed) const {
  if (baseline != Baseline::kDI && baseline != Baseline::kDIPP) {
    throw std::invalid_argument("BinPref supports the di and di-pp baselines");
  }
  if (baseline == Baseline::kDIPP && !persona.pickiness) {
    throw MissingFieldError("pickiness");
  }
  PromptCase pc;
  pc.task = Task::kT2;
  pc.baseline = baseline;
  pc.persona = persona;
  pc.source_dataset = Dataset::kMovieLens;
  pc.source_id = movie.key;
  pc.id = "t2/" + std::string(BaselineName(baseline)) + "/" + movie.key;
  pc.prompt_items = {movie};
  pc.rng_seed = seed;
  auto fields = PersonaFields(persona);
  fields["movie"] = movie.display;
  pc.prompt_text =
      templates_.Render(baseline == Baseline::kDIPP ? "t2_di_pp" : "t2_di", fields);
  return pc;
}

PromptCase PromptRenderer::OpenPreference(Baseline baseline, const SourceCase& source,
                                          size_t review_index,
                                          const PersonaSpec& persona,
                                          uint64_t seed) const {
  if (baseline != Baseline::kDI && baseline != Baseline::kDIPP) {
    throw std::invalid_argument("OpenPref supports the di and di-pp baselines");
  }
  if (review_index >= source.reviews.size()) throw MissingFieldError("review");
  if (baseline == Baseline::kDIPP && !persona.pickiness) {
    throw MissingFieldError("pickiness");
  }
  const Review& review = source.reviews[review_index];
  PromptCase pc;
  pc.task = Task::kT3;
  pc.baseline = baseline;
  pc.persona = persona;
  pc.source_dataset = source.dataset;
  pc.source_id = source.id;
  pc.prompt_items = {review.movie};
  pc.target_len = static_cast<int64_t>(Utf8Length(review.body));
  pc.rng_seed = seed;
  pc.id = "t3/" + std::string(BaselineName(baseline)) + "/" + source.id;
  auto fields = PersonaFields(persona);
  fields["movie"] = review.movie.display;
  fields["review_len"] = std::to_string(*pc.target_len);
  pc.prompt_text =
      templates_.Render(baseline == Baseline::kDIPP ? "t3_di_pp" : "t3_di", fields);
  return pc;
}

PromptCase PromptRenderer::RecommendationRequest(const SourceCase& source,
                                                 uint64_t seed) const {
  if (source.request_items.empty()) throw MissingFieldError("request_items");
  if (!source.request_length) throw MissingFieldError("request_length");
  PromptCase pc;
  pc.task = Task::kT4;
  pc.baseline = Baseline::kVanilla;
  pc.source_dataset = source.dataset;
  pc.source_id = source.id;
  pc.prompt_items = source.request_items;
  pc.target_len = *source.request_length;
  pc.rng_seed = seed;
  pc.id = "t4/vanilla/" + source.id;
  pc.prompt_text = templates_.Render(
      "t4_vanilla", {{"movies", JoinDisplays(source.request_items, ", ")},
                     {"target_len", std::to_string(*source.request_length)}});
  return pc;
}

std::string PromptRenderer::WithReason(std::string text, bool reason) const {
  if (!reason) return text;
  return text + "\n" + templates_.Get("t5_reason_suffix");
}

PromptCase PromptRenderer::AcceptReject(const SourceCase& request,
                                        const std::string& response,
                                        const FeedbackSetup& setup,
                                        uint64_t seed) const {
  if (!request.request_text) throw MissingFieldError("request_text");
  PromptCase pc;
  pc.task = Task::kT5;
  pc.baseline = Baseline::kVanilla;
  pc.source_dataset = request.dataset;
  pc.source_id = request.id;
  pc.rng_seed = seed;
  pc.feedback = setup;
  pc.feedback->mode = FeedbackMode::kAcceptReject;
  pc.id = "t5/" + std::string(setup.explanation_shown ? "explain" : "items") +
          "/accept_reject/" + std::string(PolarityName(setup.polarity)) + "/" +
          request.id;
  pc.prompt_text = WithReason(
      templates_.Render("t5_accept_reject",
                        {{"request", *request.request_text}, {"response", response}}),
      setup.reason_requested);
  return pc;
}

PromptCase PromptRenderer::Compare(const SourceCase& request,
                                   const AgentAssignment& agents,
                                   const FeedbackSetup& setup, uint64_t seed) const {
  if (!request.request_text) throw MissingFieldError("request_text");
  PromptCase pc;
  pc.task = Task::kT5;
  pc.baseline = Baseline::kVanilla;
  pc.source_dataset = request.dataset;
  pc.source_id = request.id;
  pc.rng_seed = seed;
  pc.feedback = setup;
  pc.feedback->mode = FeedbackMode::kCompare;
  pc.feedback->positive_slot = agents.positive_slot;
  pc.id = "t5/" + std::string(setup.explanation_shown ? "explain" : "items") +
          "/compare/" + request.id;
  pc.prompt_text = WithReason(
      templates_.Render("t5_compare", {{"request", *request.request_text},
                                       {"agent1_response", agents.agent1},
                                       {"agent2_response", agents.agent2}}),
      setup.reason_requested);
  return pc;
}

}  // namespace usersim
