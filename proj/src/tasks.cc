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

#include "usersim/tasks.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "usersim/error.h"
#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

json TaskOptions::ToJson() const {
  return {{"seed", seed},
          {"abort_failure_rate", abort_failure_rate},
          {"keep_unmatched", keep_unmatched},
          {"fuzzy_threshold", fuzzy_threshold},
          {"n_simulators", n_simulators},
          {"num_bins", num_bins},
          {"with_explanations", with_explanations},
          {"with_reasons", with_reasons}};
}

json TaskCounts::ToJson() const {
  return {{"source_cases", source_cases},
          {"skipped", skipped},
          {"skip_reasons", skip_reasons},
          {"cases", cases},
          {"failures", failures},
          {"successes", cases - failures},
          {"invalid", invalid}};
}

std::string TaskReport::Name() const {
  return std::string(TaskName(task)) + "_" + std::string(BaselineName(baseline)) + "_" + scope;
}

json TaskReport::ToJson() const {
  return {{"task", TaskName(task)},
          {"baseline", BaselineName(baseline)},
          {"scope", scope},
          {"backend", backend},
          {"metrics", metrics},
          {"human", human},
          {"series", series},
          {"counts", counts.ToJson()},
          {"records", records}};
}

namespace {

void Skip(TaskCounts& c, const std::string& reason) {
  ++c.skipped;
  ++c.skip_reasons[reason];
}

TaskReport NewReport(Task task, Baseline baseline, std::string scope, const TaskContext& ctx) {
  TaskReport r;
  r.task = task;
  r.baseline = baseline;
  r.scope = std::move(scope);
  r.backend = ctx.gateway.config().ToJson();
  r.backend["model"] = ctx.gateway.backend().model();
  return r;
}

// Sends every prompt and applies the abort rule.
void Execute(TaskRun& run, TaskContext& ctx) {
  run.report.counts.cases = static_cast<int64_t>(run.prompts.size());
  run.replies = ctx.gateway.CompleteAll(run.prompts);
  int64_t failures = 0;
  for (const auto& r : run.replies) failures += r.failed ? 1 : 0;
  run.report.counts.failures = failures;
  const double limit = ctx.options.abort_failure_rate * static_cast<double>(run.prompts.size());
  if (!run.prompts.empty() && static_cast<double>(failures) > limit) {
    throw TaskAbortedError(fmt::format("{}: {} of {} cases failed", run.report.Name(), failures,
                                       run.prompts.size()));
  }
}

json BaseRecord(const PromptCase& pc, const SimulatorReply& reply) {
  json r = {{"case_id", pc.id}, {"source_id", pc.source_id}, {"failed", reply.failed}};
  if (reply.failed) r["error"] = reply.error;
  return r;
}

const SurnameTable& RequireSurnames(const TaskContext& ctx) {
  if (ctx.surnames == nullptr || ctx.surnames->empty()) {
    throw ConfigError("this baseline needs a surname table");
  }
  return *ctx.surnames;
}

std::vector<std::string> Keys(const std::vector<ItemRef>& refs) {
  std::vector<std::string> out;
  out.reserve(refs.size());
  for (const auto& r : refs) out.push_back(r.key);
  return out;
}

json DistributionBlock(const Distribution& d) {
  json j = {{"distinct_items", d.size()}, {"mentions", d.total()}};
  j["entropy"] = d.empty() ? Stat::Undefined("no mentions").ToJson() : json(Entropy(d));
  j["max_entropy"] = d.empty() ? Stat::Undefined("no mentions").ToJson()
                               : json(std::log2(static_cast<double>(d.size())));
  return j;
}

json FrequencySeries(const Distribution& d) {
  json counts = json::array();
  json top = json::array();
  const auto sorted = d.SortedByFrequency();
  for (size_t i = 0; i < sorted.size(); ++i) {
    counts.push_back(sorted[i].second);
    if (i < 20) top.push_back({{"item", sorted[i].first}, {"count", sorted[i].second}});
  }
  return {{"sorted_counts", counts}, {"top", top}};
}

uint64_t CaseSeed(const Rng& rng) { return rng.seed(); }

// History items shown to IH, mirroring the renderer's selection.
std::vector<ItemRef> HistoryItems(const SourceCase& c) {
  const size_t h = HistorySize(c.dataset);
  std::vector<ItemRef> out;
  if (c.dataset == Dataset::kImdb) {
    std::set<std::string> used;
    for (const auto& r : c.reviews) {
      if (out.size() == h) break;
      if (used.insert(r.movie.key).second) out.push_back(r.movie);
    }
    return out;
  }
  for (size_t i = 0; i < std::min(h, c.mentioned_items.size()); ++i) {
    out.push_back(c.mentioned_items[i]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// T1

Distribution HumanItemDistribution(const std::vector<SourceCase>& cases, Baseline baseline,
                                   int64_t* eligible) {
  std::vector<std::vector<std::string>> mentioned, shown;
  for (const auto& c : cases) {
    std::vector<std::string> history;
    if (baseline == Baseline::kIH) {
      const auto h = HistoryItems(c);
      if (h.size() < HistorySize(c.dataset)) continue;
      history = Keys(h);
      if (c.mentioned_items.size() <= history.size()) continue;
    } else if (c.mentioned_items.empty()) {
      continue;
    }
    mentioned.push_back(Keys(c.mentioned_items));
    shown.push_back(std::move(history));
  }
  if (eligible) *eligible = static_cast<int64_t>(mentioned.size());
  return ItemDistribution(mentioned, shown);
}

TaskRun RunT1(const std::vector<SourceCase>& cases, const ItemCatalog& catalog,
              Baseline baseline, TaskContext& ctx) {
  if (baseline != Baseline::kDI && baseline != Baseline::kIH) {
    throw std::invalid_argument("t1 supports the di and ih baselines");
  }
  const std::string scope =
      cases.empty() ? "empty" : std::string(DatasetName(cases.front().dataset));
  TaskRun run;
  run.report = NewReport(Task::kT1, baseline, scope, ctx);
  TaskCounts& counts = run.report.counts;
  const Rng root = Rng(ctx.options.seed).Derive("t1");
  std::vector<size_t> source_index;
  for (size_t i = 0; i < cases.size(); ++i) {
    ++counts.source_cases;
    Rng rng = root.Derive(cases[i].id);
    std::optional<PersonaSpec> persona;
    if (baseline == Baseline::kDI) persona = SamplePersona(baseline, RequireSurnames(ctx), rng);
    auto pc = ctx.renderer.ItemsTalk(baseline, cases[i], persona, CaseSeed(rng));
    if (!pc) {
      Skip(counts, "target_num_below_1");
      continue;
    }
    run.prompts.push_back(std::move(*pc));
    source_index.push_back(i);
  }
  Execute(run, ctx);

  const CatalogMatcher matcher(catalog, ctx.options.fuzzy_threshold);
  std::vector<std::vector<std::string>> sim_mentions, sim_shown, human_mentions, human_shown;
  int64_t extracted = 0, matched = 0, fuzzy = 0;
  for (size_t k = 0; k < run.prompts.size(); ++k) {
    const PromptCase& pc = run.prompts[k];
    const SourceCase& src = cases[source_index[k]];
    human_mentions.push_back(Keys(src.mentioned_items));
    human_shown.push_back(Keys(pc.prompt_items));
    json rec = BaseRecord(pc, run.replies[k]);
    rec["target_num"] = *pc.target_num;
    if (!run.replies[k].failed) {
      const ParsedOutcome parsed = ParseItemList(run.replies[k].raw_text, matcher);
      rec["valid"] = parsed.valid;
      if (!parsed.valid) {
        ++counts.invalid;
      } else {
        std::vector<std::string> cats;
        for (const auto& it : parsed.items) {
          ++extracted;
          if (it.key) ++matched;
          if (it.fuzzy) ++fuzzy;
          if (it.key || ctx.options.keep_unmatched) cats.push_back(it.Category());
        }
        rec["items"] = cats;
        rec["extracted"] = parsed.items.size();
        sim_mentions.push_back(std::move(cats));
        sim_shown.push_back(Keys(pc.prompt_items));
      }
    }
    run.report.records.push_back(std::move(rec));
  }
  const Distribution sim = ItemDistribution(sim_mentions, sim_shown);
  const Distribution human = ItemDistribution(human_mentions, human_shown);
  run.report.metrics = DistributionBlock(sim);
  run.report.metrics["extracted_items"] = extracted;
  run.report.metrics["matched_items"] = matched;
  run.report.metrics["fuzzy_matches"] = fuzzy;
  run.report.metrics["match_rate"] =
      extracted == 0 ? Stat::Undefined("nothing extracted").ToJson()
                     : json(static_cast<double>(matched) / static_cast<double>(extracted));
  run.report.human = DistributionBlock(human);
  run.report.series = {{"simulator", FrequencySeries(sim)}, {"human", FrequencySeries(human)}};
  return run;
}

// ---------------------------------------------------------------------------
// T2

TaskRun RunT2(const RatingStats& stats,
              const std::map<std::string, std::vector<std::string>>& groups,
              Baseline baseline, TaskContext& ctx) {
  if (baseline != Baseline::kDI && baseline != Baseline::kDIPP) {
    throw std::invalid_argument("t2 supports the di and di-pp baselines");
  }
  if (ctx.options.n_simulators < 1) throw ConfigError("n_simulators must be >= 1");
  const SurnameTable& surnames = RequireSurnames(ctx);
  TaskRun run;
  run.report = NewReport(Task::kT2, baseline, "movielens", ctx);
  TaskCounts& counts = run.report.counts;
  const Rng root = Rng(ctx.options.seed).Derive("t2");

  struct Slot {
    std::string group;
    std::string key;
  };
  std::vector<Slot> slots;  // one per prompt
  for (const auto& [group, keys] : groups) {
    for (const auto& key : keys) {
      ++counts.source_cases;
      auto it = stats.per_movie.find(key);
      if (it == stats.per_movie.end()) {
        throw DataError("movie '" + key + "' of group " + group + " has no rating stats");
      }
      const ItemRef movie{key, it->second.display};
      const Rng movie_rng = root.Derive(key);
      for (int s = 0; s < ctx.options.n_simulators; ++s) {
        Rng rng = movie_rng.Derive(static_cast<uint64_t>(s));
        const PersonaSpec persona = SamplePersona(baseline, surnames, rng);
        PromptCase pc = ctx.renderer.BinaryPreference(baseline, movie, persona, CaseSeed(rng));
        pc.id = fmt::format("t2/{}/{}/{}/{}", BaselineName(baseline), group, key, s);
        run.prompts.push_back(std::move(pc));
        slots.push_back({group, key});
      }
    }
  }
  Execute(run, ctx);

  std::map<std::string, std::map<std::string, BinaryTally>> tallies;  // group -> key -> tally
  for (size_t k = 0; k < run.prompts.size(); ++k) {
    BinaryTally& t = tallies[slots[k].group][slots[k].key];
    json rec = BaseRecord(run.prompts[k], run.replies[k]);
    if (!run.replies[k].failed) {
      const ParsedOutcome parsed = ParseBinary(run.replies[k].raw_text);
      rec["valid"] = parsed.valid;
      if (!parsed.valid) {
        ++counts.invalid;
        ++t.invalid;
      } else {
        const bool yes = *parsed.binary == BinaryAnswer::kYes;
        rec["answer"] = yes ? "yes" : "no";
        ++(yes ? t.yes : t.no);
      }
    }
    run.report.records.push_back(std::move(rec));
  }

  json metrics = json::object(), human = json::object(), series = json::object();
  for (const auto& [group, keys] : groups) {
    std::vector<double> avg, rate, avg_h, liked;
    int64_t excluded = 0;
    json points = json::array();
    for (const auto& key : keys) {
      const MovieRating& m = stats.per_movie.find(key)->second;
      const BinaryTally& t = tallies[group][key];
      const Stat pr = PositiveRate(t);
      avg_h.push_back(m.AverageRating());
      liked.push_back(m.LikedFraction());
      if (pr.defined()) {
        avg.push_back(m.AverageRating());
        rate.push_back(*pr.value);
      } else {
        ++excluded;
      }
      points.push_back({{"movie", key},
                        {"avg_rating", m.AverageRating()},
                        {"positive_rate", pr.ToJson()},
                        {"liked_fraction", m.LikedFraction()},
                        {"yes", t.yes},
                        {"no", t.no},
                        {"invalid", t.invalid}});
    }
    auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
      if (x.size() < 2) {
        return json{{"r", Stat::Undefined("fewer than 2 movies").ToJson()},
                    {"p_value", Stat::Undefined("fewer than 2 movies").ToJson()},
                    {"n", x.size()}};
      }
      const PearsonResult p = Pearson(x, y);
      return json{{"r", p.r.ToJson()}, {"p_value", p.p_value.ToJson()}, {"n", p.n}};
    };
    auto mean = [](const std::vector<double>& v) {
      if (v.empty()) return Stat::Undefined("no movies").ToJson();
      double s = 0;
      for (double x : v) s += x;
      return json(s / static_cast<double>(v.size()));
    };
    metrics[group] = {{"pearson", corr(avg, rate)},
                      {"mean_positive_rate", mean(rate)},
                      {"movies", keys.size()},
                      {"movies_without_valid_reply", excluded}};
    human[group] = {{"pearson", corr(avg_h, liked)},
                    {"mean_positive_rate", mean(liked)},
                    {"movies", keys.size()},
                    {"movies_without_valid_reply", 0}};
    series[group] = std::move(points);
  }
  run.report.metrics = std::move(metrics);
  run.report.human = std::move(human);
  run.report.series = std::move(series);
  run.report.human["like_threshold"] = stats.like_threshold;
  return run;
}

// ---------------------------------------------------------------------------
// T3

namespace {

json AspectBlock(const std::vector<AspectSentiment>& pairs, int64_t texts, int64_t failures) {
  json j = {{"texts", texts}, {"extraction_failures", failures}};
  if (pairs.empty()) {
    j["num_pairs"] = 0;
    j["num_aspects"] = 0;
    j["aspect_entropy"] = Stat::Undefined("no aspects").ToJson();
    j["sentiment_entropy"] = Stat::Undefined("no aspects").ToJson();
    j["sentiment_counts"] = {{"positive", 0}, {"negative", 0}, {"neutral", 0}};
    return j;
  }
  j.update(ComputeAspectStats(pairs).ToJson());
  return j;
}

json TopAspects(const std::vector<AspectSentiment>& pairs) {
  Distribution d;
  for (const auto& p : pairs) d.Add(p.aspect);
  json top = json::array();
  const auto sorted = d.SortedByFrequency();
  for (size_t i = 0; i < std::min<size_t>(20, sorted.size()); ++i) {
    top.push_back({{"aspect", sorted[i].first}, {"count", sorted[i].second}});
  }
  return top;
}

}  // namespace

TaskRun RunT3(const std::vector<SourceCase>& cases, Baseline baseline,
              AspectExtractor& extractor, TaskContext& ctx) {
  if (baseline != Baseline::kDI && baseline != Baseline::kDIPP) {
    throw std::invalid_argument("t3 supports the di and di-pp baselines");
  }
  const SurnameTable& surnames = RequireSurnames(ctx);
  TaskRun run;
  run.report = NewReport(Task::kT3, baseline, "imdb", ctx);
  TaskCounts& counts = run.report.counts;
  const Rng root = Rng(ctx.options.seed).Derive("t3");
  std::vector<std::string> human_texts;
  for (const auto& c : cases) {
    ++counts.source_cases;
    if (c.reviews.empty()) {
      Skip(counts, "no_reviews");
      continue;
    }
    Rng rng = root.Derive(c.id);
    const size_t review = static_cast<size_t>(rng.Uniform(c.reviews.size()));
    if (TrimView(c.reviews[review].body).empty()) {
      Skip(counts, "empty_review");
      continue;
    }
    const PersonaSpec persona = SamplePersona(baseline, surnames, rng);
    run.prompts.push_back(ctx.renderer.OpenPreference(baseline, c, review, persona, CaseSeed(rng)));
    human_texts.push_back(c.reviews[review].body);
  }
  extractor.Preflight();
  Execute(run, ctx);

  std::vector<std::string> sim_texts;
  std::vector<size_t> sim_at;
  for (size_t k = 0; k < run.prompts.size(); ++k) {
    json rec = BaseRecord(run.prompts[k], run.replies[k]);
    rec["target_len"] = *run.prompts[k].target_len;
    if (!run.replies[k].failed) {
      const ParsedOutcome parsed = ParseFreeText(run.replies[k].raw_text);
      rec["valid"] = parsed.valid;
      if (parsed.valid) {
        rec["length"] = Utf8Length(parsed.text);
        sim_texts.push_back(parsed.text);
        sim_at.push_back(k);
      } else {
        ++counts.invalid;
      }
    }
    run.report.records.push_back(std::move(rec));
  }

  auto extract = [&](const std::vector<std::string>& texts, const std::vector<std::string>& ids,
                     int64_t& failures, std::vector<size_t>* failed_at) {
    std::vector<AspectSentiment> pairs;
    const auto results = texts.empty() ? std::vector<Extraction>{} : extractor.ExtractBatch(texts);
    for (size_t i = 0; i < results.size(); ++i) {
      if (!results[i].ok) {
        ++failures;
        if (failed_at) failed_at->push_back(i);
        continue;
      }
      for (auto p : results[i].pairs) {
        p.case_id = ids[i];
        pairs.push_back(std::move(p));
      }
    }
    return pairs;
  };
  std::vector<std::string> sim_ids, human_ids;
  for (size_t k : sim_at) sim_ids.push_back(run.prompts[k].id);
  for (const auto& pc : run.prompts) human_ids.push_back(pc.id);
  int64_t sim_failures = 0, human_failures = 0;
  std::vector<size_t> failed;
  const auto sim_pairs = extract(sim_texts, sim_ids, sim_failures, &failed);
  const auto human_pairs = extract(human_texts, human_ids, human_failures, nullptr);
  for (size_t i : failed) run.report.records[sim_at[i]]["extraction_failed"] = true;

  run.report.metrics = AspectBlock(sim_pairs, static_cast<int64_t>(sim_texts.size()), sim_failures);
  run.report.human =
      AspectBlock(human_pairs, static_cast<int64_t>(human_texts.size()), human_failures);
  run.report.metrics["extractor"] = extractor.id();
  run.report.human["extractor"] = extractor.id();
  run.report.series = {{"simulator", {{"top_aspects", TopAspects(sim_pairs)}}},
                       {"human", {{"top_aspects", TopAspects(human_pairs)}}}};
  return run;
}

// ---------------------------------------------------------------------------
// T4

json CorpusDiversity(const std::vector<std::string>& texts, const WordEmbeddingProvider& words,
                     SentenceEmbeddingProvider& sentences, int num_bins, EmbeddingCache& cache) {
  json j = {{"requests", texts.size()}};
  if (texts.empty()) {
    const json u = Stat::Undefined("no requests").ToJson();
    j["type_token_ratio"] = u;
    j["word_diversity"] = u;
    j["sentence_diversity"] = u;
    j["bins"] = json::array();
    return j;
  }
  std::vector<std::string> tokens;
  double length_sum = 0.0;
  for (const auto& t : texts) {
    auto tk = Tokenize(t);
    tokens.insert(tokens.end(), std::make_move_iterator(tk.begin()), std::make_move_iterator(tk.end()));
    length_sum += static_cast<double>(Utf8Length(t));
  }
  j["tokens"] = tokens.size();
  j["mean_length"] = length_sum / static_cast<double>(texts.size());
  j["type_token_ratio"] =
      tokens.empty() ? Stat::Undefined("no tokens").ToJson() : json(TypeTokenRatio(tokens));

  std::set<std::string> vocab(tokens.begin(), tokens.end());
  const auto we = EmbedWords(std::vector<std::string>(vocab.begin(), vocab.end()), words, cache);
  j["vocabulary"] = vocab.size();
  j["out_of_vocabulary"] = we.out_of_vocabulary;
  std::vector<std::vector<double>> word_vectors;
  for (const auto& [tok, v] : we.vectors) word_vectors.push_back(v);
  j["word_diversity"] = word_vectors.empty() ? Stat::Undefined("no in-vocabulary tokens").ToJson()
                                             : CosineDiversity(word_vectors).ToJson();

  const auto sv = EmbedSentences(texts, sentences, cache);
  j["sentence_diversity"] = CosineDiversity(sv).ToJson();

  json bins = json::array();
  if (texts.size() >= static_cast<size_t>(num_bins)) {
    std::vector<double> entropies;
    entropies.reserve(texts.size());
    for (const auto& t : texts) entropies.push_back(WordEntropy(t));
    for (const auto& b : EntropyBinnedDiversity(entropies, sv, num_bins)) {
      bins.push_back({{"lower", b.lower},
                      {"upper", b.upper},
                      {"requests", b.members.size()},
                      {"diversity", b.diversity.ToJson()}});
    }
  }
  j["bins"] = std::move(bins);
  j["word_provider"] = words.id();
  j["sentence_provider"] = sentences.id();
  return j;
}

TaskRun RunT4(const std::vector<SourceCase>& cases, const WordEmbeddingProvider& words,
              SentenceEmbeddingProvider& sentences, TaskContext& ctx) {
  TaskRun run;
  run.report = NewReport(Task::kT4, Baseline::kVanilla, "reddit", ctx);
  TaskCounts& counts = run.report.counts;
  const Rng root = Rng(ctx.options.seed).Derive("t4");
  std::vector<std::string> human_texts;
  for (const auto& c : cases) {
    ++counts.source_cases;
    if (c.request_items.empty() || !c.request_length || !c.request_text) {
      Skip(counts, "no_request_items");
      continue;
    }
    run.prompts.push_back(ctx.renderer.RecommendationRequest(c, CaseSeed(root.Derive(c.id))));
    human_texts.push_back(*c.request_text);
  }
  sentences.Preflight();
  Execute(run, ctx);

  std::vector<std::string> sim_texts;
  for (size_t k = 0; k < run.prompts.size(); ++k) {
    json rec = BaseRecord(run.prompts[k], run.replies[k]);
    rec["target_len"] = *run.prompts[k].target_len;
    if (!run.replies[k].failed) {
      const ParsedOutcome parsed = ParseFreeText(run.replies[k].raw_text);
      rec["valid"] = parsed.valid;
      if (parsed.valid) {
        rec["length"] = Utf8Length(parsed.text);
        sim_texts.push_back(parsed.text);
      } else {
        ++counts.invalid;
      }
    }
    run.report.records.push_back(std::move(rec));
  }
  EmbeddingCache cache;
  run.report.metrics = CorpusDiversity(sim_texts, words, sentences, ctx.options.num_bins, cache);
  run.report.human = CorpusDiversity(human_texts, words, sentences, ctx.options.num_bins, cache);
  run.report.series = {{"simulator", run.report.metrics["bins"]},
                       {"human", run.report.human["bins"]}};
  return run;
}

// ---------------------------------------------------------------------------
// T5

TaskRun RunT5(const std::vector<SourceCase>& cases, TaskContext& ctx) {
  TaskRun run;
  run.report = NewReport(Task::kT5, Baseline::kVanilla, "reddit", ctx);
  TaskCounts& counts = run.report.counts;
  const Rng root = Rng(ctx.options.seed).Derive("t5");
  std::vector<bool> variants = {false};
  if (ctx.options.with_explanations) variants.push_back(true);

  std::vector<FeedbackRecord> truth;
  for (size_t i = 0; i < cases.size(); ++i) {
    const SourceCase& c = cases[i];
    ++counts.source_cases;
    if (c.thread_comments.empty() || !c.request_text) {
      Skip(counts, "no_head_comment");
      continue;
    }
    Rng rng = root.Derive(c.id);
    const size_t neg = SampleNegativeRecommendation(i, cases, rng);
    if (cases[neg].thread_comments.empty()) {
      Skip(counts, "negative_without_comment");
      continue;
    }
    const Comment& pos_comment = c.thread_comments.front();
    const Comment& neg_comment = cases[neg].thread_comments.front();
    const uint64_t slot_draw = rng.Next();
    for (bool shown : variants) {
      const std::string pos = RecommendationPayload(pos_comment, shown);
      const std::string negp = RecommendationPayload(neg_comment, shown);
      FeedbackSetup setup;
      setup.explanation_shown = shown;
      setup.reason_requested = ctx.options.with_reasons;
      setup.negative_source_id = cases[neg].id;
      for (Polarity pol : {Polarity::kPositive, Polarity::kNegative}) {
        setup.polarity = pol;
        run.prompts.push_back(ctx.renderer.AcceptReject(
            c, pol == Polarity::kPositive ? pos : negp, setup, CaseSeed(rng)));
        truth.push_back({c.id, pol, FeedbackMode::kAcceptReject,
                         pol == Polarity::kPositive ? FeedbackOutcome::kAccept
                                                    : FeedbackOutcome::kReject,
                         shown});
      }
      // Same slot in both variants, so they differ only in the payload.
      Rng slot_rng(slot_draw);
      const AgentAssignment agents = AssignAgents(pos, negp, slot_rng);
      run.prompts.push_back(ctx.renderer.Compare(c, agents, setup, CaseSeed(rng)));
      truth.push_back({c.id, Polarity::kPositive, FeedbackMode::kCompare,
                       FeedbackOutcome::kPreferPositive, shown});
    }
  }
  Execute(run, ctx);

  std::vector<FeedbackRecord> records;
  for (size_t k = 0; k < run.prompts.size(); ++k) {
    const PromptCase& pc = run.prompts[k];
    const FeedbackSetup& fb = *pc.feedback;
    json rec = BaseRecord(pc, run.replies[k]);
    rec["mode"] = FeedbackModeName(fb.mode);
    rec["explanation_shown"] = fb.explanation_shown;
    if (run.replies[k].failed) {
      run.report.records.push_back(std::move(rec));
      continue;
    }
    FeedbackRecord fr{pc.source_id, fb.polarity, fb.mode, FeedbackOutcome::kInvalid,
                      fb.explanation_shown};
    if (fb.mode == FeedbackMode::kAcceptReject) {
      rec["polarity"] = PolarityName(fb.polarity);
      const ParsedOutcome parsed = ParseAcceptReject(run.replies[k].raw_text);
      if (parsed.valid) {
        fr.outcome = *parsed.feedback == FeedbackLabel::kAccept ? FeedbackOutcome::kAccept
                                                                : FeedbackOutcome::kReject;
        if (fb.reason_requested && !parsed.text.empty()) rec["reason"] = parsed.text;
      }
    } else {
      rec["positive_slot"] = fb.positive_slot;
      const ParsedOutcome parsed = ParseAgentChoice(run.replies[k].raw_text);
      if (parsed.valid) {
        const int chosen = *parsed.choice == AgentChoice::kAgent1   ? 1
                           : *parsed.choice == AgentChoice::kAgent2 ? 2
                                                                    : 0;
        rec["chosen_slot"] = chosen;
        fr.outcome = DebiasChoice(chosen, fb.positive_slot);
        if (fb.reason_requested) rec["reason"] = run.replies[k].raw_text;
      }
    }
    if (fr.outcome == FeedbackOutcome::kInvalid) ++counts.invalid;
    rec["outcome"] = FeedbackOutcomeName(fr.outcome);
    rec["valid"] = fr.outcome != FeedbackOutcome::kInvalid;
    records.push_back(fr);
    run.report.records.push_back(std::move(rec));
  }
  bool any_valid = false;
  for (const auto& r : records) any_valid |= r.outcome != FeedbackOutcome::kInvalid;
  run.report.metrics = any_valid ? ComputeCoherence(records).ToJson()
                                 : json{{"undefined", "no classifiable records"}};
  run.report.human = truth.empty() ? json{{"undefined", "no requests"}}
                                   : ComputeCoherence(truth).ToJson();
  run.report.series = run.report.metrics;
  return run;
}

// ---------------------------------------------------------------------------
// Null responders

namespace null_responders {

namespace {

std::map<std::string, const SourceCase*> IndexById(const std::vector<SourceCase>& cases) {
  std::map<std::string, const SourceCase*> index;
  for (const auto& c : cases) index.emplace(c.id, &c);
  return index;
}

const SourceCase& Lookup(const std::map<std::string, const SourceCase*>& index,
                         const std::string& id) {
  auto it = index.find(id);
  if (it == index.end()) throw std::invalid_argument("no source case " + id);
  return *it->second;
}

}  // namespace

ScriptedBackend::Responder ItemsTalk(const std::vector<SourceCase>& cases) {
  auto index = IndexById(cases);
  return [index](const PromptCase& pc) {
    const SourceCase& c = Lookup(index, pc.source_id);
    std::set<std::string> shown;
    for (const auto& r : pc.prompt_items) shown.insert(r.key);
    std::string out;
    for (const auto& it : c.mentioned_items) {
      if (shown.count(it.key)) continue;
      out += it.display + "\n";
    }
    return out;
  };
}

ScriptedBackend::Responder OpenPreference(const std::vector<SourceCase>& cases) {
  auto index = IndexById(cases);
  return [index](const PromptCase& pc) {
    const SourceCase& c = Lookup(index, pc.source_id);
    for (const auto& r : c.reviews) {
      if (r.movie.key == pc.prompt_items.at(0).key &&
          static_cast<int64_t>(Utf8Length(r.body)) == pc.target_len.value_or(-1)) {
        return r.body;
      }
    }
    throw std::invalid_argument("no review matches " + pc.id);
  };
}

ScriptedBackend::Responder RecRequest(const std::vector<SourceCase>& cases) {
  auto index = IndexById(cases);
  return [index](const PromptCase& pc) { return Lookup(index, pc.source_id).request_text.value(); };
}

ScriptedBackend::Responder Feedback() {
  return [](const PromptCase& pc) -> std::string {
    const FeedbackSetup& fb = pc.feedback.value();
    if (fb.mode == FeedbackMode::kAcceptReject) {
      return fb.polarity == Polarity::kPositive ? "Accept" : "Reject";
    }
    return fb.positive_slot == 1 ? "AGENT 1" : "AGENT 2";
  };
}

}  // namespace null_responders

}  // namespace usersim
