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

// Regenerates the bundled sample fixtures: word vectors and the replay
// fixture of a toy simulator that answers every prompt of a full run.
//
//   make_fixture --sample data/sample
//
// The toy simulator is a deterministic function of the prompt, with enough
// noise (format variants, typos, invented titles, invalid answers) to give
// the parsers and metrics something to do.

#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <regex>
#include <set>

#include "CLI11.hpp"
#include "usersim/cli.h"
#include "usersim/hash.h"
#include "usersim/rng.h"
#include "usersim/tasks.h"
#include "usersim/text.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace usersim;

namespace {

const std::vector<std::string> kAspects = {"acting",   "plot",     "soundtrack",     "ending",
                                           "pacing",   "visuals",  "dialogue",       "characters",
                                           "cinematography", "direction"};
const std::vector<std::string> kPositive = {"was superb", "was brilliant", "kept me hooked",
                                            "was beautiful", "felt fresh", "was outstanding"};
const std::vector<std::string> kNegative = {"was weak", "dragged badly", "felt flat",
                                            "was a mess", "was predictable", "fell apart"};
const std::vector<std::string> kRequestTails = {
    "I want something with a clever plot and a strong ending.",
    "Looking for a dark atmosphere and great acting.",
    "Something light for a family evening would be nice.",
    "I love a good soundtrack and beautiful visuals.",
    "Anything slow and thoughtful is welcome.",
    "Please no horror, I scare easily."};
const std::vector<std::string> kReasons = {"It matches what I asked for.",
                                           "The picks feel off for my request.",
                                           "I have heard good things about these."};

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& v) {
  return v[rng.Uniform(v.size())];
}

bool Chance(Rng& rng, double p) { return rng.UniformReal() < p; }

class ToySimulator {
 public:
  ToySimulator(const ItemCatalog& catalog, const RatingStats& stats) : stats_(stats) {
    for (const auto& [key, count] : catalog.counts()) {
      pool_.push_back(catalog.Find(key));
      weight_total_ += static_cast<double>(count);
      cumulative_.push_back(weight_total_);
    }
  }

  std::string Answer(const PromptCase& pc) const {
    Rng rng(Fnv1a64(pc.prompt_text));
    if (pc.id.starts_with("absa/")) return Aspects(pc, rng);
    switch (pc.task) {
      case Task::kT1: return Items(pc, rng);
      case Task::kT2: return Binary(pc, rng);
      case Task::kT3: return Review(pc, rng);
      case Task::kT4: return Request(pc, rng);
      case Task::kT5: return Feedback(pc, rng);
    }
    return "";
  }

 private:
  const Item* Popular(Rng& rng) const {
    const double x = rng.UniformReal() * weight_total_;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    return pool_[std::min<size_t>(static_cast<size_t>(it - cumulative_.begin()), pool_.size() - 1)];
  }

  std::string Items(const PromptCase& pc, Rng& rng) const {
    std::set<std::string> used;
    for (const auto& r : pc.prompt_items) used.insert(r.key);
    std::string out;
    if (Chance(rng, 0.1)) out += "Here are my picks:\n";
    const int n = pc.target_num.value_or(3);
    for (int i = 0; i < n; ++i) {
      std::string line;
      if (Chance(rng, 0.08)) {
        line = fmt::format("The Midnight Harbor ({})", 1990 + rng.Uniform(30));
      } else {
        const Item* item = Popular(rng);
        for (int tries = 0; used.count(item->canonical_key) && tries < 5; ++tries) {
          item = Popular(rng);
        }
        used.insert(item->canonical_key);
        std::string title = item->title;
        if (Chance(rng, 0.1) && title.size() > 6 && Utf8Length(title) == title.size()) {
          title.erase(title.size() / 2, 1);  // a typo
        } else if (Chance(rng, 0.1)) {
          title = ToLowerAscii(title);
        }
        line = fmt::format("{} ({})", title, item->year);
      }
      const uint64_t style = rng.Uniform(3);
      if (style == 0) line = fmt::format("{}. {}", i + 1, line);
      if (style == 1) line = "- " + line;
      out += line + "\n";
    }
    return out;
  }

  std::string Binary(const PromptCase& pc, Rng& rng) const {
    double p = 0.5;
    auto it = stats_.per_movie.find(pc.prompt_items.at(0).key);
    if (it != stats_.per_movie.end()) {
      p = 1.0 / (1.0 + std::exp(-2.0 * (it->second.AverageRating() - 3.0)));
    }
    if (pc.prompt_text.find("extremely picky") != std::string::npos) p *= 0.6;
    if (Chance(rng, 0.03)) return "As an AI, I do not watch movies.";
    if (Chance(rng, p)) return Chance(rng, 0.5) ? "Yes" : "Yes, I liked it a lot.";
    return Chance(rng, 0.5) ? "No" : "No.";
  }

  std::string Review(const PromptCase& pc, Rng& rng) const {
    std::string out;
    const uint64_t n = 1 + rng.Uniform(3);
    for (uint64_t i = 0; i < n; ++i) {
      if (!out.empty()) out += " ";
      out += "The " + Pick(rng, kAspects) + " " +
             (Chance(rng, 0.65) ? Pick(rng, kPositive) : Pick(rng, kNegative)) + ".";
    }
    const auto limit = static_cast<size_t>(pc.target_len.value_or(400));
    if (out.size() > limit && limit > 10) out = out.substr(0, limit);
    return out;
  }

  std::string Request(const PromptCase& pc, Rng& rng) const {
    std::vector<std::string> shown;
    for (const auto& r : pc.prompt_items) shown.push_back(r.display);
    std::string out = shown.empty() ? "I need a movie for tonight."
                                    : "I recently enjoyed " + JoinStrings(shown, " and ") + ".";
    out += " " + Pick(rng, kRequestTails);
    if (Chance(rng, 0.5)) out += " " + Pick(rng, kRequestTails);
    return out;
  }

  std::string Feedback(const PromptCase& pc, Rng& rng) const {
    const FeedbackSetup& fb = pc.feedback.value();
    std::string out;
    if (fb.mode == FeedbackMode::kAcceptReject) {
      const double p = fb.polarity == Polarity::kPositive ? 0.85 : 0.35;
      out = Chance(rng, p) ? "Accept" : "Reject";
    } else {
      if (Chance(rng, 0.05)) return "Neither of them fits my request.";
      const bool positive = Chance(rng, 0.7);
      const int slot = positive ? fb.positive_slot : 3 - fb.positive_slot;
      out = fmt::format("AGENT {}", slot);
    }
    if (fb.reason_requested) out += ". " + Pick(rng, kReasons);
    return out;
  }

  std::string Aspects(const PromptCase& pc, Rng& rng) const {
    if (!pc.id.starts_with("absa/retry/") && Chance(rng, 0.05)) {
      return "Sure! Here is what I found.";
    }
    const size_t at = pc.prompt_text.rfind("Text:\n");
    const std::string text = ToLowerAscii(pc.prompt_text.substr(at == std::string::npos ? 0 : at + 6));
    json out = json::array();
    for (const auto& a : kAspects) {
      const size_t pos = text.find(a);
      if (pos == std::string::npos) continue;
      const std::string rest = text.substr(pos + a.size(), 24);
      std::string sentiment = "neutral";
      for (const auto& w : kPositive) {
        if (rest.find(w) != std::string::npos) sentiment = "positive";
      }
      for (const auto& w : kNegative) {
        if (rest.find(w) != std::string::npos) sentiment = "negative";
      }
      out.push_back({{"aspect", a}, {"sentiment", sentiment}});
    }
    return Chance(rng, 0.2) ? "```json\n" + out.dump() + "\n```" : out.dump();
  }

  const RatingStats& stats_;
  std::vector<const Item*> pool_;
  std::vector<double> cumulative_;
  double weight_total_ = 0;
};

// 16-dimensional vectors seeded by the token, so reruns agree.
void WriteVectors(const fs::path& path, const std::set<std::string>& vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << vocab.size() << " 16\n";
  for (const auto& w : vocab) {
    Rng rng(Fnv1a64(w));
    out << w;
    for (int d = 0; d < 16; ++d) out << fmt::format(" {:.6f}", rng.UniformReal() * 2.0 - 1.0);
    out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerate the bundled sample fixtures", "make_fixture"};
  std::string sample = "data/sample";
  app.add_option("--sample", sample, "Sample directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  try {
    const fs::path dir(sample);
    const fs::path work = fs::temp_directory_path() / ("usersim_fixture_" + std::to_string(::getpid()));
    fs::remove_all(work);
    const fs::path data = work / "data";
    for (Dataset ds : {Dataset::kRedial, Dataset::kReddit, Dataset::kImdb}) {
      Ingest({ds, {dir / "raw" / (std::string(DatasetName(ds)) + ".jsonl")}, data, 0, 3.5});
    }
    Ingest({Dataset::kMovieLens, {dir / "raw" / "movielens"}, data, 0, 3.5});

    std::set<std::string> vocab;
    for (const auto& c : ReadCases(CasesPath(data, Dataset::kReddit))) {
      for (auto& t : Tokenize(c.request_text.value_or(""))) vocab.insert(t);
      for (const auto& r : c.request_items) {
        for (auto& t : Tokenize(r.display)) vocab.insert(t);
      }
    }
    for (const auto& s : kRequestTails) {
      for (auto& t : Tokenize(s)) vocab.insert(t);
    }
    for (auto& t : Tokenize("I recently enjoyed and I need a movie for tonight")) vocab.insert(t);
    WriteVectors(dir / "vectors.txt", vocab);

    ItemCatalog catalog;
    for (Dataset ds : {Dataset::kRedial, Dataset::kReddit, Dataset::kImdb, Dataset::kMovieLens}) {
      std::ifstream in(CatalogPath(data, ds));
      catalog.Merge(ItemCatalog::FromJson(json::parse(in)));
    }
    std::ifstream rin(RatingsPath(data));
    const RatingStats stats = RatingStats::FromJson(json::parse(rin));
    ToySimulator toy(catalog, stats);

    std::mutex mu;
    std::map<std::string, std::string> recorded;
    ScriptedBackend backend(
        [&](const PromptCase& pc) {
          std::string reply = toy.Answer(pc);
          std::lock_guard<std::mutex> lock(mu);
          recorded[Sha256Hex(pc.prompt_text)] = reply;
          return reply;
        },
        "sample-replay");

    RunRequest run;
    run.tasks = {Task::kT1, Task::kT2, Task::kT3, Task::kT4, Task::kT5};
    run.explanations = true;
    run.reasons = true;
    run.config_path = dir / "config.json";
    run.data_dir = data;
    run.out_dir = work / "run";
    ExecuteRun(run, &backend);

    std::ofstream out(dir / "replay.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& [sha, reply] : recorded) {
      out << json{{"prompt_sha256", sha}, {"response", reply}}.dump() << "\n";
    }
    fs::remove_all(work);
    std::cout << recorded.size() << " replies, " << vocab.size() << " words\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
