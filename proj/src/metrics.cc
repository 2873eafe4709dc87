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

#include "usersim/metrics.h"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "usersim/simd/kernels.h"
#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

json Stat::ToJson() const {
  if (value) return *value;
  return json{{"undefined", undefined_reason}};
}

Stat Stat::FromJson(const json& j) {
  if (j.is_number()) return Of(j.get<double>());
  return Undefined(j.value("undefined", ""));
}

// ---------------------------------------------------------------------------
// Distribution and entropy

void Distribution::Add(std::string_view category, int64_t count) {
  if (count < 0) throw std::invalid_argument("negative count");
  if (count == 0) return;
  auto it = counts_.find(category);
  if (it == counts_.end()) {
    counts_.emplace(std::string(category), count);
  } else {
    it->second += count;
  }
  total_ += count;
}

int64_t Distribution::CountOf(std::string_view category) const {
  auto it = counts_.find(category);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, int64_t>> Distribution::SortedByFrequency() const {
  std::vector<std::pair<std::string, int64_t>> out(counts_.begin(), counts_.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

void Distribution::Merge(const Distribution& other) {
  for (const auto& [k, v] : other.counts_) Add(k, v);
}

json Distribution::ToJson() const {
  json counts = json::object();
  for (const auto& [k, v] : counts_) counts[k] = v;
  return {{"total", total_}, {"categories", counts_.size()}, {"counts", counts}};
}

double EntropyOfCounts(std::span<const int64_t> counts) {
  int64_t total = 0;
  for (int64_t c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("entropy of an empty distribution");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (int64_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  // Rounding can leave -0.0 or a tiny negative for one category.
  return h > 0.0 ? h : 0.0;
}

double Entropy(const Distribution& d) {
  std::vector<int64_t> counts;
  counts.reserve(d.size());
  for (const auto& [k, v] : d.counts()) counts.push_back(v);
  return EntropyOfCounts(counts);
}

Stat PositiveRate(const BinaryTally& t) {
  const int64_t valid = t.yes + t.no;
  if (valid == 0) return Stat::Undefined("no valid replies");
  return Stat::Of(static_cast<double>(t.yes) / static_cast<double>(valid));
}

// ---------------------------------------------------------------------------
// Pearson

PearsonResult Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: fewer than 2 points");
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("pearson: non-finite input");
    }
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  PearsonResult out;
  out.n = n;
  if (sxx == 0.0 || syy == 0.0) {
    out.r = Stat::Undefined("zero variance");
    out.p_value = Stat::Undefined("zero variance");
    return out;
  }
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.r = Stat::Of(r);
  if (n < 3) {
    out.p_value = Stat::Undefined("fewer than 3 points");
  } else if (std::abs(r) == 1.0) {
    out.p_value = Stat::Of(0.0);
  } else {
    const double df = static_cast<double>(n - 2);
    const double t = r * std::sqrt(df / (1.0 - r * r));
    boost::math::students_t dist(df);
    out.p_value = Stat::Of(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cosine diversity

Stat CosineDiversity(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("cosine diversity of an empty set");
  const size_t dim = vectors.front().size();
  if (dim == 0) throw std::invalid_argument("zero-dimensional vectors");
  std::vector<double> centroid(dim, 0.0);
  std::vector<double> norms;
  norms.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != dim) throw std::invalid_argument("mixed vector dimensions");
    for (double c : v) {
      if (!std::isfinite(c)) throw std::invalid_argument("non-finite vector component");
    }
    const double norm = std::sqrt(simd::SquaredNorm(v.data(), dim));
    if (norm == 0.0) throw std::invalid_argument("zero vector in embedding set");
    norms.push_back(norm);
    simd::Accumulate(centroid.data(), v.data(), dim);
  }
  const double inv_n = 1.0 / static_cast<double>(vectors.size());
  for (double& c : centroid) c *= inv_n;
  const double cnorm = std::sqrt(simd::SquaredNorm(centroid.data(), dim));
  if (cnorm <= kCentroidTolerance) return Stat::Undefined("zero centroid");
  double sum = 0.0;
  for (size_t i = 0; i < vectors.size(); ++i) {
    sum += simd::Dot(vectors[i].data(), centroid.data(), dim) / (norms[i] * cnorm);
  }
  return Stat::Of(1.0 - sum * inv_n);
}

double TypeTokenRatio(const std::vector<std::string>& tokens) {
  if (tokens.empty()) throw std::invalid_argument("type-token ratio of an empty corpus");
  std::unordered_set<std::string_view> distinct(tokens.begin(), tokens.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(tokens.size());
}

// ---------------------------------------------------------------------------
// Aspects

std::string_view SentimentName(Sentiment s) {
  switch (s) {
    case Sentiment::kPositive: return "positive";
    case Sentiment::kNegative: return "negative";
    case Sentiment::kNeutral: return "neutral";
  }
  return "neutral";
}

std::optional<Sentiment> ParseSentiment(std::string_view s) {
  const std::string lower = ToLowerAscii(TrimView(s));
  if (lower == "positive") return Sentiment::kPositive;
  if (lower == "negative") return Sentiment::kNegative;
  if (lower == "neutral") return Sentiment::kNeutral;
  return std::nullopt;
}

std::string NormalizeAspect(std::string_view aspect) {
  std::string out;
  bool space = false;
  for (char c : aspect) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c);
  }
  return out;
}

json AspectStats::ToJson() const {
  return {{"num_pairs", num_pairs},
          {"num_aspects", num_aspects},
          {"aspect_entropy", aspect_entropy},
          {"sentiment_entropy", sentiment_entropy},
          {"sentiment_counts",
           {{"positive", sentiment_counts[0]},
            {"negative", sentiment_counts[1]},
            {"neutral", sentiment_counts[2]}}}};
}

AspectStats ComputeAspectStats(std::span<const AspectSentiment> pairs) {
  if (pairs.empty()) throw std::invalid_argument("aspect stats of an empty set");
  Distribution aspects;
  AspectStats s;
  for (const auto& p : pairs) {
    aspects.Add(p.aspect);
    ++s.sentiment_counts[static_cast<size_t>(p.sentiment)];
  }
  s.num_pairs = static_cast<int64_t>(pairs.size());
  s.num_aspects = static_cast<int64_t>(aspects.size());
  s.aspect_entropy = Entropy(aspects);
  s.sentiment_entropy = EntropyOfCounts(s.sentiment_counts);
  return s;
}

// ---------------------------------------------------------------------------
// Entropy-binned diversity

double WordEntropy(std::string_view text) {
  Distribution d;
  for (const auto& t : Tokenize(text)) d.Add(t);
  return d.empty() ? 0.0 : Entropy(d);
}

std::vector<size_t> AssignEntropyBins(const std::vector<double>& entropies,
                                      int num_bins, int* bins_used) {
  if (num_bins < 1) throw std::invalid_argument("num_bins must be >= 1");
  if (entropies.size() < static_cast<size_t>(num_bins)) {
    throw std::invalid_argument("fewer requests than bins");
  }
  const auto [lo_it, hi_it] = std::minmax_element(entropies.begin(), entropies.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<size_t> out(entropies.size(), 0);
  if (hi == lo) {
    if (bins_used) *bins_used = 1;
    return out;
  }
  if (bins_used) *bins_used = num_bins;
  const double width = (hi - lo) / num_bins;
  for (size_t i = 0; i < entropies.size(); ++i) {
    auto b = static_cast<size_t>(std::floor((entropies[i] - lo) / width));
    out[i] = std::min(b, static_cast<size_t>(num_bins - 1));
  }
  return out;
}

std::vector<DiversityBin> EntropyBinnedDiversity(
    const std::vector<double>& entropies,
    const std::vector<std::vector<double>>& vectors, int num_bins) {
  if (entropies.size() != vectors.size()) {
    throw std::invalid_argument("entropies and vectors differ in length");
  }
  int used = 0;
  const auto assignment = AssignEntropyBins(entropies, num_bins, &used);
  const auto [lo_it, hi_it] = std::minmax_element(entropies.begin(), entropies.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = used > 1 ? (hi - lo) / used : 0.0;
  std::vector<DiversityBin> bins(static_cast<size_t>(used));
  for (size_t b = 0; b < bins.size(); ++b) {
    bins[b].lower = lo + width * static_cast<double>(b);
    bins[b].upper = b + 1 == bins.size() ? hi : lo + width * static_cast<double>(b + 1);
  }
  for (size_t i = 0; i < assignment.size(); ++i) bins[assignment[i]].members.push_back(i);
  for (auto& bin : bins) {
    if (bin.members.size() < 2) {
      bin.diversity = Stat::Undefined("fewer than 2 requests");
      continue;
    }
    std::vector<std::vector<double>> member_vectors;
    member_vectors.reserve(bin.members.size());
    for (size_t i : bin.members) member_vectors.push_back(vectors[i]);
    bin.diversity = CosineDiversity(member_vectors);
  }
  return bins;
}

// ---------------------------------------------------------------------------
// Coherence

std::string_view FeedbackOutcomeName(FeedbackOutcome o) {
  switch (o) {
    case FeedbackOutcome::kAccept: return "accept";
    case FeedbackOutcome::kReject: return "reject";
    case FeedbackOutcome::kPreferPositive: return "prefer_positive";
    case FeedbackOutcome::kPreferNegative: return "prefer_negative";
    case FeedbackOutcome::kNeither: return "neither";
    case FeedbackOutcome::kInvalid: return "invalid";
  }
  return "invalid";
}

FeedbackOutcome DebiasChoice(int chosen_slot, int positive_slot) {
  if (chosen_slot == 0) return FeedbackOutcome::kNeither;
  if (chosen_slot != 1 && chosen_slot != 2) return FeedbackOutcome::kInvalid;
  if (positive_slot != 1 && positive_slot != 2) {
    throw std::invalid_argument("positive_slot must be 1 or 2");
  }
  return chosen_slot == positive_slot ? FeedbackOutcome::kPreferPositive
                                      : FeedbackOutcome::kPreferNegative;
}

namespace {

Stat Ratio(int64_t num, int64_t den, const char* why) {
  if (den == 0) return Stat::Undefined(why);
  return Stat::Of(static_cast<double>(num) / static_cast<double>(den));
}

}  // namespace

Stat CoherenceVariant::PositiveCoherent() const {
  return Ratio(positive.accept, positive.total(), "no positive records");
}
Stat CoherenceVariant::PositiveLikelyIncoherent() const {
  return Ratio(positive.reject, positive.total(), "no positive records");
}
Stat CoherenceVariant::NegativeCoherent() const {
  return Ratio(negative.reject, negative.total(), "no negative records");
}
Stat CoherenceVariant::NegativeIncoherent() const {
  return Ratio(negative.accept, negative.total(), "no negative records");
}
Stat CoherenceVariant::AcceptRejectCoherent() const {
  return Ratio(positive.accept + negative.reject, positive.total() + negative.total(),
               "no accept/reject records");
}
Stat CoherenceVariant::CompareCoherent() const {
  return Ratio(prefer_positive, prefer_positive + prefer_negative,
               "no decisive compare records");
}
Stat CoherenceVariant::NeitherRate() const {
  return Ratio(neither, prefer_positive + prefer_negative + neither, "no compare records");
}

json CoherenceVariant::ToJson() const {
  return {{"accept_reject",
           {{"positive",
             {{"n", positive.total()},
              {"coherent", PositiveCoherent().ToJson()},
              {"likely_incoherent", PositiveLikelyIncoherent().ToJson()}}},
            {"negative",
             {{"n", negative.total()},
              {"coherent", NegativeCoherent().ToJson()},
              {"incoherent", NegativeIncoherent().ToJson()}}},
            {"coherent", AcceptRejectCoherent().ToJson()}}},
          {"compare",
           {{"prefer_positive", prefer_positive},
            {"prefer_negative", prefer_negative},
            {"neither", neither},
            {"coherent", CompareCoherent().ToJson()},
            {"neither_rate", NeitherRate().ToJson()}}},
          {"invalid", invalid}};
}

json CoherenceReport::ToJson() const {
  json j = json::object();
  for (const auto& [shown, v] : variants) j[shown ? "with_explanations" : "items_only"] = v.ToJson();
  return j;
}

CoherenceReport ComputeCoherence(std::span<const FeedbackRecord> records) {
  CoherenceReport report;
  int64_t classified = 0;
  for (const auto& r : records) {
    CoherenceVariant& v = report.variants[r.explanation_shown];
    if (r.mode == FeedbackMode::kAcceptReject) {
      AcceptRejectCell& cell = r.polarity == Polarity::kPositive ? v.positive : v.negative;
      if (r.outcome == FeedbackOutcome::kAccept) {
        ++cell.accept;
      } else if (r.outcome == FeedbackOutcome::kReject) {
        ++cell.reject;
      } else {
        ++v.invalid;
        continue;
      }
    } else {
      switch (r.outcome) {
        case FeedbackOutcome::kPreferPositive: ++v.prefer_positive; break;
        case FeedbackOutcome::kPreferNegative: ++v.prefer_negative; break;
        case FeedbackOutcome::kNeither: ++v.neither; break;
        default: ++v.invalid; continue;
      }
    }
    ++classified;
  }
  if (classified == 0) throw std::invalid_argument("no classifiable feedback records");
  return report;
}

Distribution ItemDistribution(const std::vector<std::vector<std::string>>& mentioned,
                              const std::vector<std::vector<std::string>>& prompt_items) {
  if (mentioned.size() != prompt_items.size()) {
    throw std::invalid_argument("item distribution: case count mismatch");
  }
  Distribution d;
  for (size_t i = 0; i < mentioned.size(); ++i) {
    std::set<std::string_view> skip(prompt_items[i].begin(), prompt_items[i].end());
    std::set<std::string_view> seen;
    for (const auto& key : mentioned[i]) {
      if (skip.count(key) || !seen.insert(key).second) continue;
      d.Add(key);
    }
  }
  return d;
}

}  // namespace usersim
