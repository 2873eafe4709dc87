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

#ifndef USERSIM_METRICS_H_
#define USERSIM_METRICS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "usersim/persona.h"

namespace usersim {

// A statistic that may be undefined (zero variance, zero centroid, no valid
// samples). Undefined values are reported as such, never coerced to 0.
struct Stat {
  std::optional<double> value;
  std::string undefined_reason;

  static Stat Of(double v) { return Stat{v, {}}; }
  static Stat Undefined(std::string why) { return Stat{std::nullopt, std::move(why)}; }
  bool defined() const { return value.has_value(); }

  // Number when defined, {"undefined": reason} otherwise.
  nlohmann::json ToJson() const;
  static Stat FromJson(const nlohmann::json& j);
};

// Multiset of categorical outcomes.
class Distribution {
 public:
  void Add(std::string_view category, int64_t count = 1);
  int64_t total() const { return total_; }
  bool empty() const { return total_ == 0; }
  size_t size() const { return counts_.size(); }
  int64_t CountOf(std::string_view category) const;
  const std::map<std::string, int64_t, std::less<>>& counts() const { return counts_; }

  // (category, count) by descending count, ties by category.
  std::vector<std::pair<std::string, int64_t>> SortedByFrequency() const;

  void Merge(const Distribution& other);

  nlohmann::json ToJson() const;

 private:
  std::map<std::string, int64_t, std::less<>> counts_;
  int64_t total_ = 0;
};

// Shannon entropy in bits. Throws std::invalid_argument for an empty
// distribution or negative counts.
double Entropy(const Distribution& d);
double EntropyOfCounts(std::span<const int64_t> counts);

struct BinaryTally {
  int64_t yes = 0;
  int64_t no = 0;
  int64_t invalid = 0;
};

// yes / (yes + no); undefined with no valid replies.
Stat PositiveRate(const BinaryTally& t);

struct PearsonResult {
  Stat r;
  // Two-sided t-test on n - 2 degrees of freedom.
  Stat p_value;
  size_t n = 0;
};

// Throws std::invalid_argument on length mismatch or fewer than 2 points.
// Zero variance in either input makes r (and p) undefined.
PearsonResult Pearson(std::span<const double> x, std::span<const double> y);

inline constexpr double kCentroidTolerance = 1e-12;

// 1 - mean_i cos(s_i, centroid). Throws std::invalid_argument for an empty
// set, mixed dimensions, non-finite components or a zero member vector.
// Undefined when the centroid norm is <= kCentroidTolerance.
Stat CosineDiversity(const std::vector<std::vector<double>>& vectors);

// Distinct / total. Throws std::invalid_argument on an empty token list.
double TypeTokenRatio(const std::vector<std::string>& tokens);

enum class Sentiment { kPositive, kNegative, kNeutral };

std::string_view SentimentName(Sentiment s);
std::optional<Sentiment> ParseSentiment(std::string_view s);

struct AspectSentiment {
  std::string aspect;  // normalized: lowercase, single spaces
  Sentiment sentiment = Sentiment::kNeutral;
  std::string case_id;

  friend bool operator==(const AspectSentiment&, const AspectSentiment&) = default;
};

// Lowercases and collapses whitespace; the surface form is kept otherwise.
std::string NormalizeAspect(std::string_view aspect);

struct AspectStats {
  int64_t num_pairs = 0;
  int64_t num_aspects = 0;
  double aspect_entropy = 0.0;
  double sentiment_entropy = 0.0;
  std::array<int64_t, 3> sentiment_counts{};  // positive, negative, neutral

  nlohmann::json ToJson() const;
};

// Throws std::invalid_argument on an empty input.
AspectStats ComputeAspectStats(std::span<const AspectSentiment> pairs);

// Entropy of the token distribution of one text; 0 for a text without tokens.
double WordEntropy(std::string_view text);

struct DiversityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<size_t> members;  // indices into the input
  Stat diversity;               // undefined when fewer than 2 members
};

// Equal-width bins over the observed entropy range; the last bin is closed.
// All-equal entropies give a single bin. Throws std::invalid_argument when
// sizes differ, num_bins < 1 or there are fewer requests than bins.
std::vector<DiversityBin> EntropyBinnedDiversity(
    const std::vector<double>& entropies,
    const std::vector<std::vector<double>>& vectors, int num_bins);

// Bin index for each entropy under the same rule.
std::vector<size_t> AssignEntropyBins(const std::vector<double>& entropies,
                                      int num_bins, int* bins_used = nullptr);

enum class FeedbackOutcome {
  kAccept,
  kReject,
  kPreferPositive,
  kPreferNegative,
  kNeither,
  kInvalid
};

std::string_view FeedbackOutcomeName(FeedbackOutcome o);

struct FeedbackRecord {
  std::string request_id;
  Polarity polarity = Polarity::kPositive;
  FeedbackMode mode = FeedbackMode::kAcceptReject;
  FeedbackOutcome outcome = FeedbackOutcome::kInvalid;
  bool explanation_shown = false;
};

// Maps a raw agent choice (1, 2, or 0 for neither) to a debiased outcome.
FeedbackOutcome DebiasChoice(int chosen_slot, int positive_slot);

struct AcceptRejectCell {
  int64_t accept = 0;
  int64_t reject = 0;
  int64_t total() const { return accept + reject; }
};

struct CoherenceVariant {
  AcceptRejectCell positive;  // accept: coherent, reject: likely incoherent
  AcceptRejectCell negative;  // reject: coherent, accept: incoherent
  int64_t prefer_positive = 0;
  int64_t prefer_negative = 0;
  int64_t neither = 0;
  int64_t invalid = 0;

  Stat PositiveCoherent() const;
  Stat PositiveLikelyIncoherent() const;
  Stat NegativeCoherent() const;
  Stat NegativeIncoherent() const;
  // Over both polarities.
  Stat AcceptRejectCoherent() const;
  // prefer_positive / (prefer_positive + prefer_negative).
  Stat CompareCoherent() const;
  // neither / all valid compare records.
  Stat NeitherRate() const;

  nlohmann::json ToJson() const;
};

struct CoherenceReport {
  // Keyed by explanation_shown.
  std::map<bool, CoherenceVariant> variants;
  nlohmann::json ToJson() const;
};

// Throws std::invalid_argument when no record is classifiable.
CoherenceReport ComputeCoherence(std::span<const FeedbackRecord> records);

// Counts mentioned keys per case once each, after removing that case's
// prompt items.
Distribution ItemDistribution(const std::vector<std::vector<std::string>>& mentioned,
                              const std::vector<std::vector<std::string>>& prompt_items);

}  // namespace usersim

#endif  // USERSIM_METRICS_H_
