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

#ifndef USERSIM_ABSA_H_
#define USERSIM_ABSA_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "usersim/gateway.h"
#include "usersim/metrics.h"

namespace usersim {

struct Extraction {
  bool ok = false;
  std::vector<AspectSentiment> pairs;
  std::string error;
};

class AspectExtractor {
 public:
  virtual ~AspectExtractor() = default;
  virtual std::string id() const = 0;
  // One result per text, in order. Per-text failures are reported in the
  // result; an unusable extractor throws.
  virtual std::vector<Extraction> ExtractBatch(const std::vector<std::string>& texts) = 0;
  virtual void Preflight() {}
};

// Pairs for a single text. Throws std::invalid_argument on an empty text
// and std::runtime_error when the extractor fails for it.
std::vector<AspectSentiment> ExtractAspects(const std::string& text, AspectExtractor& extractor);

// Parses [{"aspect": ..., "sentiment": ...}, ...]. Returns nullopt unless
// every element is schema-valid. Surrounding whitespace and a single
// markdown code fence are tolerated.
std::optional<std::vector<AspectSentiment>> ParseAspectJson(std::string_view text);

// Exact text -> pairs map. Texts missing from the fixture fail.
class FixtureExtractor : public AspectExtractor {
 public:
  explicit FixtureExtractor(std::map<std::string, std::vector<AspectSentiment>> fixture,
                            std::string id = "fixture");
  // JSON lines of {"text": ..., "aspects": [{"aspect", "sentiment"}]}.
  static FixtureExtractor Load(const std::filesystem::path& path);

  std::string id() const override { return id_; }
  std::vector<Extraction> ExtractBatch(const std::vector<std::string>& texts) override;
  const std::map<std::string, std::vector<AspectSentiment>>& fixture() const {
    return fixture_;
  }

 private:
  std::map<std::string, std::vector<AspectSentiment>> fixture_;
  std::string id_;
};

inline constexpr size_t kAbsaMaxBatch = 256;

// Client for the remote extraction service:
//   POST {endpoint}/extract  {"texts": [string]}
//   200 -> {"results": [[{"aspect": string, "sentiment": string}]]}
//   400 malformed body, 413 batch too large, 500 model failure.
// Any transport failure or schema violation is fatal.
class RemoteExtractor : public AspectExtractor {
 public:
  explicit RemoteExtractor(std::string endpoint, size_t batch_size = kAbsaMaxBatch,
                           std::chrono::seconds timeout = std::chrono::seconds(60));

  std::string id() const override { return "remote:" + endpoint_; }
  std::vector<Extraction> ExtractBatch(const std::vector<std::string>& texts) override;
  void Preflight() override;  // GET {endpoint}/health must answer 200

  // model_version reported by /health after Preflight, if any.
  const std::string& model_version() const { return model_version_; }

 private:
  std::string endpoint_;
  size_t batch_size_;
  std::chrono::seconds timeout_;
  std::string model_version_;
};

// Asks a simulator backend for JSON tuples through the absa_extract
// template. An unparseable reply is retried once with absa_retry_suffix
// appended; a second failure fails that text.
class PromptExtractor : public AspectExtractor {
 public:
  PromptExtractor(Gateway& gateway, const TemplateSet& templates);

  std::string id() const override;
  std::vector<Extraction> ExtractBatch(const std::vector<std::string>& texts) override;

 private:
  PromptCase MakeCase(const std::string& text, bool retry) const;

  Gateway& gateway_;
  const TemplateSet& templates_;
};

// {"type": "fixture", "path"} | {"type": "remote", "endpoint"} |
// {"type": "prompt"} (uses the run's simulator gateway).
std::unique_ptr<AspectExtractor> MakeExtractor(const nlohmann::json& j,
                                               const std::filesystem::path& base_dir,
                                               Gateway* gateway, const TemplateSet* templates);

}  // namespace usersim

#endif  // USERSIM_ABSA_H_
