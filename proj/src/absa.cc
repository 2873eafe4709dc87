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

#include "usersim/absa.h"

#include <fstream>

#include "http_client.h"
#include "usersim/error.h"
#include "usersim/hash.h"
#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

std::vector<AspectSentiment> ExtractAspects(const std::string& text, AspectExtractor& extractor) {
  if (TrimView(text).empty()) throw std::invalid_argument("aspect extraction of empty text");
  auto results = extractor.ExtractBatch({text});
  if (results.size() != 1) throw std::runtime_error("extractor returned wrong result count");
  if (!results[0].ok) throw std::runtime_error("aspect extraction failed: " + results[0].error);
  return std::move(results[0].pairs);
}

namespace {

std::optional<std::vector<AspectSentiment>> PairsFromJson(const json& a) {
  if (!a.is_array()) return std::nullopt;
  std::vector<AspectSentiment> out;
  for (const auto& e : a) {
    if (!e.is_object() || !e.contains("aspect") || !e.contains("sentiment")) return std::nullopt;
    if (!e["aspect"].is_string() || !e["sentiment"].is_string()) return std::nullopt;
    auto sentiment = ParseSentiment(e["sentiment"].get<std::string>());
    std::string aspect = NormalizeAspect(e["aspect"].get<std::string>());
    if (!sentiment || aspect.empty()) return std::nullopt;
    out.push_back({std::move(aspect), *sentiment, {}});
  }
  return out;
}

}  // namespace

std::optional<std::vector<AspectSentiment>> ParseAspectJson(std::string_view text) {
  std::string_view s = TrimView(text);
  if (s.starts_with("```")) {
    const size_t nl = s.find('\n');
    if (nl == std::string_view::npos || !s.ends_with("```") || s.size() < nl + 4) {
      return std::nullopt;
    }
    s = TrimView(s.substr(nl + 1, s.size() - nl - 4));
  }
  json j = json::parse(s, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return PairsFromJson(j);
}

// ---------------------------------------------------------------------------
// Fixture

FixtureExtractor::FixtureExtractor(std::map<std::string, std::vector<AspectSentiment>> fixture,
                                   std::string id)
    : fixture_(std::move(fixture)), id_(std::move(id)) {}

FixtureExtractor FixtureExtractor::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read aspect fixture " + path.string());
  std::map<std::string, std::vector<AspectSentiment>> fixture;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, false);
    std::optional<std::vector<AspectSentiment>> pairs;
    if (j.is_object() && j.contains("text") && j["text"].is_string() && j.contains("aspects")) {
      pairs = PairsFromJson(j["aspects"]);
    }
    if (!pairs) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": invalid aspect record");
    }
    fixture[j["text"].get<std::string>()] = std::move(*pairs);
  }
  return FixtureExtractor(std::move(fixture), "fixture:" + path.filename().string());
}

std::vector<Extraction> FixtureExtractor::ExtractBatch(const std::vector<std::string>& texts) {
  std::vector<Extraction> out(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    auto it = fixture_.find(texts[i]);
    if (it == fixture_.end()) {
      out[i].error = "text not in fixture (sha256 " + Sha256Hex(texts[i]) + ")";
      continue;
    }
    out[i].ok = true;
    out[i].pairs = it->second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Remote service

RemoteExtractor::RemoteExtractor(std::string endpoint, size_t batch_size,
                                 std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), batch_size_(batch_size), timeout_(timeout) {
  if (batch_size_ == 0 || batch_size_ > kAbsaMaxBatch) {
    throw ConfigError("ABSA batch size must be in 1.." + std::to_string(kAbsaMaxBatch));
  }
}

void RemoteExtractor::Preflight() {
  internal::HttpResponse res;
  try {
    res = internal::Get(endpoint_, "/health", timeout_);
  } catch (const TransientError& e) {
    throw ConfigError(std::string("ABSA service unreachable: ") + e.what());
  }
  if (res.status != 200) {
    throw ConfigError("ABSA service health check returned HTTP " + std::to_string(res.status));
  }
  const json j = json::parse(res.body, nullptr, false);
  if (j.is_object() && j.contains("model_version") && j["model_version"].is_string()) {
    model_version_ = j["model_version"].get<std::string>();
  }
}

std::vector<Extraction> RemoteExtractor::ExtractBatch(const std::vector<std::string>& texts) {
  std::vector<Extraction> out;
  out.reserve(texts.size());
  for (size_t start = 0; start < texts.size(); start += batch_size_) {
    const size_t end = std::min(texts.size(), start + batch_size_);
    const json body = {{"texts", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                                          texts.begin() + static_cast<std::ptrdiff_t>(end))}};
    internal::HttpResponse res;
    try {
      res = internal::PostJson(endpoint_, "/extract", body.dump(), {}, timeout_);
    } catch (const TransientError& e) {
      throw std::runtime_error(std::string("ABSA service unreachable: ") + e.what());
    }
    if (res.status != 200) {
      throw std::runtime_error("ABSA service returned HTTP " + std::to_string(res.status) + ": " +
                               res.body.substr(0, 200));
    }
    const json j = json::parse(res.body, nullptr, false);
    if (!j.is_object() || !j.contains("results") || !j["results"].is_array() ||
        j["results"].size() != end - start) {
      throw std::runtime_error("ABSA service response violates the wire schema");
    }
    for (const auto& r : j["results"]) {
      auto pairs = PairsFromJson(r);
      if (!pairs) throw std::runtime_error("ABSA service response violates the wire schema");
      Extraction e;
      e.ok = true;
      e.pairs = std::move(*pairs);
      out.push_back(std::move(e));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prompt-based

PromptExtractor::PromptExtractor(Gateway& gateway, const TemplateSet& templates)
    : gateway_(gateway), templates_(templates) {
  if (!templates_.Has("absa_extract")) throw ConfigError("template missing: absa_extract.txt");
}

std::string PromptExtractor::id() const { return "prompt:" + gateway_.backend().model(); }

PromptCase PromptExtractor::MakeCase(const std::string& text, bool retry) const {
  PromptCase pc;
  pc.task = Task::kT3;
  pc.id = std::string("absa/") + (retry ? "retry/" : "") + Sha256Hex(text).substr(0, 16);
  pc.prompt_text = templates_.Render("absa_extract", {{"text", text}});
  if (retry && templates_.Has("absa_retry_suffix")) {
    pc.prompt_text += "\n" + templates_.Get("absa_retry_suffix");
  }
  return pc;
}

std::vector<Extraction> PromptExtractor::ExtractBatch(const std::vector<std::string>& texts) {
  std::vector<PromptCase> first;
  first.reserve(texts.size());
  for (const auto& t : texts) first.push_back(MakeCase(t, false));
  const auto replies = gateway_.CompleteAll(first);

  std::vector<Extraction> out(texts.size());
  std::vector<size_t> again;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (!replies[i].failed) {
      if (auto pairs = ParseAspectJson(replies[i].raw_text)) {
        out[i].ok = true;
        out[i].pairs = std::move(*pairs);
        continue;
      }
    }
    again.push_back(i);
  }
  if (again.empty()) return out;

  std::vector<PromptCase> second;
  for (size_t i : again) second.push_back(MakeCase(texts[i], true));
  const auto retried = gateway_.CompleteAll(second);
  for (size_t k = 0; k < again.size(); ++k) {
    Extraction& e = out[again[k]];
    if (retried[k].failed) {
      e.error = "backend failure: " + retried[k].error;
    } else if (auto pairs = ParseAspectJson(retried[k].raw_text)) {
      e.ok = true;
      e.pairs = std::move(*pairs);
    } else {
      e.error = "unparseable JSON after retry";
    }
  }
  return out;
}

std::unique_ptr<AspectExtractor> MakeExtractor(const json& j, const std::filesystem::path& base_dir,
                                               Gateway* gateway, const TemplateSet* templates) {
  const std::string type = j.value("type", "fixture");
  if (type == "fixture") {
    std::filesystem::path p(j.at("path").get<std::string>());
    if (!p.is_absolute()) p = base_dir / p;
    return std::make_unique<FixtureExtractor>(FixtureExtractor::Load(p));
  }
  if (type == "remote") {
    return std::make_unique<RemoteExtractor>(j.at("endpoint").get<std::string>(),
                                             j.value("batch_size", kAbsaMaxBatch),
                                             std::chrono::seconds(j.value("timeout_s", 60)));
  }
  if (type == "prompt") {
    if (gateway == nullptr || templates == nullptr) {
      throw ConfigError("prompt extractor needs a simulator backend");
    }
    return std::make_unique<PromptExtractor>(*gateway, *templates);
  }
  throw ConfigError("unknown aspect extractor type '" + type + "'");
}

}  // namespace usersim
