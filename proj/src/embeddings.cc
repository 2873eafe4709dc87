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

#include "usersim/embeddings.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "http_client.h"
#include "usersim/error.h"
#include "usersim/hash.h"
#include "usersim/text.h"

namespace usersim {

using nlohmann::json;

void CheckVector(const Vector& v, size_t dim, std::string_view what) {
  if (v.size() != dim) {
    throw EmbeddingError(std::string(what) + ": expected dim " + std::to_string(dim) +
                         ", got " + std::to_string(v.size()));
  }
  for (double c : v) {
    if (!std::isfinite(c)) throw EmbeddingError(std::string(what) + ": non-finite component");
  }
}

// ---------------------------------------------------------------------------
// Word vectors

namespace {

bool ParseDouble(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string_view> Fields(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

WordVectorTable WordVectorTable::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read word vectors " + path.string());
  WordVectorTable t;
  t.id_ = "static:" + path.filename().string();
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = Fields(line);
    if (f.empty()) continue;
    if (line_no == 1 && f.size() == 2) {
      double a = 0, b = 0;
      if (ParseDouble(f[0], a) && ParseDouble(f[1], b)) continue;  // "count dim"
    }
    Vector v(f.size() - 1);
    for (size_t i = 1; i < f.size(); ++i) {
      if (!ParseDouble(f[i], v[i - 1])) {
        throw EmbeddingError(path.string() + ":" + std::to_string(line_no) +
                             ": bad component '" + std::string(f[i]) + "'");
      }
    }
    if (t.dim_ == 0) t.dim_ = v.size();
    if (t.dim_ == 0) throw EmbeddingError(path.string() + ": zero-dimensional vector");
    CheckVector(v, t.dim_, path.string() + ":" + std::to_string(line_no));
    t.vectors_.emplace(std::string(f[0]), std::move(v));
  }
  if (t.vectors_.empty()) throw EmbeddingError(path.string() + ": no vectors");
  return t;
}

WordVectorTable WordVectorTable::FromMap(std::string id, std::map<std::string, Vector> vectors) {
  WordVectorTable t;
  t.id_ = std::move(id);
  for (auto& [token, v] : vectors) {
    if (t.dim_ == 0) t.dim_ = v.size();
    CheckVector(v, t.dim_, "word vector '" + token + "'");
    t.vectors_.emplace(token, std::move(v));
  }
  return t;
}

std::optional<Vector> WordVectorTable::Lookup(const std::string& token) const {
  auto it = vectors_.find(token);
  if (it == vectors_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Sentence providers

FixtureSentenceProvider::FixtureSentenceProvider(std::string id,
                                                 std::map<std::string, Vector> vectors)
    : id_(std::move(id)), vectors_(std::move(vectors)) {
  for (const auto& [text, v] : vectors_) {
    if (dim_ == 0) dim_ = v.size();
    CheckVector(v, dim_, "fixture vector");
  }
}

FixtureSentenceProvider FixtureSentenceProvider::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sentence fixture " + path.string());
  std::map<std::string, Vector> vectors;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    vectors[j.at("text").get<std::string>()] = j.at("vector").get<Vector>();
  }
  return FixtureSentenceProvider("fixture:" + path.filename().string(), std::move(vectors));
}

std::vector<Vector> FixtureSentenceProvider::EmbedBatch(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = vectors_.find(t);
    if (it == vectors_.end()) {
      throw EmbeddingError("sentence fixture has no vector for text sha256 " + Sha256Hex(t));
    }
    out.push_back(it->second);
  }
  return out;
}

MeanWordSentenceProvider::MeanWordSentenceProvider(
    std::shared_ptr<const WordEmbeddingProvider> words)
    : words_(std::move(words)) {}

std::string MeanWordSentenceProvider::id() const { return "mean_word:" + words_->id(); }

std::vector<Vector> MeanWordSentenceProvider::EmbedBatch(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    Vector sum(words_->dim(), 0.0);
    size_t found = 0;
    for (const auto& tok : Tokenize(text)) {
      if (auto v = words_->Lookup(tok)) {
        for (size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
        ++found;
      }
    }
    if (found == 0) {
      throw EmbeddingError("no in-vocabulary token in text sha256 " + Sha256Hex(text));
    }
    for (double& c : sum) c /= static_cast<double>(found);
    out.push_back(std::move(sum));
  }
  return out;
}

RemoteSentenceProvider::RemoteSentenceProvider(RemoteEmbeddingConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (config_.batch_size == 0) throw ConfigError("embedding batch_size must be >= 1");
}

void RemoteSentenceProvider::Preflight() {
  if (config_.endpoint.empty()) throw ConfigError("remote embeddings need an endpoint");
  if (config_.api_key_env.empty()) return;
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("credential variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
}

std::vector<Vector> RemoteSentenceProvider::Post(const std::vector<std::string>& batch) {
  const json body = {{"model", config_.model}, {"input", batch}};
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  const auto res = internal::PostJson(config_.endpoint, "/v1/embeddings", body.dump(), headers,
                                      config_.timeout);
  internal::ThrowForStatus(res, "embedding request");
  std::vector<Vector> out(batch.size());
  try {
    const json j = json::parse(res.body);
    const json& data = j.at("data");
    if (data.size() != batch.size()) {
      throw EmbeddingError("embedding response has " + std::to_string(data.size()) +
                           " vectors for " + std::to_string(batch.size()) + " texts");
    }
    for (size_t i = 0; i < data.size(); ++i) {
      const size_t index = data[i].value("index", i);
      if (index >= out.size()) throw EmbeddingError("embedding index out of range");
      out[index] = data[i].at("embedding").get<Vector>();
    }
  } catch (const json::exception& e) {
    throw EmbeddingError(std::string("bad embedding response: ") + e.what());
  }
  for (const auto& v : out) {
    if (dim_ == 0) dim_ = v.size();
    CheckVector(v, dim_, "remote embedding");
  }
  return out;
}

std::vector<Vector> RemoteSentenceProvider::EmbedBatch(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (size_t start = 0; start < texts.size(); start += config_.batch_size) {
    const size_t end = std::min(texts.size(), start + config_.batch_size);
    const std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                         texts.begin() + static_cast<std::ptrdiff_t>(end));
    auto backoff = config_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      try {
        for (auto& v : Post(batch)) out.push_back(std::move(v));
        break;
      } catch (const TransientError& e) {
        if (attempt >= config_.max_retries) {
          throw EmbeddingError(std::string("embedding batch failed after retries: ") + e.what());
        }
        sleeper_(backoff);
        backoff *= 2;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache and entry points

std::optional<Vector> EmbeddingCache::Get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  ++hits_;
  return it->second;
}

void EmbeddingCache::Put(const std::string& key, Vector v) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.insert_or_assign(key, std::move(v));
}

size_t EmbeddingCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

WordEmbeddings EmbedWords(const std::vector<std::string>& tokens,
                          const WordEmbeddingProvider& provider, EmbeddingCache& cache) {
  WordEmbeddings out;
  const std::string prefix = provider.id() + '\0' + "w" + '\0';
  for (const auto& tok : tokens) {
    const std::string key = prefix + tok;
    if (auto hit = cache.Get(key)) {
      out.vectors[tok] = std::move(*hit);
      continue;
    }
    auto v = provider.Lookup(tok);
    if (!v) {
      ++out.out_of_vocabulary;
      continue;
    }
    CheckVector(*v, provider.dim(), "word vector '" + tok + "'");
    cache.Put(key, *v);
    out.vectors[tok] = std::move(*v);
  }
  return out;
}

std::vector<Vector> EmbedSentences(const std::vector<std::string>& texts,
                                   SentenceEmbeddingProvider& provider, EmbeddingCache& cache) {
  if (texts.empty()) throw std::invalid_argument("no texts to embed");
  const std::string prefix = provider.id() + '\0' + "s" + '\0';
  std::vector<Vector> out(texts.size());
  std::vector<std::string> missing;
  std::vector<size_t> missing_at;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].empty()) throw std::invalid_argument("empty text to embed");
    if (auto hit = cache.Get(prefix + Sha256Hex(texts[i]))) {
      out[i] = std::move(*hit);
    } else {
      missing.push_back(texts[i]);
      missing_at.push_back(i);
    }
  }
  if (!missing.empty()) {
    auto fresh = provider.EmbedBatch(missing);
    if (fresh.size() != missing.size()) throw EmbeddingError("provider returned wrong count");
    for (size_t k = 0; k < fresh.size(); ++k) {
      CheckVector(fresh[k], provider.dim(), "sentence vector");
      cache.Put(prefix + Sha256Hex(missing[k]), fresh[k]);
      out[missing_at[k]] = std::move(fresh[k]);
    }
  }
  return out;
}

EmbeddingProviders MakeEmbeddingProviders(const json& j, const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  EmbeddingProviders out;
  try {
    if (j.contains("word")) {
      const json& w = j["word"];
      const std::string type = w.value("type", "static");
      if (type != "static") throw ConfigError("unknown word embedding type '" + type + "'");
      out.word = std::make_shared<WordVectorTable>(
          WordVectorTable::Load(resolve(w.at("path").get<std::string>())));
    }
    if (j.contains("sentence")) {
      const json& s = j["sentence"];
      const std::string type = s.value("type", "mean_word");
      if (type == "mean_word") {
        if (!out.word) throw ConfigError("mean_word sentence embeddings need word vectors");
        out.sentence = std::make_shared<MeanWordSentenceProvider>(out.word);
      } else if (type == "fixture") {
        out.sentence = std::make_shared<FixtureSentenceProvider>(
            FixtureSentenceProvider::Load(resolve(s.at("path").get<std::string>())));
      } else if (type == "remote") {
        RemoteEmbeddingConfig rc;
        rc.endpoint = s.at("endpoint").get<std::string>();
        rc.model = s.value("model", "");
        rc.api_key_env = s.value("api_key_env", "");
        rc.batch_size = s.value("batch_size", size_t{64});
        rc.max_retries = s.value("max_retries", 3);
        out.sentence = std::make_shared<RemoteSentenceProvider>(rc);
      } else {
        throw ConfigError("unknown sentence embedding type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("embeddings config: ") + e.what());
  }
  out.description = json::object();
  if (out.word) out.description["word"] = out.word->id();
  if (out.sentence) out.description["sentence"] = out.sentence->id();
  return out;
}

}  // namespace usersim
