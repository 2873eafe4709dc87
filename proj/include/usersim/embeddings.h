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

#ifndef USERSIM_EMBEDDINGS_H_
#define USERSIM_EMBEDDINGS_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace usersim {

using Vector = std::vector<double>;

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws EmbeddingError for a wrong dimension or a non-finite component.
void CheckVector(const Vector& v, size_t dim, std::string_view what);

class WordEmbeddingProvider {
 public:
  virtual ~WordEmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual size_t dim() const = 0;
  // nullopt for out-of-vocabulary tokens.
  virtual std::optional<Vector> Lookup(const std::string& token) const = 0;
};

class SentenceEmbeddingProvider {
 public:
  virtual ~SentenceEmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual size_t dim() const = 0;
  // One vector per text, in order. Throws EmbeddingError on failure.
  virtual std::vector<Vector> EmbedBatch(const std::vector<std::string>& texts) = 0;
  // Called before a run; throws when the provider cannot be used.
  virtual void Preflight() {}
};

// In-memory word vectors, from a text file of "token v1 v2 ... vD" lines
// (an optional leading "count dim" header line is skipped) or from a map.
class WordVectorTable : public WordEmbeddingProvider {
 public:
  static WordVectorTable Load(const std::filesystem::path& path);
  static WordVectorTable FromMap(std::string id, std::map<std::string, Vector> vectors);

  std::string id() const override { return id_; }
  size_t dim() const override { return dim_; }
  std::optional<Vector> Lookup(const std::string& token) const override;
  size_t size() const { return vectors_.size(); }

 private:
  std::string id_;
  size_t dim_ = 0;
  std::unordered_map<std::string, Vector> vectors_;
};

// Exact text -> vector map; unknown texts are an error.
class FixtureSentenceProvider : public SentenceEmbeddingProvider {
 public:
  FixtureSentenceProvider(std::string id, std::map<std::string, Vector> vectors);
  // JSON lines of {"text": ..., "vector": [...]}.
  static FixtureSentenceProvider Load(const std::filesystem::path& path);

  std::string id() const override { return id_; }
  size_t dim() const override { return dim_; }
  std::vector<Vector> EmbedBatch(const std::vector<std::string>& texts) override;

 private:
  std::string id_;
  size_t dim_ = 0;
  std::map<std::string, Vector> vectors_;
};

// Mean of the word vectors of a text's tokens. A text without any
// in-vocabulary token is an error.
class MeanWordSentenceProvider : public SentenceEmbeddingProvider {
 public:
  explicit MeanWordSentenceProvider(std::shared_ptr<const WordEmbeddingProvider> words);

  std::string id() const override;
  size_t dim() const override { return words_->dim(); }
  std::vector<Vector> EmbedBatch(const std::vector<std::string>& texts) override;

 private:
  std::shared_ptr<const WordEmbeddingProvider> words_;
};

struct RemoteEmbeddingConfig {
  std::string endpoint;  // base URL
  std::string model;
  std::string api_key_env;
  size_t batch_size = 64;
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
};

// POST {endpoint}/v1/embeddings with {"model", "input": [texts]}; reads
// data[i].embedding, ordered by data[i].index.
class RemoteSentenceProvider : public SentenceEmbeddingProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;
  explicit RemoteSentenceProvider(RemoteEmbeddingConfig config, Sleeper sleeper = nullptr);

  std::string id() const override { return "remote:" + config_.model; }
  size_t dim() const override { return dim_; }
  std::vector<Vector> EmbedBatch(const std::vector<std::string>& texts) override;
  void Preflight() override;

 private:
  std::vector<Vector> Post(const std::vector<std::string>& batch);

  RemoteEmbeddingConfig config_;
  Sleeper sleeper_;
  std::string api_key_;
  size_t dim_ = 0;
};

// Thread-safe memo keyed by (provider id, token or text hash).
class EmbeddingCache {
 public:
  std::optional<Vector> Get(const std::string& key) const;
  void Put(const std::string& key, Vector v);
  size_t hits() const { return hits_.load(); }
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<std::string, Vector> entries_;
  mutable std::atomic<size_t> hits_{0};
};

struct WordEmbeddings {
  std::map<std::string, Vector> vectors;
  size_t out_of_vocabulary = 0;
};

// Tokens are expected lowercased and deduplicated.
WordEmbeddings EmbedWords(const std::vector<std::string>& tokens,
                          const WordEmbeddingProvider& provider, EmbeddingCache& cache);

// Throws std::invalid_argument for an empty input or an empty text.
std::vector<Vector> EmbedSentences(const std::vector<std::string>& texts,
                                   SentenceEmbeddingProvider& provider,
                                   EmbeddingCache& cache);

// Word and sentence providers described by a JSON object:
//   {"word": {"type": "static", "path": ...},
//    "sentence": {"type": "mean_word" | "fixture" | "remote", ...}}
struct EmbeddingProviders {
  std::shared_ptr<const WordEmbeddingProvider> word;
  std::shared_ptr<SentenceEmbeddingProvider> sentence;
  nlohmann::json description;
};

EmbeddingProviders MakeEmbeddingProviders(const nlohmann::json& j,
                                          const std::filesystem::path& base_dir);

}  // namespace usersim

#endif  // USERSIM_EMBEDDINGS_H_
