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

#ifndef USERSIM_GATEWAY_H_
#define USERSIM_GATEWAY_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "usersim/persona.h"

namespace usersim {

struct BackendConfig {
  std::string type = "replay";  // "replay" | "chat"
  std::string endpoint;         // base URL for "chat"
  std::string model;
  // Unset means the provider default is used (no temperature is sent).
  std::optional<double> temperature;
  int max_retries = 3;
  int max_in_flight = 4;
  std::filesystem::path cache_dir;  // empty disables caching
  std::string api_key_env;          // name of the credential variable
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{60};
  // Replay backend.
  std::filesystem::path replay_fixture;
  bool replay_strict = true;
  std::string replay_fallback;

  // Throws ConfigError on invalid values.
  void Validate() const;
  // Sampling parameters recorded in run metadata and in the cache key.
  nlohmann::json SamplingParams() const;
  nlohmann::json ToJson() const;  // no credentials
  static BackendConfig FromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);
};

struct ReplyMeta {
  std::string model;
  double latency_ms = 0.0;
  int retries = 0;
};

struct SimulatorReply {
  std::string case_id;
  std::string prompt_sha256;
  std::string raw_text;  // byte-exact, never trimmed
  ReplyMeta meta;
  bool cache_hit = false;
  bool failed = false;
  std::string error;

  // Persisted form. Latency is omitted so replies are reproducible.
  nlohmann::json ToJson() const;
};

// Text-in/text-out simulator contract.
//
// Complete() throws TransientError for retryable failures and AuthError for
// rejected credentials; any other exception fails the case without retry.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string Complete(const PromptCase& prompt) = 0;
  virtual std::string model() const = 0;
  // Called once before any case runs; throws AuthError / ConfigError.
  virtual void Preflight() {}
};

// Raised by the strict replay backend for prompts absent from its fixture.
class ReplayMissError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic offline backend keyed by sha256(prompt_text).
class ReplayBackend : public Backend {
 public:
  ReplayBackend(std::map<std::string, std::string> fixture, bool strict,
                std::string fallback = "", std::string model = "replay");

  // Reads JSON lines with "prompt_sha256" (or "prompt") and "response"
  // (or "raw_text"), so a run's replies file is itself a fixture.
  static std::map<std::string, std::string> LoadFixture(
      const std::filesystem::path& path);

  std::string Complete(const PromptCase& prompt) override;
  std::string model() const override { return model_; }
  size_t size() const { return fixture_.size(); }

 private:
  std::map<std::string, std::string> fixture_;
  bool strict_;
  std::string fallback_;
  std::string model_;
};

// Test double: answers through a function of the full prompt case.
class ScriptedBackend : public Backend {
 public:
  using Responder = std::function<std::string(const PromptCase&)>;
  explicit ScriptedBackend(Responder responder, std::string model = "scripted")
      : responder_(std::move(responder)), model_(std::move(model)) {}
  std::string Complete(const PromptCase& prompt) override { return responder_(prompt); }
  std::string model() const override { return model_; }

 private:
  Responder responder_;
  std::string model_;
};

// Chat-completion API over HTTP(S): POST {endpoint}/v1/chat/completions with
// {"model", "messages":[{"role":"user","content":prompt}], ["temperature"]},
// reading choices[0].message.content.
class ChatCompletionBackend : public Backend {
 public:
  explicit ChatCompletionBackend(BackendConfig config);
  ~ChatCompletionBackend() override;

  std::string Complete(const PromptCase& prompt) override;
  std::string model() const override { return config_.model; }
  void Preflight() override;

 private:
  BackendConfig config_;
  std::string api_key_;
};

std::unique_ptr<Backend> MakeBackend(const BackendConfig& config);

// Content-addressed response cache: <dir>/<key[0:2]>/<key>.txt. Writes go
// through a temporary file and rename, so readers never see partial files.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  static std::string Key(const std::string& model, const std::string& prompt_text,
                         const nlohmann::json& sampling_params);
  std::optional<std::string> Get(const std::string& key) const;
  void Put(const std::string& key, const std::string& text) const;

 private:
  std::filesystem::path PathOf(const std::string& key) const;
  std::filesystem::path dir_;
};

// Drives a backend with retries, caching and a bounded worker pool.
class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  Gateway(Backend& backend, BackendConfig config, Sleeper sleeper = nullptr);

  // One case. Exhausted retries or non-transient errors mark the reply as
  // failed; AuthError propagates.
  SimulatorReply Complete(const PromptCase& prompt);

  // All cases with at most max_in_flight concurrent requests. The result
  // order is the input order regardless of completion order.
  std::vector<SimulatorReply> CompleteAll(std::span<const PromptCase> prompts);

  const BackendConfig& config() const { return config_; }
  Backend& backend() { return backend_; }

 private:
  Backend& backend_;
  BackendConfig config_;
  Sleeper sleeper_;
  std::optional<ResponseCache> cache_;
  std::once_flag preflight_;
};

}  // namespace usersim

#endif  // USERSIM_GATEWAY_H_
