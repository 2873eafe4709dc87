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

#include "usersim/gateway.h"

#include <spdlog/spdlog.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "http_client.h"
#include "usersim/error.h"
#include "usersim/hash.h"

namespace usersim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// BackendConfig

void BackendConfig::Validate() const {
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (temperature && *temperature < 0) throw ConfigError("temperature must be >= 0");
  if (type == "replay") {
    if (replay_fixture.empty() && replay_strict) {
      throw ConfigError("strict replay backend needs a fixture file");
    }
    if (!replay_fixture.empty() && !std::filesystem::exists(replay_fixture)) {
      throw ConfigError("replay fixture not found: " + replay_fixture.string());
    }
  } else if (type == "chat") {
    if (endpoint.empty()) throw ConfigError("chat backend needs an endpoint");
    if (model.empty()) throw ConfigError("chat backend needs a model");
    if (!api_key_env.empty() && std::getenv(api_key_env.c_str()) == nullptr) {
      throw ConfigError("credential variable " + api_key_env + " is not set");
    }
  } else {
    throw ConfigError("unknown backend type '" + type + "'");
  }
}

json BackendConfig::SamplingParams() const {
  json p = json::object();
  p["temperature"] = temperature ? json(*temperature) : json("provider-default");
  return p;
}

json BackendConfig::ToJson() const {
  json j = {{"type", type},
            {"model", model},
            {"endpoint", endpoint},
            {"sampling", SamplingParams()},
            {"max_retries", max_retries},
            {"max_in_flight", max_in_flight}};
  if (type == "replay") {
    j["replay"] = {{"strict", replay_strict},
                   {"fixture", replay_fixture.filename().string()}};
  }
  return j;
}

BackendConfig BackendConfig::FromJson(const json& j,
                                      const std::filesystem::path& base_dir) {
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  BackendConfig c;
  try {
    c.type = j.value("type", "replay");
    c.endpoint = j.value("endpoint", "");
    c.model = j.value("model", c.type == "replay" ? "replay" : "");
    if (j.contains("temperature") && !j["temperature"].is_null()) {
      c.temperature = j["temperature"].get<double>();
    }
    c.max_retries = j.value("max_retries", 3);
    c.max_in_flight = j.value("max_in_flight", 4);
    c.cache_dir = resolve(j.value("cache_dir", ""));
    c.api_key_env = j.value("api_key_env", "");
    c.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", 500));
    c.timeout = std::chrono::seconds(j.value("timeout_s", 60));
    if (j.contains("replay")) {
      const json& r = j["replay"];
      c.replay_fixture = resolve(r.value("fixture", ""));
      c.replay_strict = r.value("strict", true);
      c.replay_fallback = r.value("fallback", "");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("backend config: ") + e.what());
  }
  return c;
}

json SimulatorReply::ToJson() const {
  json j = {{"case_id", case_id},
            {"prompt_sha256", prompt_sha256},
            {"raw_text", raw_text},
            {"model", meta.model},
            {"retries", meta.retries},
            {"cache_hit", cache_hit},
            {"failed", failed}};
  if (failed) j["error"] = error;
  return j;
}

// ---------------------------------------------------------------------------
// Replay

ReplayBackend::ReplayBackend(std::map<std::string, std::string> fixture, bool strict,
                             std::string fallback, std::string model)
    : fixture_(std::move(fixture)),
      strict_(strict),
      fallback_(std::move(fallback)),
      model_(std::move(model)) {}

std::map<std::string, std::string> ReplayBackend::LoadFixture(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read replay fixture " + path.string());
  std::map<std::string, std::string> fixture;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("replay fixture line " + std::to_string(line_no) + ": " + e.what());
    }
    if (j.value("failed", false)) continue;
    std::string hash;
    if (j.contains("prompt_sha256")) {
      hash = j["prompt_sha256"].get<std::string>();
    } else if (j.contains("prompt")) {
      hash = Sha256Hex(j["prompt"].get<std::string>());
    } else {
      throw ConfigError("replay fixture line " + std::to_string(line_no) +
                        " has no prompt_sha256/prompt");
    }
    const json& text = j.contains("response") ? j["response"] : j.at("raw_text");
    fixture[hash] = text.get<std::string>();
  }
  return fixture;
}

std::string ReplayBackend::Complete(const PromptCase& prompt) {
  auto it = fixture_.find(Sha256Hex(prompt.prompt_text));
  if (it != fixture_.end()) return it->second;
  if (strict_) throw ReplayMissError("replay fixture has no entry for case " + prompt.id);
  return fallback_;
}

// ---------------------------------------------------------------------------
// Chat completions over HTTP

ChatCompletionBackend::ChatCompletionBackend(BackendConfig config)
    : config_(std::move(config)) {}

ChatCompletionBackend::~ChatCompletionBackend() = default;

void ChatCompletionBackend::Preflight() {
  if (config_.api_key_env.empty()) return;
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw AuthError("credential variable " + config_.api_key_env + " is not set");
  }
  api_key_ = key;
}

std::string ChatCompletionBackend::Complete(const PromptCase& prompt) {
  json body = {{"model", config_.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt.prompt_text}}})}};
  if (config_.temperature) body["temperature"] = *config_.temperature;
  std::map<std::string, std::string> headers;
  if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;
  const auto res = internal::PostJson(config_.endpoint, "/v1/chat/completions",
                                      body.dump(), headers, config_.timeout);
  internal::ThrowForStatus(res, "chat completion for " + prompt.id);
  try {
    const json j = json::parse(res.body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    // Garbled bodies are usually proxies failing mid-flight.
    throw TransientError("unparseable chat completion body: " + std::string(e.what()));
  }
}

std::unique_ptr<Backend> MakeBackend(const BackendConfig& config) {
  config.Validate();
  if (config.type == "replay") {
    auto fixture = config.replay_fixture.empty()
                       ? std::map<std::string, std::string>{}
                       : ReplayBackend::LoadFixture(config.replay_fixture);
    return std::make_unique<ReplayBackend>(std::move(fixture), config.replay_strict,
                                           config.replay_fallback, config.model);
  }
  return std::make_unique<ChatCompletionBackend>(config);
}

// ---------------------------------------------------------------------------
// Cache

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ResponseCache::Key(const std::string& model, const std::string& prompt_text,
                               const json& sampling_params) {
  std::string material = model;
  material.push_back('\0');
  material += prompt_text;
  material.push_back('\0');
  material += sampling_params.dump();
  return Sha256Hex(material);
}

std::filesystem::path ResponseCache::PathOf(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".txt");
}

std::optional<std::string> ResponseCache::Get(const std::string& key) const {
  std::ifstream in(PathOf(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ResponseCache::Put(const std::string& key, const std::string& text) const {
  const auto path = PathOf(key);
  std::filesystem::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << key << ".tmp." << std::this_thread::get_id();
  const auto tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("cache write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Gateway

Gateway::Gateway(Backend& backend, BackendConfig config, Sleeper sleeper)
    : backend_(backend), config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (config_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
}

SimulatorReply Gateway::Complete(const PromptCase& prompt) {
  std::call_once(preflight_, [this] { backend_.Preflight(); });
  if (prompt.prompt_text.empty()) {
    throw std::invalid_argument("empty prompt text for case " + prompt.id);
  }
  SimulatorReply reply;
  reply.case_id = prompt.id;
  reply.prompt_sha256 = Sha256Hex(prompt.prompt_text);
  reply.meta.model = backend_.model();

  std::string cache_key;
  if (cache_) {
    cache_key = ResponseCache::Key(backend_.model(), prompt.prompt_text,
                                   config_.SamplingParams());
    if (auto hit = cache_->Get(cache_key)) {
      reply.raw_text = std::move(*hit);
      reply.cache_hit = true;
      return reply;
    }
  }

  auto backoff = config_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      reply.raw_text = backend_.Complete(prompt);
      reply.meta.latency_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
      reply.meta.retries = attempt;
      if (cache_) cache_->Put(cache_key, reply.raw_text);
      return reply;
    } catch (const AuthError&) {
      throw;
    } catch (const TransientError& e) {
      if (attempt >= config_.max_retries) {
        reply.failed = true;
        reply.meta.retries = attempt;
        reply.error = e.what();
        spdlog::warn("case {} failed after {} retries: {}", prompt.id, attempt, e.what());
        return reply;
      }
      sleeper_(backoff);
      backoff *= 2;
    } catch (const std::exception& e) {
      reply.failed = true;
      reply.meta.retries = attempt;
      reply.error = e.what();
      return reply;
    }
  }
}

std::vector<SimulatorReply> Gateway::CompleteAll(std::span<const PromptCase> prompts) {
  std::vector<SimulatorReply> replies(prompts.size());
  if (prompts.empty()) return replies;
  std::call_once(preflight_, [this] { backend_.Preflight(); });

  const size_t workers =
      std::min(prompts.size(), static_cast<size_t>(config_.max_in_flight));
  std::atomic<size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto work = [&] {
    while (!stop.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= prompts.size()) return;
      try {
        replies[i] = Complete(prompts[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        stop.store(true);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  return replies;
}

}  // namespace usersim
