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

#include "http_client.h"

#include "httplib.h"
#include "usersim/error.h"

namespace usersim::internal {

namespace {

// "http://host:port/prefix" -> ("http://host:port", "/prefix").
std::pair<std::string, std::string> SplitBase(const std::string& base_url) {
  const size_t scheme = base_url.find("://");
  const size_t slash = base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash == std::string::npos) return {base_url, ""};
  std::string prefix = base_url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {base_url.substr(0, slash), prefix};
}

httplib::Client MakeClient(const std::string& origin, std::chrono::seconds timeout) {
  httplib::Client client(origin);
  if (!client.is_valid()) throw std::runtime_error("invalid endpoint URL: " + origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  return client;
}

}  // namespace

HttpResponse PostJson(const std::string& base_url, const std::string& path,
                      const std::string& body,
                      const std::map<std::string, std::string>& headers,
                      std::chrono::seconds timeout) {
  const auto [origin, prefix] = SplitBase(base_url);
  httplib::Client client = MakeClient(origin, timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(prefix + path, h, body, "application/json");
  if (!res) {
    throw TransientError("request to " + base_url + path +
                         " failed: " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

HttpResponse Get(const std::string& base_url, const std::string& path,
                 std::chrono::seconds timeout) {
  const auto [origin, prefix] = SplitBase(base_url);
  httplib::Client client = MakeClient(origin, timeout);
  auto res = client.Get(prefix + path);
  if (!res) {
    throw TransientError("request to " + base_url + path +
                         " failed: " + httplib::to_string(res.error()));
  }
  return {res->status, res->body};
}

void ThrowForStatus(const HttpResponse& response, const std::string& what) {
  const int s = response.status;
  if (s >= 200 && s < 300) return;
  const std::string msg =
      what + ": HTTP " + std::to_string(s) + ": " + response.body.substr(0, 200);
  if (s == 401 || s == 403) throw AuthError(msg);
  if (s == 408 || s == 429 || s >= 500) throw TransientError(msg);
  throw std::runtime_error(msg);
}

}  // namespace usersim::internal
