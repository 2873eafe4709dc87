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

#ifndef USERSIM_SRC_HTTP_CLIENT_H_
#define USERSIM_SRC_HTTP_CLIENT_H_

#include <chrono>
#include <map>
#include <string>

namespace usersim::internal {

struct HttpResponse {
  int status = 0;
  std::string body;
};

// POSTs a JSON body to base_url + path. Connection-level failures throw
// TransientError; HTTP status codes are returned to the caller.
HttpResponse PostJson(const std::string& base_url, const std::string& path,
                      const std::string& body,
                      const std::map<std::string, std::string>& headers,
                      std::chrono::seconds timeout);

HttpResponse Get(const std::string& base_url, const std::string& path,
                 std::chrono::seconds timeout);

// Maps an HTTP status to the error taxonomy: 401/403 -> AuthError,
// 408/429/5xx -> TransientError, other non-2xx -> std::runtime_error.
void ThrowForStatus(const HttpResponse& response, const std::string& what);

}  // namespace usersim::internal

#endif  // USERSIM_SRC_HTTP_CLIENT_H_
