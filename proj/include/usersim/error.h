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

#ifndef USERSIM_ERROR_H_
#define USERSIM_ERROR_H_

#include <stdexcept>
#include <string>

namespace usersim {

// Input data that cannot be turned into a usable case set.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or incomplete configuration. Raised before any case runs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Credentials rejected by a remote service. Never retried.
class AuthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A failure that may succeed on retry (timeouts, 429, 5xx).
class TransientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A template needs a field the source case does not carry.
class MissingFieldError : public std::invalid_argument {
 public:
  explicit MissingFieldError(const std::string& field)
      : std::invalid_argument("missing required field: " + field),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace usersim

#endif  // USERSIM_ERROR_H_
