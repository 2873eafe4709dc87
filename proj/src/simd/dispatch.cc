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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "usersim/simd/kernels.h"

namespace usersim::simd {

namespace {

KernelPath Detect() {
  const char* env = std::getenv("USERSIM_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return KernelPath::kScalar;
  if (PathSupported(KernelPath::kAvx2)) return KernelPath::kAvx2;
  if (PathSupported(KernelPath::kNeon)) return KernelPath::kNeon;
  return KernelPath::kScalar;
}

std::atomic<KernelPath>& Active() {
  static std::atomic<KernelPath> path{Detect()};
  return path;
}

}  // namespace

std::string_view KernelPathName(KernelPath p) {
  switch (p) {
    case KernelPath::kScalar: return "scalar";
    case KernelPath::kAvx2: return "avx2";
    case KernelPath::kNeon: return "neon";
  }
  return "scalar";
}

bool PathSupported(KernelPath p) {
  switch (p) {
    case KernelPath::kScalar:
      return true;
    case KernelPath::kAvx2:
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case KernelPath::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

KernelPath ActivePath() { return Active().load(std::memory_order_relaxed); }

bool SetKernelPath(KernelPath p) {
  if (!PathSupported(p)) return false;
  Active().store(p, std::memory_order_relaxed);
  return true;
}

double Dot(const double* a, const double* b, size_t n) {
  switch (ActivePath()) {
    case KernelPath::kAvx2: return avx2::Dot(a, b, n);
    case KernelPath::kNeon: return neon::Dot(a, b, n);
    default: return scalar::Dot(a, b, n);
  }
}

double SquaredNorm(const double* a, size_t n) {
  switch (ActivePath()) {
    case KernelPath::kAvx2: return avx2::SquaredNorm(a, n);
    case KernelPath::kNeon: return neon::SquaredNorm(a, n);
    default: return scalar::SquaredNorm(a, n);
  }
}

void Accumulate(double* acc, const double* x, size_t n) {
  switch (ActivePath()) {
    case KernelPath::kAvx2: return avx2::Accumulate(acc, x, n);
    case KernelPath::kNeon: return neon::Accumulate(acc, x, n);
    default: return scalar::Accumulate(acc, x, n);
  }
}

}  // namespace usersim::simd
