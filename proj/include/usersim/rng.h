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

#ifndef USERSIM_RNG_H_
#define USERSIM_RNG_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "usersim/hash.h"

namespace usersim {

constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with platform-stable draws. The engine is std::mt19937_64
// (fully specified by the standard); range reduction is done here because the
// std distributions are implementation-defined and would break byte-identical
// reruns across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(SplitMix64(seed)) {}

  uint64_t seed() const { return seed_; }

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t Uniform(uint64_t n) {
    // Rejection sampling on the top of the range keeps draws unbiased.
    const uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform double in [0, 1).
  double UniformReal() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool Coin() { return (engine_() >> 63) != 0; }

  // Independent child stream keyed by a label, so per-item draws do not
  // depend on iteration order.
  Rng Derive(std::string_view label) const {
    return Rng(SplitMix64(seed_ ^ Fnv1a64(label)));
  }
  Rng Derive(uint64_t index) const {
    return Rng(SplitMix64(seed_ ^ SplitMix64(index + 0x5851f42d4c957f2dULL)));
  }

  // Partial Fisher-Yates: first k elements of a uniform permutation.
  template <typename T>
  std::vector<T> SampleWithoutReplacement(std::vector<T> pool, size_t k) {
    for (size_t i = 0; i < k && i < pool.size(); ++i) {
      const size_t j = i + Uniform(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(std::min(k, pool.size()));
    return pool;
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace usersim

#endif  // USERSIM_RNG_H_
