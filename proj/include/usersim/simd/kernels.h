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

#ifndef USERSIM_SIMD_KERNELS_H_
#define USERSIM_SIMD_KERNELS_H_

#include <cstddef>
#include <string_view>

namespace usersim::simd {

enum class KernelPath { kScalar, kAvx2, kNeon };

std::string_view KernelPathName(KernelPath p);

// Path used by the dispatching entry points. Chosen on first use from the
// CPU features, unless USERSIM_SIMD=scalar is set in the environment.
KernelPath ActivePath();

// Forces a path; returns false (and changes nothing) if the CPU lacks it.
bool SetKernelPath(KernelPath p);

bool PathSupported(KernelPath p);

double Dot(const double* a, const double* b, size_t n);
double SquaredNorm(const double* a, size_t n);
// acc[i] += x[i]
void Accumulate(double* acc, const double* x, size_t n);

// Per-path implementations, exposed for equivalence tests. Calling a path
// the CPU does not support is undefined.
namespace scalar {
double Dot(const double* a, const double* b, size_t n);
double SquaredNorm(const double* a, size_t n);
void Accumulate(double* acc, const double* x, size_t n);
}  // namespace scalar

namespace avx2 {
double Dot(const double* a, const double* b, size_t n);
double SquaredNorm(const double* a, size_t n);
void Accumulate(double* acc, const double* x, size_t n);
}  // namespace avx2

namespace neon {
double Dot(const double* a, const double* b, size_t n);
double SquaredNorm(const double* a, size_t n);
void Accumulate(double* acc, const double* x, size_t n);
}  // namespace neon

}  // namespace usersim::simd

#endif  // USERSIM_SIMD_KERNELS_H_
