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

#include "usersim/simd/kernels.h"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace usersim::simd::neon {

double Dot(const double* a, const double* b, size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double SquaredNorm(const double* a, size_t n) { return Dot(a, a, n); }

void Accumulate(double* acc, const double* x, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(x + i)));
  for (; i < n; ++i) acc[i] += x[i];
}

}  // namespace usersim::simd::neon

#else

namespace usersim::simd::neon {
double Dot(const double* a, const double* b, size_t n) { return scalar::Dot(a, b, n); }
double SquaredNorm(const double* a, size_t n) { return scalar::SquaredNorm(a, n); }
void Accumulate(double* acc, const double* x, size_t n) { scalar::Accumulate(acc, x, n); }
}  // namespace usersim::simd::neon

#endif
