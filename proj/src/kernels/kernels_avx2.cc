// Copyright 2026 The PABI Authors
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
#include <immintrin.h>

#include <cmath>

#include "pabi/kernels.h"

namespace pabi::kernels {

// Defined in this file only; compiled with -mavx2 and reached through
// Avx2KernelTable() after a CPU check.
const KernelTable& Avx2KernelTable();

namespace {

void ProjectedStepAvx2(const StepParams& p, double* x, const double* z,
                       std::size_t n) {
  const __m256d eta = _mm256_set1_pd(p.eta);
  const __m256d coef = _mm256_set1_pd(p.coef);
  const __m256d sigma = _mm256_set1_pd(p.sigma);
  const __m256d lo = _mm256_set1_pd(p.lo);
  const __m256d hi = _mm256_set1_pd(p.hi);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    __m256d g;
    switch (p.kind) {
      case GradientKind::kZero:
        g = zero;
        break;
      case GradientKind::kSign:
        g = _mm256_sub_pd(
            _mm256_and_pd(_mm256_cmp_pd(xv, zero, _CMP_GT_OQ), one),
            _mm256_and_pd(_mm256_cmp_pd(xv, zero, _CMP_LT_OQ), one));
        break;
      default:
        g = xv;
        break;
    }
    const __m256d drift = _mm256_mul_pd(eta, _mm256_mul_pd(coef, g));
    const __m256d moved = _mm256_add_pd(
        _mm256_sub_pd(xv, drift), _mm256_mul_pd(sigma, _mm256_loadu_pd(z + i)));
    // max(a, b) returns a when a > b, min(a, b) returns a when a < b.
    _mm256_storeu_pd(x + i, _mm256_min_pd(_mm256_max_pd(moved, lo), hi));
  }
  if (i < n) {
    ScalarKernels().projected_step(p, x + i, z + i, n - i);
  }
}

void BinIndicesAvx2(const double* x, std::size_t n, double lo,
                    double inv_width, std::int32_t bins, std::int32_t* out) {
  const __m256d lov = _mm256_set1_pd(lo);
  const __m256d inv = _mm256_set1_pd(inv_width);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d top = _mm256_set1_pd(static_cast<double>(bins - 1));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d cell = _mm256_floor_pd(
        _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), lov), inv));
    const __m256d clamped = _mm256_min_pd(_mm256_max_pd(cell, zero), top);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + i),
                     _mm256_cvttpd_epi32(clamped));
  }
  if (i < n) {
    ScalarKernels().bin_indices(x + i, n - i, lo, inv_width, bins, out + i);
  }
}

double L1DistanceAvx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign_mask, diff));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

}  // namespace

const KernelTable& Avx2KernelTable() {
  static const KernelTable table{"avx2", ProjectedStepAvx2, BinIndicesAvx2,
                                 L1DistanceAvx2};
  return table;
}

}  // namespace pabi::kernels
