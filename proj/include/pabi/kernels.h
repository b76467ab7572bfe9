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
#ifndef PABI_KERNELS_H_
#define PABI_KERNELS_H_

#include <cstddef>
#include <cstdint>

// Inner loops of the Monte-Carlo simulator, written once as a scalar
// reference and again with AVX2 intrinsics. The variant is picked at run time
// from the CPU; PABI_SIMD=scalar in the environment forces the reference.
//
// ProjectedStep and BinIndices are bit-identical across variants (no FMA,
// same operation order). L1Distance is a reduction and differs only by
// summation order.
namespace pabi::kernels {

enum class GradientKind { kZero, kSign, kLinear };

// x <- clamp((x - eta * (coef * g(x))) + sigma * z, lo, hi) where g is 0,
// sign(x) (sign(0) = 0) or x.
struct StepParams {
  GradientKind kind = GradientKind::kZero;
  double coef = 0.0;
  double eta = 0.0;
  double sigma = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct KernelTable {
  const char* name;
  void (*projected_step)(const StepParams& params, double* x, const double* z,
                         std::size_t n);
  // out[i] = clamp(floor((x[i] - lo) * inv_width), 0, bins - 1).
  void (*bin_indices)(const double* x, std::size_t n, double lo,
                      double inv_width, std::int32_t bins, std::int32_t* out);
  // sum_i |a[i] - b[i]|.
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
};

const KernelTable& ScalarKernels();

// Null when the AVX2 variant was not built or the CPU lacks AVX2.
const KernelTable* Avx2Kernels();

// The table used by the library.
const KernelTable& ActiveKernels();

}  // namespace pabi::kernels

#endif  // PABI_KERNELS_H_
