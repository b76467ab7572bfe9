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
#include <cmath>

#include "pabi/kernels.h"

namespace pabi::kernels {
namespace {

// Same selection rules as the vector min/max instructions.
inline double ClampLike(double y, double lo, double hi) {
  const double above = y > lo ? y : lo;
  return above < hi ? above : hi;
}

inline double Gradient(GradientKind kind, double x) {
  switch (kind) {
    case GradientKind::kZero:
      return 0.0;
    case GradientKind::kSign:
      return static_cast<double>(x > 0.0) - static_cast<double>(x < 0.0);
    case GradientKind::kLinear:
      return x;
  }
  return 0.0;
}

void ProjectedStepScalar(const StepParams& p, double* x, const double* z,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double drift = p.eta * (p.coef * Gradient(p.kind, x[i]));
    const double moved = (x[i] - drift) + p.sigma * z[i];
    x[i] = ClampLike(moved, p.lo, p.hi);
  }
}

void BinIndicesScalar(const double* x, std::size_t n, double lo,
                      double inv_width, std::int32_t bins, std::int32_t* out) {
  const double top = static_cast<double>(bins - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double cell = std::floor((x[i] - lo) * inv_width);
    out[i] = static_cast<std::int32_t>(ClampLike(cell, 0.0, top));
  }
}

double L1DistanceScalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{"scalar", ProjectedStepScalar,
                                 BinIndicesScalar, L1DistanceScalar};
  return table;
}

}  // namespace pabi::kernels
