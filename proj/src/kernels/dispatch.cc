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
#include <cstdlib>
#include <string_view>

#include "pabi/kernels.h"

namespace pabi::kernels {

#if defined(PABI_HAVE_AVX2)
const KernelTable& Avx2KernelTable();
#endif

const KernelTable* Avx2Kernels() {
#if defined(PABI_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return &Avx2KernelTable();
#endif
  return nullptr;
}

const KernelTable& ActiveKernels() {
  static const KernelTable* active = [] {
    const char* forced = std::getenv("PABI_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return &ScalarKernels();
    }
    const KernelTable* avx2 = Avx2Kernels();
    return avx2 != nullptr ? avx2 : &ScalarKernels();
  }();
  return *active;
}

}  // namespace pabi::kernels
