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
#include "pabi/rng.h"

#include <cmath>
#include <numbers>

namespace pabi {

std::uint64_t DeriveStream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(index + 0x632be59bd9b4e019ULL));
}

double CounterRng::Normal(std::uint64_t k) const {
  const std::uint64_t pair = k >> 1;
  const double u1 = Uniform(2 * pair);
  const double u2 = Uniform(2 * pair + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (k & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
}

}  // namespace pabi
