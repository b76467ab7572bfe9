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
#ifndef PABI_RNG_H_
#define PABI_RNG_H_

#include <cstdint>

namespace pabi {

// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t SplitMix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream key for (seed, index); used per chain and per purpose.
std::uint64_t DeriveStream(std::uint64_t seed, std::uint64_t index);

// Counter-based generator: the k-th draw of a stream is a pure function of
// (stream, k), so draws can be made in any order and from any thread. The
// sequence is that of SplitMix64 seeded with the stream key.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t stream) : stream_(stream) {}

  std::uint64_t Bits(std::uint64_t counter) const {
    return SplitMix64(stream_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double Uniform(std::uint64_t counter) const {
    return (static_cast<double>(Bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal number k of the stream, by Box-Muller on the uniform pair
  // (2 floor(k/2), 2 floor(k/2) + 1); even k take the cosine branch, odd k
  // the sine branch.
  double Normal(std::uint64_t k) const;

 private:
  std::uint64_t stream_;
};

}  // namespace pabi

#endif  // PABI_RNG_H_
