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
#ifndef PABI_POTENTIAL_H_
#define PABI_POTENTIAL_H_

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "absl/status/status.h"
#include "pabi/kernels.h"

namespace pabi {

// f = 0.
struct Flat {};

// f(x) = L |x|; subgradient L sign(x) in 1D and L x / |x| in 2D, zero at the
// origin.
struct AbsLipschitz {
  double lipschitz;
};

// f(x) = a / (1+p) sum_i |x_i|^{1+p} with a = M / (2^{1-p} d^{(1-p)/2}).
// The scale a makes the gradient (p, M)-Hoelder on R^d: the map
// s -> sign(s)|s|^p is p-Hoelder with constant 2^{1-p}, and summing d
// coordinates costs another d^{(1-p)/2}.
struct PowerWeaklySmooth {
  double p;
  double hoelder_constant;
};

// f(x) = beta |x|^2 / 2.
struct QuadraticSmooth {
  double beta;
};

// f(x) = kappa |x|^2 - A sum_i cos(x_i) with A = sqrt(lambda kappa) / 2.
// For d <= 2,
//   <grad f(x) - grad f(y), x - y> >= 2 kappa r^2 - 2 A sqrt(d) r
//                                  >= kappa r^2 - lambda,
// since kappa r^2 - 2 A sqrt(d) r + lambda has discriminant
// lambda kappa (d - 4) < 0. The gradient is (2 kappa + A)-Lipschitz, so beta
// must be at least that.
struct DissipativeQuadratic {
  double kappa;
  double beta;
  double lambda;
};

using Potential = std::variant<Flat, AbsLipschitz, PowerWeaklySmooth,
                               QuadraticSmooth, DissipativeQuadratic>;

std::string PotentialName(const Potential& potential);

// Parameter checks, including the dimension and beta requirements above.
absl::Status ValidatePotential(const Potential& potential, int dim);

// Writes a (sub)gradient of f at x into grad. Deterministic.
void Gradient(const Potential& potential, std::span<const double> x,
              std::span<double> grad);

// A kernel form of the 1D gradient, coef * g(x) with g in {0, sign, id},
// when one exists.
std::optional<kernels::StepParams> KernelGradient(const Potential& potential);

}  // namespace pabi

#endif  // PABI_POTENTIAL_H_
