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

#ifndef PABI_MODULUS_H_
#define PABI_MODULUS_H_

#include <variant>

#include "absl/status/statusor.h"

namespace pabi {

// A modulus of continuity of the form phi(delta) = sqrt(c * delta^2 + h).
//
// c > 0 is the squared contraction (c < 1) or expansion (c > 1) factor of the
// gradient map and h >= 0 a squared-distance offset. When h > 0 the map the
// modulus describes may be discontinuous; phi(0) is still reported as sqrt(h)
// because the shift recursion only ever uses the formula value.
class QuadraticModulus {
 public:
  static absl::StatusOr<QuadraticModulus> Create(double c, double h);

  // The nonexpansive identity modulus (c = 1, h = 0).
  static QuadraticModulus Identity() { return QuadraticModulus(1.0, 0.0); }

  double c() const { return c_; }
  double h() const { return h_; }

  // sqrt(c * delta^2 + h). The argument is not range-checked; use
  // EvaluateModulus() for checked evaluation of user input.
  double operator()(double delta) const;

  // d/d delta of sqrt(c delta^2 + h). Zero at the origin when h > 0; at
  // h == 0 the one-sided derivative sqrt(c) is returned.
  double Derivative(double delta) const;

  friend bool operator==(const QuadraticModulus&,
                         const QuadraticModulus&) = default;

 private:
  QuadraticModulus(double c, double h) : c_(c), h_(h) {}

  double c_;
  double h_;
};

absl::StatusOr<double> EvaluateModulus(const QuadraticModulus& phi,
                                       double delta);

struct ConvexLipschitz {
  double lipschitz;
};

// Gradient is p-Hoelder with constant M, 0 <= p <= 1.
struct ConvexWeaklySmooth {
  double p;
  double hoelder_constant;
};

struct SmoothConvex {
  double beta;
};

// <grad f(x) - grad f(y), x - y> >= -lambda + kappa |x - y|^2, plus
// beta-smoothness.
struct StronglyDissipative {
  double lambda;
  double kappa;
  double beta;
};

using FunctionClass = std::variant<ConvexLipschitz, ConvexWeaklySmooth,
                                   SmoothConvex, StronglyDissipative>;

// Modulus of the gradient map x -> x - eta * grad f(x) for the given class.
//
// Weakly smooth classes with p == 1 are treated as smooth: the offset
// vanishes and eta <= 2 / M is required so the map is nonexpansive.
absl::StatusOr<QuadraticModulus> ModulusFromClass(const FunctionClass& cls,
                                                  double eta);

}  // namespace pabi

#endif  // PABI_MODULUS_H_
