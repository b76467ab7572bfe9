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
#include "pabi/modulus.h"

#include <cmath>

#include "absl/strings/str_format.h"
#include "pabi/status.h"

namespace pabi {
namespace {

bool PositiveFinite(double x) { return std::isfinite(x) && x > 0.0; }

absl::StatusOr<QuadraticModulus> LipschitzModulus(const ConvexLipschitz& cls,
                                                  double eta) {
  if (!PositiveFinite(cls.lipschitz)) {
    return InvalidParameter("invalid_lipschitz",
                            "Lipschitz constant must be positive and finite");
  }
  // Keep the association 2 * (eta * L): the weakly smooth formula at p = 0,
  // M = 2L reduces to the very same floating point operations.
  const double offset = 2.0 * (eta * cls.lipschitz);
  return QuadraticModulus::Create(1.0, offset * offset);
}

absl::StatusOr<QuadraticModulus> WeaklySmoothModulus(
    const ConvexWeaklySmooth& cls, double eta) {
  const double p = cls.p;
  const double m = cls.hoelder_constant;
  if (!(p >= 0.0 && p <= 1.0)) {
    return InvalidParameter("invalid_p", "Hoelder exponent p must lie in [0, 1]");
  }
  if (!PositiveFinite(m)) {
    return InvalidParameter("invalid_m",
                            "Hoelder constant M must be positive and finite");
  }
  if (p == 1.0) {
    if (eta > 2.0 / m) {
      return PreconditionViolation(
          "stepsize_not_nonexpansive",
          absl::StrFormat("p = 1 requires eta <= 2/M = %.17g", 2.0 / m),
          2.0 / m);
    }
    return QuadraticModulus::Identity();
  }
  // 2 * eta^{1/(1-p)} * sqrt((1-p)/(1+p)) * (M/2)^{1/(1-p)}, with the two
  // powers merged so that tiny eta and large M cannot produce 0 * inf.
  const double ratio = (1.0 - p) / (1.0 + p);
  const double offset =
      2.0 * std::sqrt(ratio) * std::pow(eta * (m / 2.0), 1.0 / (1.0 - p));
  if (!std::isfinite(offset)) {
    return InvalidParameter("offset_overflow",
                            "modulus offset overflows double precision");
  }
  return QuadraticModulus::Create(1.0, offset * offset);
}

absl::StatusOr<QuadraticModulus> SmoothModulus(const SmoothConvex& cls,
                                               double eta) {
  if (!PositiveFinite(cls.beta)) {
    return InvalidParameter("invalid_beta", "beta must be positive and finite");
  }
  if (eta > 2.0 / cls.beta) {
    return PreconditionViolation(
        "stepsize_not_nonexpansive",
        absl::StrFormat("smooth convex case requires eta <= 2/beta = %.17g",
                        2.0 / cls.beta),
        2.0 / cls.beta);
  }
  return QuadraticModulus::Identity();
}

absl::StatusOr<QuadraticModulus> DissipativeModulus(
    const StronglyDissipative& cls, double eta) {
  if (!PositiveFinite(cls.lambda) || !PositiveFinite(cls.kappa) ||
      !PositiveFinite(cls.beta)) {
    return InvalidParameter("invalid_dissipative_parameters",
                            "lambda, kappa and beta must be positive");
  }
  const double c = 1.0 - 2.0 * eta * cls.kappa + eta * eta * cls.beta * cls.beta;
  if (!(c > 0.0)) {
    return InvalidParameter(
        "nonpositive_contraction",
        absl::StrFormat("1 - 2 eta kappa + eta^2 beta^2 = %.17g is not positive",
                        c));
  }
  return QuadraticModulus::Create(c, 2.0 * eta * cls.lambda);
}

}  // namespace

absl::StatusOr<QuadraticModulus> QuadraticModulus::Create(double c, double h) {
  if (!PositiveFinite(c)) {
    return InvalidParameter("invalid_c", "modulus factor c must be positive");
  }
  if (!(std::isfinite(h) && h >= 0.0)) {
    return InvalidParameter("invalid_h", "modulus offset h must be nonnegative");
  }
  return QuadraticModulus(c, h);
}

double QuadraticModulus::operator()(double delta) const {
  return std::sqrt(c_ * delta * delta + h_);
}

double QuadraticModulus::Derivative(double delta) const {
  const double value = (*this)(delta);
  if (value == 0.0) return std::sqrt(c_);
  return c_ * delta / value;
}

absl::StatusOr<double> EvaluateModulus(const QuadraticModulus& phi,
                                       double delta) {
  if (!(delta >= 0.0)) {
    return InvalidParameter("negative_distance",
                            "modulus argument must be a nonnegative distance");
  }
  return phi(delta);
}

absl::StatusOr<QuadraticModulus> ModulusFromClass(const FunctionClass& cls,
                                                  double eta) {
  if (!PositiveFinite(eta)) {
    return InvalidParameter("invalid_eta", "stepsize eta must be positive");
  }
  return std::visit(
      [eta](const auto& c) -> absl::StatusOr<QuadraticModulus> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ConvexLipschitz>) {
          return LipschitzModulus(c, eta);
        } else if constexpr (std::is_same_v<T, ConvexWeaklySmooth>) {
          return WeaklySmoothModulus(c, eta);
        } else if constexpr (std::is_same_v<T, SmoothConvex>) {
          return SmoothModulus(c, eta);
        } else {
          return DissipativeModulus(c, eta);
        }
      },
      cls);
}

}  // namespace pabi
