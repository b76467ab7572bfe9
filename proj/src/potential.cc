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
#include "pabi/potential.h"

#include <cmath>

#include "absl/strings/str_format.h"
#include "pabi/status.h"

namespace pabi {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool Positive(double x) { return std::isfinite(x) && x > 0.0; }

double Sign(double x) {
  return static_cast<double>(x > 0.0) - static_cast<double>(x < 0.0);
}

double PowerScale(const PowerWeaklySmooth& f, int dim) {
  return f.hoelder_constant /
         (std::pow(2.0, 1.0 - f.p) *
          std::pow(static_cast<double>(dim), (1.0 - f.p) / 2.0));
}

double DissipativeAmplitude(const DissipativeQuadratic& f) {
  return std::sqrt(f.lambda * f.kappa) / 2.0;
}

}  // namespace

std::string PotentialName(const Potential& potential) {
  return std::visit(
      Overloaded{
          [](const Flat&) -> std::string { return "flat"; },
          [](const AbsLipschitz&) -> std::string { return "abs"; },
          [](const PowerWeaklySmooth&) -> std::string { return "power"; },
          [](const QuadraticSmooth&) -> std::string { return "quadratic"; },
          [](const DissipativeQuadratic&) -> std::string {
            return "dissipative";
          }},
      potential);
}

absl::Status ValidatePotential(const Potential& potential, int dim) {
  if (dim != 1 && dim != 2) {
    return InvalidParameter("invalid_dimension", "dim must be 1 or 2");
  }
  return std::visit(
      Overloaded{
          [](const Flat&) { return absl::OkStatus(); },
          [](const AbsLipschitz& f) {
            return Positive(f.lipschitz)
                       ? absl::OkStatus()
                       : InvalidParameter("invalid_parameter",
                                          "L must be positive");
          },
          [](const PowerWeaklySmooth& f) {
            if (!(f.p >= 0.0 && f.p <= 1.0) || !Positive(f.hoelder_constant)) {
              return InvalidParameter("invalid_parameter",
                                      "need p in [0, 1] and M > 0");
            }
            return absl::OkStatus();
          },
          [](const QuadraticSmooth& f) {
            return Positive(f.beta)
                       ? absl::OkStatus()
                       : InvalidParameter("invalid_parameter",
                                          "beta must be positive");
          },
          [](const DissipativeQuadratic& f) {
            if (!Positive(f.kappa) || !Positive(f.beta) ||
                !Positive(f.lambda)) {
              return InvalidParameter("invalid_parameter",
                                      "kappa, beta, lambda must be positive");
            }
            const double needed = 2.0 * f.kappa + DissipativeAmplitude(f);
            if (f.beta < needed) {
              return InvalidParameter(
                  "invalid_parameter",
                  absl::StrFormat("beta = %g is below the gradient Lipschitz "
                                  "constant 2 kappa + sqrt(lambda kappa)/2 = %g",
                                  f.beta, needed));
            }
            return absl::OkStatus();
          }},
      potential);
}

void Gradient(const Potential& potential, std::span<const double> x,
              std::span<double> grad) {
  std::visit(
      Overloaded{
          [&](const Flat&) {
            for (double& g : grad) g = 0.0;
          },
          [&](const AbsLipschitz& f) {
            if (x.size() == 1) {
              grad[0] = f.lipschitz * Sign(x[0]);
              return;
            }
            double norm_sq = 0.0;
            for (double v : x) norm_sq += v * v;
            const double norm = std::sqrt(norm_sq);
            for (std::size_t i = 0; i < x.size(); ++i) {
              grad[i] = norm > 0.0 ? f.lipschitz * (x[i] / norm) : 0.0;
            }
          },
          [&](const PowerWeaklySmooth& f) {
            const double a = PowerScale(f, static_cast<int>(x.size()));
            for (std::size_t i = 0; i < x.size(); ++i) {
              grad[i] = a * Sign(x[i]) * std::pow(std::abs(x[i]), f.p);
            }
          },
          [&](const QuadraticSmooth& f) {
            for (std::size_t i = 0; i < x.size(); ++i) grad[i] = f.beta * x[i];
          },
          [&](const DissipativeQuadratic& f) {
            const double a = DissipativeAmplitude(f);
            for (std::size_t i = 0; i < x.size(); ++i) {
              grad[i] = 2.0 * f.kappa * x[i] + a * std::sin(x[i]);
            }
          }},
      potential);
}

std::optional<kernels::StepParams> KernelGradient(const Potential& potential) {
  using kernels::GradientKind;
  kernels::StepParams params;
  if (std::holds_alternative<Flat>(potential)) {
    params.kind = GradientKind::kZero;
  } else if (const auto* f = std::get_if<AbsLipschitz>(&potential)) {
    params.kind = GradientKind::kSign;
    params.coef = f->lipschitz;
  } else if (const auto* f = std::get_if<QuadraticSmooth>(&potential)) {
    params.kind = GradientKind::kLinear;
    params.coef = f->beta;
  } else {
    return std::nullopt;
  }
  return params;
}

}  // namespace pabi
