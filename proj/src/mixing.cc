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
#include "pabi/mixing.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/strings/str_format.h"
#include "pabi/bounds.h"
#include "pabi/status.h"

namespace pabi {
namespace {

bool Positive(double x) { return std::isfinite(x) && x > 0.0; }

absl::Status CheckEps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    return InvalidParameter(
        "invalid_eps", absl::StrFormat("eps = %g must lie in (0, 1)", eps));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::int64_t> CeilToCount(double x, const char* what) {
  const double r = std::ceil(x);
  if (!(r >= 0.0 && r < 9.0e18)) {
    return absl::OutOfRangeError(
        absl::StrFormat("%s = %g does not fit an iteration count", what, x));
  }
  return static_cast<std::int64_t>(r);
}

struct DissipativeSetup {
  double c;
  std::int64_t t_star;
};

absl::StatusOr<DissipativeSetup> SetUpDissipative(double d, double eta,
                                                  double lambda, double kappa,
                                                  double beta, double eps) {
  if (!Positive(d) || !Positive(eta) || !Positive(kappa) || !Positive(beta) ||
      !(std::isfinite(lambda) && lambda >= 0.0)) {
    return InvalidParameter("invalid_parameter",
                            "D, eta, kappa, beta must be positive and "
                            "lambda nonnegative");
  }
  PABI_RETURN_IF_ERROR(CheckEps(eps));
  const double c = 1.0 - 2.0 * eta * kappa + eta * eta * beta * beta;
  if (!(c > 0.0 && c < 1.0)) {
    // The window c < 1 is eta < 2 kappa / beta^2.
    return PreconditionViolation(
        "contraction_violated",
        absl::StrFormat("c = 1 - 2 eta kappa + eta^2 beta^2 = %g must lie in "
                        "(0, 1)",
                        c),
        2.0 * kappa / (beta * beta));
  }
  PABI_ASSIGN_OR_RETURN(
      std::int64_t t_star,
      CeilToCount(std::log1p(d * d * (1.0 - c) / (4.0 * eta)) /
                      std::log(1.0 / c),
                  "T*"));
  return DissipativeSetup{c, std::max<std::int64_t>(t_star, 1)};
}

}  // namespace

absl::StatusOr<double> ThetaThreshold(double p, double m, double d) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return InvalidParameter("invalid_p", "p must lie in [0, 1]");
  }
  if (!Positive(m) || !Positive(d)) {
    return InvalidParameter("invalid_parameter", "M and D must be positive");
  }
  const double half = m / 2.0;
  const double ratio = (1.0 - p) / (1.0 + p);
  const double inner =
      std::max(16.0 * std::log(d * std::pow(half, 1.0 / (1.0 + p)) *
                               std::numbers::e),
               27.0);
  // pow(x, 2.0) is not guaranteed to round like x * x.
  const double lead = p == 0.0 ? half * half : std::pow(half, 2.0 / (1.0 + p));
  // At p = 1 this is pow(0, 0) = 1.
  return lead * std::pow(ratio * inner, ratio);
}

absl::StatusOr<MixingResult> MixingTimeWeaklySmooth(double d, double eta,
                                                    double p, double m,
                                                    double eps) {
  if (!Positive(eta)) {
    return InvalidParameter("invalid_stepsize", "eta must be positive");
  }
  PABI_ASSIGN_OR_RETURN(double theta, ThetaThreshold(p, m, d));
  PABI_RETURN_IF_ERROR(CheckEps(eps));
  if (1.0 / eta < theta) {
    return PreconditionViolation(
        "stepsize_threshold",
        absl::StrFormat("1/eta = %.17g is below Theta = %.17g", 1.0 / eta,
                        theta),
        theta);
  }
  if (eta > d * d) {
    return PreconditionViolation(
        "stepsize_above_diameter_sq",
        absl::StrFormat("eta = %g exceeds D^2 = %g", eta, d * d), d * d);
  }
  MixingResult out;
  out.regime_parameter = theta;
  out.checks.stepsize_threshold = true;
  out.checks.eta_below_diameter_sq = true;
  PABI_ASSIGN_OR_RETURN(out.t_star, CeilToCount(d * d / eta, "D^2/eta"));
  PABI_ASSIGN_OR_RETURN(out.rounds,
                        CeilToCount(std::log2(1.0 / eps), "log2(1/eps)"));
  out.t_mix = out.t_star * out.rounds;
  return out;
}

absl::StatusOr<MixingResult> MixingTimeDissipative(double d, double eta,
                                                   double lambda, double kappa,
                                                   double beta, double eps) {
  PABI_ASSIGN_OR_RETURN(DissipativeSetup setup,
                        SetUpDissipative(d, eta, lambda, kappa, beta, eps));
  MixingResult out;
  out.regime_parameter = setup.c;
  out.checks.contraction = true;
  out.t_star = setup.t_star;
  const double e = std::numbers::e;
  PABI_ASSIGN_OR_RETURN(
      out.rounds,
      CeilToCount(2.0 * e * std::numbers::ln2 *
                      std::pow(e / (1.0 - setup.c), lambda / 2.0) *
                      std::log2(1.0 / eps),
                  "rounds"));
  out.t_mix = out.t_star * out.rounds;
  return out;
}

absl::StatusOr<MixingResult> MixingTimeDissipativePipeline(
    double d, double eta, double lambda, double kappa, double beta,
    double eps) {
  PABI_ASSIGN_OR_RETURN(DissipativeSetup setup,
                        SetUpDissipative(d, eta, lambda, kappa, beta, eps));
  PABI_ASSIGN_OR_RETURN(
      RenyiBoundResult kl,
      RenyiBoundDissipative(1.0, d, setup.c, 2.0 * eta * lambda,
                            std::sqrt(2.0 * eta), setup.t_star,
                            DissipativeForm::kLogUpper));
  PABI_ASSIGN_OR_RETURN(double gamma, BretagnolleHuberTv(kl.value));
  MixingResult out;
  out.regime_parameter = setup.c;
  out.checks.contraction = true;
  out.t_star = setup.t_star;
  PABI_ASSIGN_OR_RETURN(out.rounds, BoostRounds(gamma, eps));
  out.t_mix = out.t_star * out.rounds;
  return out;
}

absl::StatusOr<double> PinskerTv(double kl) {
  if (!(kl >= 0.0)) {
    return InvalidParameter("invalid_kl", "KL must be nonnegative");
  }
  return std::min(1.0, std::sqrt(kl / 2.0));
}

absl::StatusOr<double> BretagnolleHuberTv(double kl) {
  if (!(kl >= 0.0)) {
    return InvalidParameter("invalid_kl", "KL must be nonnegative");
  }
  return std::sqrt(-std::expm1(-kl));
}

absl::StatusOr<std::int64_t> BoostRounds(double gamma, double eps) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    return InvalidParameter(
        "invalid_gamma", absl::StrFormat("gamma = %g must lie in [0, 1)", gamma));
  }
  PABI_RETURN_IF_ERROR(CheckEps(eps));
  if (gamma == 0.0) return 1;
  PABI_ASSIGN_OR_RETURN(
      std::int64_t rounds,
      CeilToCount(std::log(1.0 / eps) / std::log(1.0 / gamma), "rounds"));
  return std::max<std::int64_t>(rounds, 1);
}

}  // namespace pabi
