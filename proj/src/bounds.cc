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
#include "pabi/bounds.h"

#include <cmath>
#include <numbers>

#include "absl/strings/str_format.h"
#include "pabi/status.h"

namespace pabi {
namespace {

absl::Status CheckAlpha(double alpha) {
  if (!(std::isfinite(alpha) && alpha >= 1.0)) {
    return InvalidParameter("invalid_alpha",
                            absl::StrFormat("alpha = %g must be >= 1", alpha));
  }
  return absl::OkStatus();
}

absl::Status CheckCommon(double d, double h, double sigma,
                         std::int64_t horizon) {
  if (!(std::isfinite(d) && d > 0.0)) {
    return InvalidParameter("invalid_diameter", "D must be positive");
  }
  if (!(std::isfinite(h) && h >= 0.0)) {
    return InvalidParameter("invalid_offset", "h must be nonnegative");
  }
  if (!(std::isfinite(sigma) && sigma > 0.0)) {
    return InvalidParameter("invalid_sigma", "sigma must be positive");
  }
  if (horizon < 1) {
    return InvalidParameter("invalid_horizon", "T must be at least 1");
  }
  return absl::OkStatus();
}

RenyiBoundResult Assemble(double alpha, double scale, double diameter_part,
                          double offset_part) {
  RenyiBoundResult out;
  out.alpha = alpha;
  out.diameter_term = scale * diameter_part;
  out.offset_term = scale * offset_part;
  out.value = out.diameter_term + out.offset_term;
  return out;
}

}  // namespace

absl::StatusOr<RenyiBoundResult> RenyiBoundGeneral(double alpha,
                                                   const IterationSpec& spec) {
  PABI_RETURN_IF_ERROR(CheckAlpha(alpha));
  const std::int64_t horizon = spec.horizon();
  auto sigmas = spec.sigmas();
  auto moduli = spec.moduli();

  double w = sigmas[horizon - 1] * sigmas[horizon - 1];
  double offsets = moduli[horizon - 1].h() / w;
  for (std::int64_t t = horizon - 2; t >= 0; --t) {
    w = sigmas[t] * sigmas[t] + w / moduli[t + 1].c();
    offsets += moduli[t].h() / w;
  }
  const double d = spec.diameter();
  const double diameter_part = moduli[0].c() * d * d / w;
  return Assemble(alpha, alpha / 2.0, diameter_part, offsets);
}

double HarmonicNumber(std::int64_t horizon) {
  constexpr std::int64_t kExactLimit = 10'000'000;
  if (horizon <= 0) return 0.0;
  if (horizon <= kExactLimit) {
    // Smallest terms first keeps the rounding error at a few ulps.
    double sum = 0.0;
    for (std::int64_t t = horizon; t >= 1; --t) sum += 1.0 / t;
    return sum;
  }
  const double n = static_cast<double>(horizon);
  const double inv2 = 1.0 / (n * n);
  return std::log(n) + std::numbers::egamma + 0.5 / n -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
}

double DissipativeOffsetSum(double c, std::int64_t horizon) {
  // c^t (1 - c) / (1 - c^{t+1}); terms vanish geometrically, so stop once
  // they no longer change the sum.
  const double log_c = std::log(c);
  const double one_minus_c = 1.0 - c;
  double sum = 0.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    const double term =
        std::pow(c, static_cast<double>(t)) * one_minus_c /
        -std::expm1(static_cast<double>(t + 1) * log_c);
    if (term == 0.0 || (t > 0 && sum + term == sum)) break;
    sum += term;
  }
  return sum;
}

absl::StatusOr<RenyiBoundResult> RenyiBoundSqrtShift(double alpha, double d,
                                                     double h, double sigma,
                                                     std::int64_t horizon,
                                                     SqrtShiftForm form) {
  PABI_RETURN_IF_ERROR(CheckAlpha(alpha));
  PABI_RETURN_IF_ERROR(CheckCommon(d, h, sigma, horizon));
  const double t = static_cast<double>(horizon);
  const double growth = form == SqrtShiftForm::kExactHarmonic
                            ? HarmonicNumber(horizon)
                            : std::log(t * std::numbers::e);
  return Assemble(alpha, alpha / (2.0 * sigma * sigma), d * d / t,
                  h * growth);
}

absl::StatusOr<RenyiBoundResult> RenyiBoundDissipative(
    double alpha, double d, double c, double h, double sigma,
    std::int64_t horizon, DissipativeForm form) {
  PABI_RETURN_IF_ERROR(CheckAlpha(alpha));
  PABI_RETURN_IF_ERROR(CheckCommon(d, h, sigma, horizon));
  if (!(std::isfinite(c) && c > 0.0 && c < 1.0)) {
    return InvalidParameter(
        "invalid_contraction",
        absl::StrFormat("c = %g must lie in (0, 1); use the general bound "
                        "for c >= 1",
                        c));
  }
  if (std::abs(1.0 - c) < 1e-12) {
    return RenyiBoundSqrtShift(alpha, d, h, sigma, horizon,
                               form == DissipativeForm::kExactSum
                                   ? SqrtShiftForm::kExactHarmonic
                                   : SqrtShiftForm::kLogUpper);
  }
  const double t = static_cast<double>(horizon);
  const double log_c = std::log(c);
  // 1 - c^T without cancellation.
  const double one_minus_ct = -std::expm1(t * log_c);
  const double diameter_part =
      d * d * std::exp(t * log_c) * (1.0 - c) / one_minus_ct;
  const double growth =
      form == DissipativeForm::kExactSum
          ? DissipativeOffsetSum(c, horizon)
          : 1.0 + std::log(one_minus_ct / (1.0 - c));
  return Assemble(alpha, alpha / (2.0 * sigma * sigma), diameter_part,
                  h * growth);
}

absl::StatusOr<double> KlBoundPla(double d, double eta, double h,
                                  std::int64_t horizon) {
  if (!(std::isfinite(eta) && eta > 0.0)) {
    return InvalidParameter("invalid_stepsize", "eta must be positive");
  }
  PABI_RETURN_IF_ERROR(CheckCommon(d, h, 1.0, horizon));
  const double t = static_cast<double>(horizon);
  return d * d / (4.0 * eta * t) +
         h * std::log(t * std::numbers::e) / (4.0 * eta);
}

}  // namespace pabi
