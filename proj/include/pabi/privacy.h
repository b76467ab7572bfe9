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
#ifndef PABI_PRIVACY_H_
#define PABI_PRIVACY_H_

#include <cstdint>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace pabi {

// Noisy SGD with Poisson subsampling at rate b/n and Gaussian noise
// N(0, eta^2 sigma^2 I) on a (p, M)-weakly smooth, L-Lipschitz loss over a
// domain of diameter D.
struct PrivacySpec {
  std::int64_t n = 0;
  double b = 0.0;
  double lipschitz = 0.0;
  double hoelder_constant = 0.0;
  double p = 0.0;
  double eta = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  std::int64_t horizon = 0;
  double diameter = 0.0;
};

enum class PrivacyRegime { kGrowing, kCapped };

std::string_view RegimeName(PrivacyRegime regime);

struct EpsilonResult {
  // Headline: the capped composition bound epsilon_cap.
  double epsilon = 0.0;
  PrivacyRegime regime = PrivacyRegime::kGrowing;
  std::int64_t tbar = 0;
  double v_term = 0.0;
  double alpha_star = 0.0;
  // 2 tbar + V; the bound stops growing once T reaches it.
  double cap_horizon = 0.0;
  // The three-term form, kept for comparison.
  double epsilon_three_term = 0.0;
  double epsilon_cap = 0.0;
};

// ceil(D n / (4 eta L)).
absl::StatusOr<std::int64_t> Tbar(double d, std::int64_t n, double eta,
                                  double lipschitz);

// Both validity conditions for the subsampled Gaussian estimate at order
// alpha, with M = ln(1 + 1/(q (alpha - 1))):
//   alpha <= M sigma^2 / 2 - ln(sigma^2),
//   alpha <= (M^2 sigma^2 / 2 - ln(5 sigma^2)) / (M + ln(q alpha) + 1/(2 sigma^2)).
// A nonpositive denominator in the second condition counts as a failure.
bool SubsampledGaussianConditionsHold(double q, double sigma, double alpha);

// Largest alpha for which the conditions hold on the whole interval
// (1, alpha], found by doubling and bisection (tolerance 1e-6, rounded
// down). The interval is scanned on a grid first, so a non-monotone
// predicate can only shorten the answer. Requires q < 1/5 and sigma >= 4.
absl::StatusOr<double> AlphaStar(double q, double sigma);

// 2 alpha q^2 / sigma^2, refusing any alpha above AlphaStar(q, sigma).
absl::StatusOr<double> SAlphaBound(double q, double sigma, double alpha);

// (2 tbar / D (eta M / 2)^{1/(1-p)})^2 ((1-p)/(1+p)) ln(tbar e); zero at
// p = 1.
absl::StatusOr<double> VTerm(double d, double m, std::int64_t tbar,
                             double eta, double p);

// Renyi-DP level of the last iterate. Every violated precondition is
// reported by name with the threshold that would satisfy it.
absl::StatusOr<EpsilonResult> EpsilonNsgd(const PrivacySpec& spec);

// Grids, endpoints inclusive.
absl::StatusOr<std::vector<double>> GeometricGrid(double start, double end,
                                                  std::int64_t count);
absl::StatusOr<std::vector<double>> LinearGrid(double start, double end,
                                               std::int64_t count);

// "geometric:start,end,count" or "linear:start,end,count".
absl::StatusOr<std::vector<double>> ParseGrid(absl::string_view text);

struct SweepRow {
  double eta = 0.0;
  double p = 0.0;
  std::int64_t tbar = 0;
  double v = 0.0;
  double bound = 0.0;  // 2 tbar + V
  double ln_bound = 0.0;
};

struct SweepSpec {
  std::int64_t n = 0;
  double lipschitz = 0.0;
  double hoelder_constant = 0.0;
  double diameter = 0.0;
  std::vector<double> ps;
  std::vector<double> eta_grid;
};

// One row per (eta, p) in grid order, p varying fastest. The grid must lie
// in [1/n, n^{-1/5}].
absl::StatusOr<std::vector<SweepRow>> PrivacyCurveSweep(const SweepSpec& spec);

// Header eta,p,tbar,v,bound,ln_bound; 17 significant digits.
void WriteSweepCsv(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace pabi

#endif  // PABI_PRIVACY_H_
