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
#ifndef PABI_BOUNDS_H_
#define PABI_BOUNDS_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "pabi/shifts.h"

namespace pabi {

// A Renyi divergence bound in nats. value = diameter_term + offset_term; the
// two parts are the contributions of D^2 and of the offsets h_t, already
// multiplied by alpha / 2.
struct RenyiBoundResult {
  double alpha = 1.0;
  double value = 0.0;
  double diameter_term = 0.0;
  double offset_term = 0.0;
};

// Bound on R_alpha(X_T || X'_T) for two projected noisy iterations started
// at distance D, for general per-step moduli:
//
//   (alpha/2) [ prod_k c_k D^2 / S_0 + sum_t h_t prod_{k>t} c_k / S_t ],
//   S_t = sum_{j>=t} sigma_j^2 prod_{l>j} c_l.
//
// Evaluated through w_t = S_t / prod_{l>t} c_l, which satisfies
// w_t = sigma_t^2 + w_{t+1} / c_{t+1} and never forms the products directly,
// so c^T may under- or overflow without harm. alpha = 1 gives the KL bound.
absl::StatusOr<RenyiBoundResult> RenyiBoundGeneral(double alpha,
                                                   const IterationSpec& spec);

enum class SqrtShiftForm { kExactHarmonic, kLogUpper };

// Constant modulus sqrt(delta^2 + h) and constant sigma:
// (alpha / 2 sigma^2)(D^2 / T + h H_T), or h ln(T e) in place of h H_T.
absl::StatusOr<RenyiBoundResult> RenyiBoundSqrtShift(double alpha, double d,
                                                     double h, double sigma,
                                                     std::int64_t horizon,
                                                     SqrtShiftForm form);

enum class DissipativeForm { kExactSum, kLogUpper };

// Constant contraction c in (0, 1), offset h and sigma:
// (alpha / 2 sigma^2)(D^2 c^T (1-c) / (1-c^T) + h G), where G is either
// sum_{t<T} c^t / sum_{j<=t} c^j or its upper estimate ln(((1-c^T)/(1-c)) e).
// Within 1e-12 of c = 1 the harmonic (c = 1) formulas are used.
absl::StatusOr<RenyiBoundResult> RenyiBoundDissipative(
    double alpha, double d, double c, double h, double sigma,
    std::int64_t horizon, DissipativeForm form);

// KL bound for the projected Langevin chain (sigma^2 = 2 eta) with modulus
// sqrt(delta^2 + h): D^2 / (4 eta T) + h ln(T e) / (4 eta).
absl::StatusOr<double> KlBoundPla(double d, double eta, double h,
                                  std::int64_t horizon);

// H_T = sum_{t=1}^T 1/t. Exact summation up to 10^7 terms, asymptotic
// expansion beyond.
double HarmonicNumber(std::int64_t horizon);

// sum_{t=0}^{T-1} c^t / sum_{j=0}^{t} c^j for 0 < c < 1.
double DissipativeOffsetSum(double c, std::int64_t horizon);

}  // namespace pabi

#endif  // PABI_BOUNDS_H_
