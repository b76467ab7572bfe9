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
#ifndef PABI_MIXING_H_
#define PABI_MIXING_H_

#include <cstdint>

#include "absl/status/statusor.h"

namespace pabi {

// Preconditions that were checked on the way to a mixing bound. A flag is
// only true when the corresponding check applied and passed.
struct RegimeChecks {
  bool stepsize_threshold = false;  // 1/eta >= Theta
  bool eta_below_diameter_sq = false;  // eta <= D^2
  bool contraction = false;  // 0 < c < 1
};

// t_mix = t_star * rounds.
struct MixingResult {
  std::int64_t t_mix = 0;
  std::int64_t t_star = 0;
  std::int64_t rounds = 0;
  // Theta for the weakly smooth bound, c for the dissipative one.
  double regime_parameter = 0.0;
  RegimeChecks checks;
};

// Stepsize threshold for (p, M)-weakly smooth potentials on a domain of
// diameter D:
//   (M/2)^{2/(1+p)} [((1-p)/(1+p)) max{16 ln(D (M/2)^{1/(1+p)} e), 27}]^{(1-p)/(1+p)}.
// Equals M/2 at p = 1.
absl::StatusOr<double> ThetaThreshold(double p, double m, double d);

// ceil(D^2/eta) * ceil(log2(1/eps)), valid when 1/eta >= Theta and
// eta <= D^2 (the latter is used by the constant-error horizon argument).
absl::StatusOr<MixingResult> MixingTimeWeaklySmooth(double d, double eta,
                                                    double p, double m,
                                                    double eps);

// ceil(log_{1/c}(1 + D^2 (1-c)/(4 eta)))
//   * ceil(2e ln2 (e/(1-c))^{lambda/2} log2(1/eps)),
// with c = 1 - 2 eta kappa + eta^2 beta^2 required to lie in (0, 1).
absl::StatusOr<MixingResult> MixingTimeDissipative(double d, double eta,
                                                   double lambda, double kappa,
                                                   double beta, double eps);

// The same horizon reached without the final simplification: KL at T* from
// the dissipative log-upper bound, Bretagnolle-Huber to a TV level gamma,
// then boost_rounds(gamma, eps). Never larger than MixingTimeDissipative.
absl::StatusOr<MixingResult> MixingTimeDissipativePipeline(
    double d, double eta, double lambda, double kappa, double beta,
    double eps);

// min(1, sqrt(kl / 2)).
absl::StatusOr<double> PinskerTv(double kl);

// sqrt(1 - exp(-kl)).
absl::StatusOr<double> BretagnolleHuberTv(double kl);

// Rounds R of a chain whose TV contracts by gamma per block needed to reach
// eps: max(1, ceil(ln(1/eps) / ln(1/gamma))). gamma = 0 needs one round.
absl::StatusOr<std::int64_t> BoostRounds(double gamma, double eps);

}  // namespace pabi

#endif  // PABI_MIXING_H_
