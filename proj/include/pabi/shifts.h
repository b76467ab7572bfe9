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

#ifndef PABI_SHIFTS_H_
#define PABI_SHIFTS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "pabi/modulus.h"

namespace pabi {

// Everything the shift-optimisation problem consumes: domain diameter D,
// per-step noise standard deviations sigma_0..sigma_{T-1} and per-step moduli
// phi_0..phi_{T-1}. The horizon T is the common length.
class IterationSpec {
 public:
  static absl::StatusOr<IterationSpec> Create(
      double diameter, std::vector<double> sigmas,
      std::vector<QuadraticModulus> moduli);

  // Constant noise and modulus over T steps.
  static absl::StatusOr<IterationSpec> Constant(double diameter,
                                                std::int64_t horizon,
                                                double sigma,
                                                const QuadraticModulus& phi);

  double diameter() const { return diameter_; }
  std::int64_t horizon() const {
    return static_cast<std::int64_t>(sigmas_.size());
  }
  std::span<const double> sigmas() const { return sigmas_; }
  std::span<const QuadraticModulus> moduli() const { return moduli_; }

 private:
  IterationSpec(double diameter, std::vector<double> sigmas,
                std::vector<QuadraticModulus> moduli)
      : diameter_(diameter),
        sigmas_(std::move(sigmas)),
        moduli_(std::move(moduli)) {}

  double diameter_;
  std::vector<double> sigmas_;
  std::vector<QuadraticModulus> moduli_;
};

// u has T+1 entries with u[0] = D and u[T] = 0; a has T entries where
// a[t-1] = phi_{t-1}(u_{t-1}) - u_t is the shift spent at step t.
struct ShiftSolution {
  std::vector<double> u;
  std::vector<double> a;
  double objective = 0.0;
};

// E(u) = sum_t (phi_{t-1}(u_{t-1}) - u_t)^2 / sigma_{t-1}^2 over the T-1 free
// interpolation levels. Defined on all of R^{T-1}; no feasibility is implied.
absl::StatusOr<double> ObjectiveE(const IterationSpec& spec,
                                  std::span<const double> u_inner);

// The unique minimiser of E, obtained by the forward recursion
//   u_t = (S_t / S_{t-1}) * phi_{t-1}(u_{t-1}),
//   S_t = sum_{k=t}^{T-1} sigma_k^2 prod_{l=k+1}^{T-1} c_l.
ShiftSolution SolveClosedForm(const IterationSpec& spec);

// Forward-reachable radii r_0 = D, r_t = phi_{t-1}(r_{t-1}), t = 0..T.
std::vector<double> ReachableRadii(const IterationSpec& spec);

struct OracleOptions {
  int restarts = 8;
  // Stationarity tolerance on the projected gradient norm, relative to
  // max(1, E).
  double tol = 1e-9;
  std::int64_t max_horizon = 12;
  int max_sweeps = 400;
  int max_newton_steps = 60;
  std::uint64_t seed = 0x5eed;
};

struct OracleSolution {
  ShiftSolution solution;
  double gradient_norm = 0.0;
  int converged_restarts = 0;
};

// Independent numeric minimiser of E over the nonnegative orthant. Knows
// nothing about the closed form: multi-start projected coordinate descent
// inside the box [0, r_t], followed by a Newton polish with a
// finite-difference Hessian. Fails loudly if no restart reaches the
// stationarity tolerance.
absl::StatusOr<OracleSolution> NumericOracle(const IterationSpec& spec,
                                             const OracleOptions& options = {});

struct FeasibilityReport {
  bool feasible = true;
  std::vector<std::string> violations;
};

// u_0 = D and u_T = 0 exactly, u_t >= 0, and phi_{t-1}(u_{t-1}) >= u_t up to
// 1e-12 (relative to max(1, phi)).
absl::StatusOr<FeasibilityReport> CheckFeasibility(const IterationSpec& spec,
                                                   std::span<const double> u);

}  // namespace pabi

#endif  // PABI_SHIFTS_H_
