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
#include "pabi/shifts.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "Eigen/Dense"
#include "absl/strings/str_format.h"
#include "boost/math/tools/minima.hpp"
#include "pabi/status.h"

namespace pabi {

absl::StatusOr<IterationSpec> IterationSpec::Create(
    double diameter, std::vector<double> sigmas,
    std::vector<QuadraticModulus> moduli) {
  if (!(std::isfinite(diameter) && diameter > 0.0)) {
    return InvalidParameter("invalid_diameter", "diameter D must be positive");
  }
  if (sigmas.empty()) {
    return InvalidParameter("invalid_horizon", "horizon T must be at least 1");
  }
  if (sigmas.size() != moduli.size()) {
    return InvalidParameter(
        "length_mismatch",
        absl::StrFormat("%d noise levels but %d moduli", sigmas.size(),
                        moduli.size()));
  }
  for (std::size_t t = 0; t < sigmas.size(); ++t) {
    if (!(std::isfinite(sigmas[t]) && sigmas[t] > 0.0)) {
      return InvalidParameter(
          "invalid_sigma",
          absl::StrFormat("sigma_%d = %g must be positive", t, sigmas[t]));
    }
  }
  return IterationSpec(diameter, std::move(sigmas), std::move(moduli));
}

absl::StatusOr<IterationSpec> IterationSpec::Constant(
    double diameter, std::int64_t horizon, double sigma,
    const QuadraticModulus& phi) {
  if (horizon < 1) {
    return InvalidParameter("invalid_horizon", "horizon T must be at least 1");
  }
  return Create(diameter, std::vector<double>(horizon, sigma),
                std::vector<QuadraticModulus>(horizon, phi));
}

absl::StatusOr<double> ObjectiveE(const IterationSpec& spec,
                                  std::span<const double> u_inner) {
  const std::int64_t horizon = spec.horizon();
  if (static_cast<std::int64_t>(u_inner.size()) != horizon - 1) {
    return InvalidParameter(
        "length_mismatch",
        absl::StrFormat("expected %d interpolation levels, got %d", horizon - 1,
                        u_inner.size()));
  }
  double total = 0.0;
  double previous = spec.diameter();
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double current = t == horizon ? 0.0 : u_inner[t - 1];
    const double sigma = spec.sigmas()[t - 1];
    const double gap = spec.moduli()[t - 1](previous) - current;
    total += gap * gap / (sigma * sigma);
    previous = current;
  }
  return total;
}

ShiftSolution SolveClosedForm(const IterationSpec& spec) {
  const std::int64_t horizon = spec.horizon();
  auto sigmas = spec.sigmas();
  auto moduli = spec.moduli();

  // scaled[t] = S_t / prod_{l=t}^{T-1} c_l, which obeys
  // scaled[t] = (sigma_t^2 + scaled[t+1]) / c_t and never forms c^T itself.
  std::vector<double> scaled(horizon + 1, 0.0);
  for (std::int64_t t = horizon - 1; t >= 0; --t) {
    scaled[t] = (sigmas[t] * sigmas[t] + scaled[t + 1]) / moduli[t].c();
  }

  ShiftSolution solution;
  solution.u.assign(horizon + 1, 0.0);
  solution.a.assign(horizon, 0.0);
  solution.u[0] = spec.diameter();
  for (std::int64_t t = 1; t < horizon; ++t) {
    // S_t / S_{t-1} = 1 / (1 + sigma_{t-1}^2 prod_{l=t}^{T-1} c_l / S_t).
    const double sigma_prev = sigmas[t - 1];
    const double ratio = 1.0 / (1.0 + sigma_prev * sigma_prev / scaled[t]);
    solution.u[t] = ratio * moduli[t - 1](solution.u[t - 1]);
  }
  solution.u[horizon] = 0.0;

  double objective = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double shift = moduli[t - 1](solution.u[t - 1]) - solution.u[t];
    solution.a[t - 1] = shift;
    objective += shift * shift / (sigmas[t - 1] * sigmas[t - 1]);
  }
  solution.objective = objective;
  return solution;
}

std::vector<double> ReachableRadii(const IterationSpec& spec) {
  std::vector<double> radii(spec.horizon() + 1);
  radii[0] = spec.diameter();
  for (std::int64_t t = 1; t <= spec.horizon(); ++t) {
    radii[t] = spec.moduli()[t - 1](radii[t - 1]);
  }
  return radii;
}

namespace {

// Works on the full level vector u_0..u_T with the endpoints pinned.
class ShiftObjective {
 public:
  explicit ShiftObjective(const IterationSpec& spec) : spec_(spec) {}

  std::int64_t horizon() const { return spec_.horizon(); }

  double Value(std::span<const double> u) const {
    double total = 0.0;
    for (std::int64_t t = 1; t <= horizon(); ++t) total += Term(u, t);
    return total;
  }

  // Only the two terms of E that involve u_t, as a function of u_t = v.
  double Local(std::vector<double>& u, std::int64_t t, double v) const {
    const double saved = u[t];
    u[t] = v;
    const double value = Term(u, t) + Term(u, t + 1);
    u[t] = saved;
    return value;
  }

  // dE/du_t for t = 1..T-1, written into grad[t-1].
  void Gradient(std::span<const double> u, std::span<double> grad) const {
    auto sigmas = spec_.sigmas();
    auto moduli = spec_.moduli();
    for (std::int64_t t = 1; t < horizon(); ++t) {
      const double in_gap = moduli[t - 1](u[t - 1]) - u[t];
      const double out_gap = moduli[t](u[t]) - u[t + 1];
      grad[t - 1] =
          -2.0 * in_gap / (sigmas[t - 1] * sigmas[t - 1]) +
          2.0 * out_gap * moduli[t].Derivative(u[t]) / (sigmas[t] * sigmas[t]);
    }
  }

 private:
  double Term(std::span<const double> u, std::int64_t t) const {
    const double sigma = spec_.sigmas()[t - 1];
    const double gap = spec_.moduli()[t - 1](u[t - 1]) - u[t];
    return gap * gap / (sigma * sigma);
  }

  const IterationSpec& spec_;
};

// Zeroes gradient components that point out of the orthant at active bounds.
double ProjectedGradientNorm(std::span<const double> u,
                             std::span<const double> grad) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = (u[i + 1] <= 0.0 && grad[i] > 0.0) ? 0.0 : grad[i];
    sum += g * g;
  }
  return std::sqrt(sum);
}

struct LocalResult {
  std::vector<double> u;
  double value;
  double gradient_norm;
};

LocalResult Descend(const ShiftObjective& objective,
                    const std::vector<double>& upper, std::vector<double> u,
                    const OracleOptions& options) {
  const std::int64_t horizon = objective.horizon();
  const int free = static_cast<int>(horizon - 1);
  constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

  // Coordinate sweeps until the levels stop moving.
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::int64_t t = 1; t < horizon; ++t) {
      auto local = [&](double v) { return objective.Local(u, t, v); };
      auto [best, value] =
          boost::math::tools::brent_find_minima(local, 0.0, upper[t], kBrentBits);
      (void)value;
      moved = std::max(moved, std::abs(best - u[t]) / std::max(1.0, upper[t]));
      u[t] = best;
    }
    if (moved < 1e-10) break;
  }

  // Newton polish with a central-difference Hessian of the analytic
  // gradient, Levenberg-damped whenever the Hessian is not positive definite.
  std::vector<double> grad(free), plus(free), minus(free), probe;
  Eigen::MatrixXd hessian(free, free);
  Eigen::VectorXd rhs(free);
  double value = objective.Value(u);
  objective.Gradient(u, grad);
  double gnorm = ProjectedGradientNorm(u, grad);
  for (int step = 0; step < options.max_newton_steps; ++step) {
    if (gnorm <= options.tol * std::max(1.0, value)) break;
    for (int i = 0; i < free; ++i) {
      const double h = 1e-6 * std::max(1.0, std::abs(u[i + 1]));
      probe = u;
      probe[i + 1] = u[i + 1] + h;
      objective.Gradient(probe, plus);
      probe[i + 1] = u[i + 1] - h;
      objective.Gradient(probe, minus);
      for (int j = 0; j < free; ++j) {
        hessian(j, i) = (plus[j] - minus[j]) / (2.0 * h);
      }
    }
    hessian = 0.5 * (hessian + hessian.transpose()).eval();
    for (int i = 0; i < free; ++i) rhs(i) = -grad[i];

    double damping = 0.0;
    Eigen::VectorXd direction;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd shifted = hessian;
      shifted.diagonal().array() += damping;
      Eigen::LLT<Eigen::MatrixXd> llt(shifted);
      if (llt.info() == Eigen::Success) {
        direction = llt.solve(rhs);
        break;
      }
      damping = damping == 0.0 ? 1e-8 * std::max(1.0, hessian.norm())
                               : damping * 10.0;
    }
    if (direction.size() == 0) direction = rhs;

    bool improved = false;
    for (double scale = 1.0; scale > 1e-12; scale *= 0.5) {
      probe = u;
      for (int i = 0; i < free; ++i) {
        probe[i + 1] = std::max(0.0, u[i + 1] + scale * direction(i));
      }
      const double candidate = objective.Value(probe);
      if (candidate <= value) {
        u = probe;
        value = candidate;
        improved = true;
        break;
      }
    }
    objective.Gradient(u, grad);
    gnorm = ProjectedGradientNorm(u, grad);
    if (!improved) break;
  }
  return {std::move(u), value, gnorm};
}

}  // namespace

absl::StatusOr<OracleSolution> NumericOracle(const IterationSpec& spec,
                                             const OracleOptions& options) {
  const std::int64_t horizon = spec.horizon();
  if (horizon > options.max_horizon) {
    return InvalidParameter(
        "horizon_too_large",
        absl::StrFormat("numeric oracle supports T <= %d, got %d",
                        options.max_horizon, horizon));
  }
  if (options.restarts < 1 || !(options.tol > 0.0)) {
    return InvalidParameter("invalid_oracle_options",
                            "restarts must be >= 1 and tol > 0");
  }

  const ShiftObjective objective(spec);
  const std::vector<double> upper = ReachableRadii(spec);

  std::vector<LocalResult> results;
  results.reserve(options.restarts);
  for (int restart = 0; restart < options.restarts; ++restart) {
    // Restart 0 starts from the box centre; the rest from seeded points of
    // the coarse grid {1/4, 1/2, 3/4} * r_t.
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(restart));
    std::uniform_int_distribution<int> level(1, 3);
    std::vector<double> start(horizon + 1, 0.0);
    start[0] = spec.diameter();
    for (std::int64_t t = 1; t < horizon; ++t) {
      const double fraction = restart == 0 ? 0.5 : 0.25 * level(rng);
      start[t] = fraction * upper[t];
    }
    results.push_back(Descend(objective, upper, std::move(start), options));
  }

  OracleSolution out;
  std::size_t best = results.size();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const bool converged = results[i].gradient_norm <=
                           options.tol * std::max(1.0, results[i].value);
    if (!converged) continue;
    ++out.converged_restarts;
    if (best == results.size() || results[i].value < results[best].value) {
      best = i;
    }
  }
  if (best == results.size()) {
    double smallest = std::numeric_limits<double>::infinity();
    for (const auto& r : results) smallest = std::min(smallest, r.gradient_norm);
    return absl::DeadlineExceededError(absl::StrFormat(
        "numeric oracle did not reach stationarity (best gradient norm %g, "
        "tolerance %g) within the iteration budget",
        smallest, options.tol));
  }

  LocalResult& winner = results[best];
  out.gradient_norm = winner.gradient_norm;
  out.solution.u = std::move(winner.u);
  out.solution.u[horizon] = 0.0;
  out.solution.a.resize(horizon);
  for (std::int64_t t = 1; t <= horizon; ++t) {
    out.solution.a[t - 1] =
        spec.moduli()[t - 1](out.solution.u[t - 1]) - out.solution.u[t];
  }
  out.solution.objective = objective.Value(out.solution.u);
  return out;
}

absl::StatusOr<FeasibilityReport> CheckFeasibility(const IterationSpec& spec,
                                                   std::span<const double> u) {
  const std::int64_t horizon = spec.horizon();
  if (static_cast<std::int64_t>(u.size()) != horizon + 1) {
    return InvalidParameter(
        "length_mismatch",
        absl::StrFormat("expected %d levels u_0..u_T, got %d", horizon + 1,
                        u.size()));
  }
  FeasibilityReport report;
  auto fail = [&report](std::string message) {
    report.feasible = false;
    report.violations.push_back(std::move(message));
  };
  if (u[0] != spec.diameter()) {
    fail(absl::StrFormat("u_0=%g != D=%g", u[0], spec.diameter()));
  }
  if (u[horizon] != 0.0) fail(absl::StrFormat("u_T=%g != 0", u[horizon]));
  constexpr double kTol = 1e-12;
  for (std::int64_t t = 0; t <= horizon; ++t) {
    if (u[t] < -kTol) fail(absl::StrFormat("u_%d=%g < 0", t, u[t]));
  }
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const double reach = spec.moduli()[t - 1](u[t - 1]);
    if (reach < u[t] - kTol * std::max(1.0, reach)) {
      fail(absl::StrFormat("phi_%d(u_%d)=%g < u_%d=%g", t - 1, t - 1, reach, t,
                           u[t]));
    }
  }
  return report;
}

}  // namespace pabi
