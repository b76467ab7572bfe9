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
#include "pabi/privacy.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "fmt/format.h"
#include "pabi/status.h"

namespace pabi {
namespace {

bool Positive(double x) { return std::isfinite(x) && x > 0.0; }

constexpr double kAlphaTol = 1e-6;

}  // namespace

std::string_view RegimeName(PrivacyRegime regime) {
  return regime == PrivacyRegime::kCapped ? "capped" : "growing";
}

absl::StatusOr<std::int64_t> Tbar(double d, std::int64_t n, double eta,
                                  double lipschitz) {
  if (!Positive(d) || n < 1 || !Positive(eta) || !Positive(lipschitz)) {
    return InvalidParameter("invalid_parameter",
                            "D, n, eta and L must be positive");
  }
  const double raw = std::ceil(d * static_cast<double>(n) / (4.0 * eta * lipschitz));
  if (!(raw < 9.0e18)) {
    return absl::OutOfRangeError("tbar does not fit an iteration count");
  }
  return static_cast<std::int64_t>(raw);
}

bool SubsampledGaussianConditionsHold(double q, double sigma, double alpha) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) return false;
  const double s2 = sigma * sigma;
  const double m = std::log1p(1.0 / (q * (alpha - 1.0)));
  if (!(alpha <= m * s2 / 2.0 - std::log(s2))) return false;
  const double denominator = m + std::log(q * alpha) + 1.0 / (2.0 * s2);
  if (!(denominator > 0.0)) return false;
  return alpha <= (m * m * s2 / 2.0 - std::log(5.0 * s2)) / denominator;
}

absl::StatusOr<double> AlphaStar(double q, double sigma) {
  if (!(q > 0.0 && q < 0.2)) {
    return PreconditionViolation(
        "sampling_rate", absl::StrFormat("q = %g must lie in (0, 1/5)", q),
        0.2);
  }
  if (!(std::isfinite(sigma) && sigma >= 4.0)) {
    return PreconditionViolation(
        "noise_too_small", absl::StrFormat("sigma = %g must be >= 4", sigma),
        4.0);
  }
  auto ok = [&](double alpha) {
    return SubsampledGaussianConditionsHold(q, sigma, alpha);
  };
  double lo = 1.0 + kAlphaTol;
  if (!ok(lo)) {
    return PreconditionViolation(
        "no_valid_alpha",
        absl::StrFormat("no valid alpha range for q = %g, sigma = %g", q,
                        sigma));
  }
  double hi = 2.0;
  while (ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) return absl::OutOfRangeError("alpha* search diverged");
  }

  // The predicate is not known to be monotone. Scan (1, lo] geometrically in
  // alpha - 1; the first failure caps the search from above.
  constexpr int kScan = 2000;
  const double log_first = std::log(kAlphaTol);
  const double log_last = std::log(lo - 1.0);
  double last_good = 1.0 + kAlphaTol;
  for (int i = 1; i <= kScan; ++i) {
    const double alpha =
        1.0 + std::exp(log_first + (log_last - log_first) * i / kScan);
    if (!ok(alpha)) {
      lo = last_good;
      hi = alpha;
      break;
    }
    last_good = alpha;
  }

  while (hi - lo > kAlphaTol * std::max(1.0, lo)) {
    const double mid = lo + (hi - lo) / 2.0;
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

absl::StatusOr<double> SAlphaBound(double q, double sigma, double alpha) {
  PABI_ASSIGN_OR_RETURN(double alpha_star, AlphaStar(q, sigma));
  if (!(alpha > 1.0 && alpha <= alpha_star)) {
    return PreconditionViolation(
        "alpha_out_of_range",
        absl::StrFormat("alpha = %g must lie in (1, alpha*] with alpha* = %.17g",
                        alpha, alpha_star),
        alpha_star);
  }
  return 2.0 * alpha * q * q / (sigma * sigma);
}

absl::StatusOr<double> VTerm(double d, double m, std::int64_t tbar,
                             double eta, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    return InvalidParameter("invalid_p", "p must lie in [0, 1]");
  }
  if (!Positive(d) || !Positive(m) || !Positive(eta) || tbar < 1) {
    return InvalidParameter("invalid_parameter",
                            "D, M, eta must be positive and tbar >= 1");
  }
  if (p == 1.0) return 0.0;
  const double t = static_cast<double>(tbar);
  const double base =
      2.0 * t / d * std::pow(eta * m / 2.0, 1.0 / (1.0 - p));
  return base * base * ((1.0 - p) / (1.0 + p)) * std::log(t * std::numbers::e);
}

absl::StatusOr<EpsilonResult> EpsilonNsgd(const PrivacySpec& spec) {
  const double n = static_cast<double>(spec.n);
  const double lip = spec.lipschitz;
  const double m = spec.hoelder_constant;
  const double p = spec.p;
  const double eta = spec.eta;
  const double sigma = spec.sigma;
  if (spec.n < 1 || !Positive(spec.b) || !Positive(lip) || !Positive(m) ||
      !Positive(eta) || !Positive(sigma) || !Positive(spec.diameter)) {
    return InvalidParameter("invalid_parameter",
                            "n, b, L, M, eta, sigma, D must be positive");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    return InvalidParameter("invalid_p", "p must lie in [0, 1]");
  }
  if (spec.b > n) {
    return PreconditionViolation(
        "batch_exceeds_dataset",
        absl::StrFormat("b = %g exceeds n = %d", spec.b, spec.n), n);
  }
  const double q = spec.b / n;
  if (!(q < 0.2)) {
    return PreconditionViolation(
        "sampling_rate", absl::StrFormat("b/n = %g must be below 1/5", q),
        n / 5.0);
  }
  const double sigma_floor = 8.0 * std::numbers::sqrt2 * lip / spec.b;
  if (!(sigma > sigma_floor)) {
    return PreconditionViolation(
        "noise_too_small",
        absl::StrFormat("sigma = %g must exceed 8 sqrt(2) L / b = %.17g",
                        sigma, sigma_floor),
        sigma_floor);
  }
  if (p == 1.0 && eta > 2.0 / m) {
    return PreconditionViolation(
        "stepsize_not_nonexpansive",
        absl::StrFormat("p = 1 requires eta <= 2/M = %g", 2.0 / m), 2.0 / m);
  }
  PABI_ASSIGN_OR_RETURN(std::int64_t tbar,
                        Tbar(spec.diameter, spec.n, eta, lip));
  if (spec.horizon <= tbar) {
    return PreconditionViolation(
        "horizon_below_tbar",
        absl::StrFormat("T = %d must exceed tbar = %d", spec.horizon, tbar),
        static_cast<double>(tbar) + 1.0);
  }
  if (!(spec.alpha > 1.0)) {
    return PreconditionViolation("alpha_out_of_range", "alpha must exceed 1",
                                 1.0);
  }

  // Per-step sensitivity 2 eta L / b against noise eta sigma / sqrt(2) per
  // coordinate gives the subsampled Gaussian with sigma' = b sigma/(2 sqrt2 L).
  const double sigma_eff = spec.b * sigma / (2.0 * std::numbers::sqrt2 * lip);
  PABI_ASSIGN_OR_RETURN(double per_step, SAlphaBound(q, sigma_eff, spec.alpha));
  PABI_ASSIGN_OR_RETURN(double alpha_star, AlphaStar(q, sigma_eff));
  PABI_ASSIGN_OR_RETURN(double v, VTerm(spec.diameter, m, tbar, eta, p));

  EpsilonResult out;
  out.tbar = tbar;
  out.v_term = v;
  out.alpha_star = alpha_star;
  const double t = static_cast<double>(spec.horizon);
  const double tb = static_cast<double>(tbar);
  out.cap_horizon = 2.0 * tb + v;
  out.regime =
      t >= out.cap_horizon ? PrivacyRegime::kCapped : PrivacyRegime::kGrowing;
  out.epsilon_cap = per_step * std::min(t, out.cap_horizon);
  out.epsilon = out.epsilon_cap;

  const double d = spec.diameter;
  double offset = 0.0;
  if (p < 1.0) {
    // eta^{2p/(1-p)} (M/2)^{2/(1-p)} = (eta M/2)^{2/(1-p)} / eta^2; the split
    // form hits 0 * inf as p -> 1.
    offset = 4.0 * (std::pow(eta * m / 2.0, 2.0 / (1.0 - p)) / (eta * eta)) *
             ((1.0 - p) / (1.0 + p)) * std::log(tb * std::numbers::e);
  }
  out.epsilon_three_term = spec.alpha / (sigma * sigma) *
                    (16.0 * lip * lip * tb / (n * n) + d * d / (eta * eta * tb) +
                     offset);
  return out;
}

absl::StatusOr<std::vector<double>> GeometricGrid(double start, double end,
                                                  std::int64_t count) {
  if (!Positive(start) || !Positive(end) || count < 1 ||
      (count == 1 && start != end)) {
    return InvalidParameter("invalid_grid",
                            "geometric grid needs positive endpoints and "
                            "count >= 1 (count 1 only when start == end)");
  }
  std::vector<double> grid(count);
  const double ls = std::log(start);
  const double le = std::log(end);
  for (std::int64_t k = 0; k < count; ++k) {
    grid[k] = std::exp(ls + (le - ls) * static_cast<double>(k) /
                                static_cast<double>(count - 1 > 0 ? count - 1 : 1));
  }
  grid.front() = start;
  grid.back() = end;
  return grid;
}

absl::StatusOr<std::vector<double>> LinearGrid(double start, double end,
                                               std::int64_t count) {
  if (!std::isfinite(start) || !std::isfinite(end) || count < 1 ||
      (count == 1 && start != end)) {
    return InvalidParameter("invalid_grid",
                            "linear grid needs finite endpoints and count >= 1 "
                            "(count 1 only when start == end)");
  }
  std::vector<double> grid(count);
  for (std::int64_t k = 0; k < count; ++k) {
    grid[k] = start + (end - start) * static_cast<double>(k) /
                          static_cast<double>(count - 1 > 0 ? count - 1 : 1);
  }
  grid.back() = end;
  return grid;
}

absl::StatusOr<std::vector<double>> ParseGrid(absl::string_view text) {
  const auto colon = text.find(':');
  if (colon == absl::string_view::npos) {
    return InvalidParameter(
        "invalid_grid",
        absl::StrFormat("grid '%s' must look like geometric:start,end,count",
                        text));
  }
  const absl::string_view kind = text.substr(0, colon);
  std::vector<absl::string_view> parts =
      absl::StrSplit(text.substr(colon + 1), ',');
  double start = 0.0, end = 0.0;
  std::int64_t count = 0;
  if (parts.size() != 3 || !absl::SimpleAtod(parts[0], &start) ||
      !absl::SimpleAtod(parts[1], &end) || !absl::SimpleAtoi(parts[2], &count)) {
    return InvalidParameter(
        "invalid_grid",
        absl::StrFormat("grid '%s' needs start,end,count", text));
  }
  if (kind == "geometric") return GeometricGrid(start, end, count);
  if (kind == "linear") return LinearGrid(start, end, count);
  return InvalidParameter(
      "invalid_grid",
      absl::StrFormat("unknown grid kind '%s' (geometric or linear)", kind));
}

absl::StatusOr<std::vector<SweepRow>> PrivacyCurveSweep(const SweepSpec& spec) {
  if (spec.eta_grid.empty()) {
    return InvalidParameter("empty_grid", "eta grid is empty");
  }
  if (spec.ps.empty()) {
    return InvalidParameter("empty_grid", "no p values given");
  }
  if (spec.n < 1) return InvalidParameter("invalid_parameter", "n must be >= 1");
  const double n = static_cast<double>(spec.n);
  const double lo = 1.0 / n;
  const double hi = std::pow(n, -0.2);
  constexpr double kSlack = 1e-12;
  for (double eta : spec.eta_grid) {
    if (!(eta >= lo * (1.0 - kSlack) && eta <= hi * (1.0 + kSlack))) {
      return InvalidParameter(
          "grid_out_of_range",
          absl::StrFormat("eta = %g outside [1/n, n^(-1/5)] = [%g, %g]", eta,
                          lo, hi));
    }
  }
  std::vector<SweepRow> rows;
  rows.reserve(spec.eta_grid.size() * spec.ps.size());
  for (double eta : spec.eta_grid) {
    PABI_ASSIGN_OR_RETURN(std::int64_t tbar,
                          Tbar(spec.diameter, spec.n, eta, spec.lipschitz));
    for (double p : spec.ps) {
      SweepRow row;
      row.eta = eta;
      row.p = p;
      row.tbar = tbar;
      PABI_ASSIGN_OR_RETURN(
          row.v, VTerm(spec.diameter, spec.hoelder_constant, tbar, eta, p));
      row.bound = 2.0 * static_cast<double>(tbar) + row.v;
      row.ln_bound = std::log(row.bound);
      rows.push_back(row);
    }
  }
  return rows;
}

void WriteSweepCsv(std::span<const SweepRow> rows, std::ostream& out) {
  out << "eta,p,tbar,v,bound,ln_bound\n";
  for (const SweepRow& r : rows) {
    out << fmt::format("{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", r.eta,
                       r.p, r.tbar, r.v, r.bound, r.ln_bound);
  }
}

}  // namespace pabi
