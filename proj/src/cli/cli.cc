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
#include "pabi/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "fmt/format.h"
#include "json.hpp"
#include "pabi/bounds.h"
#include "pabi/mixing.h"
#include "pabi/modulus.h"
#include "pabi/privacy.h"
#include "pabi/shifts.h"
#include "pabi/simulate.h"
#include "pabi/status.h"

namespace pabi::cli {
namespace {

using Json = nlohmann::ordered_json;
using Values = std::map<std::string, std::string>;
using Cell = std::variant<double, std::int64_t, std::string, bool>;

// What a command produces: a table, and optionally a structured report that
// replaces the table in JSON output.
struct Result {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
  std::optional<Json> report;
  // Format used when --format is auto.
  bool prefers_json = false;
};

using Handler = std::function<absl::StatusOr<Result>(const Values&)>;

struct FlagSpec {
  std::string name;
  std::string default_value;  // empty = required
  std::string help;
};

struct CommandSpec {
  std::vector<std::string> path;
  std::string help;
  std::vector<FlagSpec> flags;
  Handler handler;
};

std::string FormatDouble(double x) { return fmt::format("{:.17g}", x); }

std::string CellText(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return FormatDouble(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      cell);
}

Json CellJson(const Cell& cell) {
  return std::visit([](const auto& v) { return Json(v); }, cell);
}

// ---- flag access -----------------------------------------------------------

absl::StatusOr<double> GetDouble(const Values& v, const std::string& name) {
  const std::string& text = v.at(name);
  double x = 0.0;
  if (!absl::SimpleAtod(text, &x) || !std::isfinite(x)) {
    return InvalidParameter(
        "invalid_flag",
        absl::StrFormat("--%s expects a number, got '%s'", name, text));
  }
  return x;
}

absl::StatusOr<std::int64_t> GetCount(const Values& v,
                                      const std::string& name) {
  PABI_ASSIGN_OR_RETURN(double x, GetDouble(v, name));
  if (!(x >= 0.0 && x < 9.0e18 && std::floor(x) == x)) {
    return InvalidParameter(
        "invalid_flag", absl::StrFormat("--%s expects a nonnegative integer, "
                                        "got '%s'",
                                        name, v.at(name)));
  }
  return static_cast<std::int64_t>(x);
}

absl::StatusOr<std::vector<double>> GetList(const Values& v,
                                            const std::string& name) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(v.at(name), ',')) {
    double x = 0.0;
    if (!absl::SimpleAtod(part, &x) || !std::isfinite(x)) {
      return InvalidParameter(
          "invalid_flag",
          absl::StrFormat("--%s expects comma-separated numbers, got '%s'",
                          name, v.at(name)));
    }
    out.push_back(x);
  }
  return out;
}

bool GetSwitch(const Values& v, const std::string& name) {
  return v.at(name) == "true";
}

// A list of length 1 is repeated T times.
absl::StatusOr<std::vector<double>> Broadcast(const Values& v,
                                              const std::string& name,
                                              std::int64_t horizon) {
  PABI_ASSIGN_OR_RETURN(std::vector<double> list, GetList(v, name));
  if (list.size() == 1) return std::vector<double>(horizon, list[0]);
  if (static_cast<std::int64_t>(list.size()) != horizon) {
    return InvalidParameter(
        "length_mismatch",
        absl::StrFormat("--%s has %d entries; expected 1 or T = %d", name,
                        list.size(), horizon));
  }
  return list;
}

// ---- handlers --------------------------------------------------------------

absl::StatusOr<IterationSpec> SpecFromFlags(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double d, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(std::int64_t horizon, GetCount(v, "T"));
  if (horizon < 1) {
    return InvalidParameter("invalid_horizon", "T must be at least 1");
  }
  PABI_ASSIGN_OR_RETURN(std::vector<double> sigmas,
                        Broadcast(v, "sigma", horizon));
  PABI_ASSIGN_OR_RETURN(std::vector<double> cs, Broadcast(v, "c", horizon));
  PABI_ASSIGN_OR_RETURN(std::vector<double> hs, Broadcast(v, "h", horizon));
  std::vector<QuadraticModulus> moduli;
  for (std::int64_t t = 0; t < horizon; ++t) {
    PABI_ASSIGN_OR_RETURN(QuadraticModulus phi,
                          QuadraticModulus::Create(cs[t], hs[t]));
    moduli.push_back(phi);
  }
  return IterationSpec::Create(d, std::move(sigmas), std::move(moduli));
}

absl::StatusOr<Result> RunKl(const Values& v);

Result BoundTable(const RenyiBoundResult& r) {
  Result out;
  out.header = {"alpha", "value", "diameter_term", "offset_term"};
  out.rows.push_back({r.alpha, r.value, r.diameter_term, r.offset_term});
  return out;
}

absl::StatusOr<Result> RunBound(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double alpha, GetDouble(v, "alpha"));
  const std::string& form = v.at("form");
  if (form == "kl-pla") return RunKl(v);
  if (form == "general") {
    PABI_ASSIGN_OR_RETURN(IterationSpec spec, SpecFromFlags(v));
    PABI_ASSIGN_OR_RETURN(RenyiBoundResult r, RenyiBoundGeneral(alpha, spec));
    return BoundTable(r);
  }
  PABI_ASSIGN_OR_RETURN(double d, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(std::int64_t horizon, GetCount(v, "T"));
  PABI_ASSIGN_OR_RETURN(double sigma, GetDouble(v, "sigma"));
  PABI_ASSIGN_OR_RETURN(double c, GetDouble(v, "c"));
  PABI_ASSIGN_OR_RETURN(double h, GetDouble(v, "h"));
  absl::StatusOr<RenyiBoundResult> r;
  if (form == "sqrt-exact" || form == "sqrt-log") {
    if (c != 1.0) {
      return InvalidParameter("invalid_flag",
                              "sqrt-shift forms assume --c 1");
    }
    r = RenyiBoundSqrtShift(alpha, d, h, sigma, horizon,
                            form == "sqrt-exact" ? SqrtShiftForm::kExactHarmonic
                                                 : SqrtShiftForm::kLogUpper);
  } else if (form == "dissipative-exact" || form == "dissipative-log") {
    r = RenyiBoundDissipative(alpha, d, c, h, sigma, horizon,
                              form == "dissipative-exact"
                                  ? DissipativeForm::kExactSum
                                  : DissipativeForm::kLogUpper);
  } else {
    return InvalidParameter(
        "invalid_flag",
        absl::StrFormat("unknown --form '%s' (general, sqrt-exact, sqrt-log, "
                        "dissipative-exact, dissipative-log, kl-pla)",
                        form));
  }
  if (!r.ok()) return r.status();
  return BoundTable(*r);
}

absl::StatusOr<Result> RunKl(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double d, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(double eta, GetDouble(v, "eta"));
  PABI_ASSIGN_OR_RETURN(double h, GetDouble(v, "h"));
  PABI_ASSIGN_OR_RETURN(std::int64_t horizon, GetCount(v, "T"));
  PABI_ASSIGN_OR_RETURN(double kl, KlBoundPla(d, eta, h, horizon));
  PABI_ASSIGN_OR_RETURN(double pinsker, PinskerTv(kl));
  PABI_ASSIGN_OR_RETURN(double bh, BretagnolleHuberTv(kl));
  Result out;
  out.header = {"kl", "pinsker_tv", "bretagnolle_huber_tv"};
  out.rows.push_back({kl, pinsker, bh});
  return out;
}

absl::StatusOr<Result> RunShifts(const Values& v) {
  PABI_ASSIGN_OR_RETURN(IterationSpec spec, SpecFromFlags(v));
  ShiftSolution closed = SolveClosedForm(spec);
  std::optional<OracleSolution> oracle;
  if (GetSwitch(v, "oracle")) {
    OracleOptions options;
    PABI_ASSIGN_OR_RETURN(std::int64_t restarts, GetCount(v, "restarts"));
    options.restarts = static_cast<int>(restarts);
    PABI_ASSIGN_OR_RETURN(std::int64_t seed, GetCount(v, "seed"));
    options.seed = static_cast<std::uint64_t>(seed);
    PABI_ASSIGN_OR_RETURN(OracleSolution o, NumericOracle(spec, options));
    oracle = std::move(o);
  }
  Result out;
  out.header = {"t", "u", "shift", "objective"};
  if (oracle) {
    out.header.insert(out.header.end(),
                      {"oracle_u", "oracle_objective"});
  }
  for (std::int64_t t = 0; t <= spec.horizon(); ++t) {
    std::vector<Cell> row = {t, closed.u[t],
                             t == 0 ? 0.0 : closed.a[t - 1], closed.objective};
    if (oracle) {
      row.push_back(oracle->solution.u[t]);
      row.push_back(oracle->solution.objective);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

Result MixingTable(const MixingResult& m, const char* parameter) {
  Result out;
  out.header = {"t_mix", "t_star", "rounds", parameter};
  out.rows.push_back({m.t_mix, m.t_star, m.rounds, m.regime_parameter});
  return out;
}

absl::StatusOr<Result> RunMixingWeaklySmooth(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double d, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(double eta, GetDouble(v, "eta"));
  PABI_ASSIGN_OR_RETURN(double p, GetDouble(v, "p"));
  PABI_ASSIGN_OR_RETURN(double m, GetDouble(v, "M"));
  PABI_ASSIGN_OR_RETURN(double eps, GetDouble(v, "eps"));
  PABI_ASSIGN_OR_RETURN(MixingResult r,
                        MixingTimeWeaklySmooth(d, eta, p, m, eps));
  return MixingTable(r, "theta");
}

absl::StatusOr<Result> RunMixingDissipative(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double d, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(double eta, GetDouble(v, "eta"));
  PABI_ASSIGN_OR_RETURN(double lambda, GetDouble(v, "lambda"));
  PABI_ASSIGN_OR_RETURN(double kappa, GetDouble(v, "kappa"));
  PABI_ASSIGN_OR_RETURN(double beta, GetDouble(v, "beta"));
  PABI_ASSIGN_OR_RETURN(double eps, GetDouble(v, "eps"));
  absl::StatusOr<MixingResult> r =
      GetSwitch(v, "pipeline")
          ? MixingTimeDissipativePipeline(d, eta, lambda, kappa, beta, eps)
          : MixingTimeDissipative(d, eta, lambda, kappa, beta, eps);
  if (!r.ok()) return r.status();
  return MixingTable(*r, "c");
}

absl::StatusOr<Result> RunTheta(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double p, GetDouble(v, "p"));
  PABI_ASSIGN_OR_RETURN(double m, GetDouble(v, "M"));
  PABI_ASSIGN_OR_RETURN(double d, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(double theta, ThetaThreshold(p, m, d));
  Result out;
  out.header = {"theta", "max_eta"};
  out.rows.push_back({theta, 1.0 / theta});
  return out;
}

absl::StatusOr<Result> RunEpsilon(const Values& v) {
  PrivacySpec spec;
  PABI_ASSIGN_OR_RETURN(spec.n, GetCount(v, "n"));
  PABI_ASSIGN_OR_RETURN(spec.b, GetDouble(v, "b"));
  PABI_ASSIGN_OR_RETURN(spec.lipschitz, GetDouble(v, "L"));
  PABI_ASSIGN_OR_RETURN(spec.hoelder_constant, GetDouble(v, "M"));
  PABI_ASSIGN_OR_RETURN(spec.p, GetDouble(v, "p"));
  PABI_ASSIGN_OR_RETURN(spec.eta, GetDouble(v, "eta"));
  PABI_ASSIGN_OR_RETURN(spec.sigma, GetDouble(v, "sigma"));
  PABI_ASSIGN_OR_RETURN(spec.alpha, GetDouble(v, "alpha"));
  PABI_ASSIGN_OR_RETURN(spec.horizon, GetCount(v, "T"));
  PABI_ASSIGN_OR_RETURN(spec.diameter, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(EpsilonResult r, EpsilonNsgd(spec));
  Result out;
  out.header = {"epsilon", "regime", "tbar", "v", "cap_horizon",
                "alpha_star", "epsilon_three_term", "epsilon_cap"};
  out.rows.push_back({r.epsilon, std::string(RegimeName(r.regime)), r.tbar,
                      r.v_term, r.cap_horizon, r.alpha_star, r.epsilon_three_term,
                      r.epsilon_cap});
  return out;
}

absl::StatusOr<Result> RunSweep(const Values& v) {
  SweepSpec spec;
  PABI_ASSIGN_OR_RETURN(spec.n, GetCount(v, "n"));
  PABI_ASSIGN_OR_RETURN(spec.lipschitz, GetDouble(v, "L"));
  PABI_ASSIGN_OR_RETURN(spec.hoelder_constant, GetDouble(v, "M"));
  PABI_ASSIGN_OR_RETURN(spec.diameter, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(spec.ps, GetList(v, "p"));
  PABI_ASSIGN_OR_RETURN(spec.eta_grid, ParseGrid(v.at("eta-grid")));
  PABI_ASSIGN_OR_RETURN(std::vector<SweepRow> rows, PrivacyCurveSweep(spec));
  Result out;
  out.header = {"eta", "p", "tbar", "v", "bound", "ln_bound"};
  for (const SweepRow& r : rows) {
    out.rows.push_back({r.eta, r.p, r.tbar, r.v, r.bound, r.ln_bound});
  }
  return out;
}

absl::StatusOr<Result> RunAlphaStar(const Values& v) {
  PABI_ASSIGN_OR_RETURN(double q, GetDouble(v, "q"));
  PABI_ASSIGN_OR_RETURN(double sigma, GetDouble(v, "sigma"));
  PABI_ASSIGN_OR_RETURN(double alpha_star, AlphaStar(q, sigma));
  Result out;
  out.header = {"alpha_star", "s_alpha_at_alpha_star"};
  PABI_ASSIGN_OR_RETURN(double s, SAlphaBound(q, sigma, alpha_star));
  out.rows.push_back({alpha_star, s});
  return out;
}

absl::StatusOr<Potential> PotentialFromFlags(const Values& v) {
  const std::string& name = v.at("potential");
  if (name == "flat") return Flat{};
  if (name == "abs") {
    PABI_ASSIGN_OR_RETURN(double l, GetDouble(v, "L"));
    return AbsLipschitz{l};
  }
  if (name == "power") {
    PABI_ASSIGN_OR_RETURN(double p, GetDouble(v, "p"));
    PABI_ASSIGN_OR_RETURN(double m, GetDouble(v, "M"));
    return PowerWeaklySmooth{p, m};
  }
  if (name == "quadratic") {
    PABI_ASSIGN_OR_RETURN(double beta, GetDouble(v, "beta"));
    return QuadraticSmooth{beta};
  }
  if (name == "dissipative") {
    PABI_ASSIGN_OR_RETURN(double kappa, GetDouble(v, "kappa"));
    PABI_ASSIGN_OR_RETURN(double beta, GetDouble(v, "beta"));
    PABI_ASSIGN_OR_RETURN(double lambda, GetDouble(v, "lambda"));
    return DissipativeQuadratic{kappa, beta, lambda};
  }
  return InvalidParameter(
      "invalid_flag",
      absl::StrFormat("unknown --potential '%s' (flat, abs, power, quadratic, "
                      "dissipative)",
                      name));
}

absl::StatusOr<DomainShape> DomainFromFlags(const Values& v) {
  const std::string& name = v.at("domain");
  if (name == "box") return DomainShape::kBox;
  if (name == "ball") return DomainShape::kBall;
  return InvalidParameter("invalid_flag",
                          absl::StrFormat("unknown --domain '%s'", name));
}

absl::StatusOr<Result> RunSimulate(const Values& v) {
  PABI_ASSIGN_OR_RETURN(Potential potential, PotentialFromFlags(v));
  ChainConfig config;
  PABI_ASSIGN_OR_RETURN(std::int64_t dim, GetCount(v, "dim"));
  config.dim = static_cast<int>(dim);
  PABI_ASSIGN_OR_RETURN(config.domain, DomainFromFlags(v));
  PABI_ASSIGN_OR_RETURN(config.diameter, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(config.eta, GetDouble(v, "eta"));
  if (v.at("sigma") == "langevin") {
    config.sigma = std::sqrt(2.0 * config.eta);
  } else {
    PABI_ASSIGN_OR_RETURN(config.sigma, GetDouble(v, "sigma"));
  }
  PABI_ASSIGN_OR_RETURN(config.steps, GetCount(v, "T"));
  PABI_ASSIGN_OR_RETURN(config.chains, GetCount(v, "chains"));
  PABI_ASSIGN_OR_RETURN(std::int64_t seed, GetCount(v, "seed"));
  config.seed = static_cast<std::uint64_t>(seed);
  PABI_ASSIGN_OR_RETURN(std::int64_t threads, GetCount(v, "threads"));
  config.threads = static_cast<int>(threads);
  PABI_RETURN_IF_ERROR(ValidateChainConfig(config));

  std::vector<double> init;
  const std::string& where = v.at("init");
  if (where == "low" || where == "high") {
    auto corners = OppositeCorners(config);
    init = where == "low" ? corners.first : corners.second;
  } else if (where == "center") {
    init.assign(config.dim, 0.0);
  } else {
    PABI_ASSIGN_OR_RETURN(init, GetList(v, "init"));
  }
  PABI_ASSIGN_OR_RETURN(SampleMatrix samples,
                        RunChains(potential, config, init));
  Result out;
  out.header = {"chain"};
  for (int k = 0; k < samples.dim; ++k) {
    out.header.push_back(absl::StrFormat("dim%d", k));
  }
  for (std::int64_t r = 0; r < samples.rows; ++r) {
    std::vector<Cell> row = {r};
    for (int k = 0; k < samples.dim; ++k) row.push_back(samples.at(r, k));
    out.rows.push_back(std::move(row));
  }
  return out;
}

absl::StatusOr<Result> RunValidateMixing(const Values& v) {
  MixingValidationConfig config;
  PABI_ASSIGN_OR_RETURN(config.potential, PotentialFromFlags(v));
  PABI_ASSIGN_OR_RETURN(std::int64_t dim, GetCount(v, "dim"));
  config.dim = static_cast<int>(dim);
  PABI_ASSIGN_OR_RETURN(config.domain, DomainFromFlags(v));
  PABI_ASSIGN_OR_RETURN(config.diameter, GetDouble(v, "D"));
  PABI_ASSIGN_OR_RETURN(config.eta, GetDouble(v, "eta"));
  PABI_ASSIGN_OR_RETURN(config.chains, GetCount(v, "chains"));
  PABI_ASSIGN_OR_RETURN(std::int64_t seed, GetCount(v, "seed"));
  config.seed = static_cast<std::uint64_t>(seed);
  PABI_ASSIGN_OR_RETURN(std::int64_t threads, GetCount(v, "threads"));
  config.threads = static_cast<int>(threads);
  PABI_ASSIGN_OR_RETURN(std::int64_t bins, GetCount(v, "bins"));
  config.tv.bins = static_cast<int>(bins);
  PABI_ASSIGN_OR_RETURN(config.tv.confidence, GetDouble(v, "confidence"));
  PABI_ASSIGN_OR_RETURN(MixingValidationReport r, ValidateMixingBound(config));

  Json cfg;
  cfg["potential"] = PotentialName(config.potential);
  cfg["p"] = r.p;
  cfg["M"] = r.hoelder_constant;
  cfg["dim"] = config.dim;
  cfg["domain"] = v.at("domain");
  cfg["D"] = config.diameter;
  cfg["eta"] = config.eta;
  cfg["theta"] = r.theta;
  cfg["T"] = r.steps;
  cfg["chains"] = config.chains;
  cfg["seed"] = config.seed;
  cfg["bins"] = config.tv.bins;
  cfg["confidence"] = config.tv.confidence;
  Json report;
  report["config"] = cfg;
  report["bound"] = r.bound;
  report["estimate"] = r.tv.estimate;
  report["half_width"] = r.tv.half_width;
  report["margin"] = r.margin;
  report["pass"] = r.pass;

  Result out;
  out.header = {"bound", "estimate", "half_width", "margin", "pass"};
  out.rows.push_back(
      {r.bound, r.tv.estimate, r.tv.half_width, r.margin, r.pass});
  out.report = std::move(report);
  out.prefers_json = true;
  return out;
}

// ---- registry --------------------------------------------------------------

std::vector<FlagSpec> SpecFlags(std::string sigma_default) {
  return {{"D", "", "domain diameter"},
          {"T", "", "horizon"},
          {"sigma", sigma_default, "noise std per step (one value or T values)"},
          {"c", "1", "modulus c per step (one value or T values)"},
          {"h", "0", "modulus offset h per step (one value or T values)"}};
}

std::vector<FlagSpec> PotentialFlags() {
  return {{"potential", "abs", "flat, abs, power, quadratic or dissipative"},
          {"L", "1", "Lipschitz constant (abs)"},
          {"p", "0", "Hoelder exponent (power)"},
          {"M", "2", "Hoelder constant (power)"},
          {"beta", "1", "smoothness (quadratic, dissipative)"},
          {"kappa", "1", "dissipativity (dissipative)"},
          {"lambda", "0.1", "dissipativity offset (dissipative)"},
          {"dim", "1", "dimension, 1 or 2"},
          {"domain", "box", "box or ball"},
          {"D", "1", "domain diameter"},
          {"threads", "0", "worker threads, 0 = all cores"}};
}

std::vector<FlagSpec> Concat(std::vector<FlagSpec> a,
                             const std::vector<FlagSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<CommandSpec> Registry() {
  std::vector<FlagSpec> sweep_flags = {
      {"n", "", "dataset size"},
      {"L", "", "Lipschitz constant"},
      {"M", "", "Hoelder constant"},
      {"D", "", "domain diameter"},
      {"p", "", "comma-separated Hoelder exponents"},
      {"eta-grid", "", "geometric:start,end,count or linear:start,end,count"}};
  return {
      {{"bound"},
       "Renyi divergence bound after T noisy projected steps",
       Concat({{"alpha", "1", "Renyi order >= 1"},
               {"form", "general",
                "general, sqrt-exact, sqrt-log, dissipative-exact, "
                "dissipative-log, or kl-pla (Langevin KL, uses --eta)"},
               {"eta", "0", "stepsize for --form kl-pla"}},
              SpecFlags("1")),
       RunBound},
      {{"shifts"},
       "Optimal interpolation levels and shifts",
       Concat(SpecFlags(""),
              {{"oracle", "false", "also run the numeric oracle (T <= 12)"},
               {"restarts", "8", "oracle restarts"},
               {"seed", "24301", "oracle seed"}}),
       RunShifts},
      {{"mixing", "weakly-smooth"},
       "Mixing time for (p, M)-weakly smooth potentials",
       {{"D", "", "domain diameter"},
        {"eta", "", "stepsize"},
        {"p", "", "Hoelder exponent"},
        {"M", "", "Hoelder constant"},
        {"eps", "0.5", "target TV distance"}},
       RunMixingWeaklySmooth},
      {{"mixing", "dissipative"},
       "Mixing time for strongly dissipative smooth potentials",
       {{"D", "", "domain diameter"},
        {"eta", "", "stepsize"},
        {"lambda", "", "dissipativity offset"},
        {"kappa", "", "dissipativity"},
        {"beta", "", "smoothness"},
        {"eps", "0.5", "target TV distance"},
        {"pipeline", "false",
         "compose KL, Bretagnolle-Huber and boosting instead of the closed "
         "form"}},
       RunMixingDissipative},
      {{"mixing", "theta"},
       "Stepsize threshold Theta",
       {{"p", "", "Hoelder exponent"},
        {"M", "", "Hoelder constant"},
        {"D", "", "domain diameter"}},
       RunTheta},
      {{"privacy", "epsilon"},
       "Renyi-DP level of noisy SGD",
       {{"n", "", "dataset size"},
        {"b", "", "expected batch size"},
        {"L", "", "Lipschitz constant"},
        {"M", "", "Hoelder constant"},
        {"p", "", "Hoelder exponent"},
        {"eta", "", "stepsize"},
        {"sigma", "", "noise multiplier"},
        {"alpha", "", "Renyi order"},
        {"T", "", "iterations"},
        {"D", "", "domain diameter"}},
       RunEpsilon},
      {{"privacy", "sweep"}, "Cap horizon 2 tbar + V over an eta grid",
       sweep_flags, RunSweep},
      {{"sweep"}, "Alias of 'privacy sweep'", sweep_flags, RunSweep},
      {{"privacy", "alpha-star"},
       "Largest valid Renyi order for the subsampled Gaussian estimate",
       {{"q", "", "sampling rate"}, {"sigma", "", "noise multiplier"}},
       RunAlphaStar},
      {{"simulate", "run"},
       "Final iterates of independent projected noisy chains",
       Concat(PotentialFlags(),
              {{"eta", "", "stepsize"},
               {"sigma", "langevin",
                "noise std per step, or 'langevin' for sqrt(2 eta)"},
               {"T", "", "steps"},
               {"chains", "", "number of chains"},
               {"seed", "0", "seed"},
               {"init", "center", "low, high, center or comma list"}}),
       RunSimulate},
      {{"simulate", "validate-mixing"},
       "Empirical TV after ceil(D^2/eta) steps against the bound 1/2",
       Concat(PotentialFlags(),
              {{"eta", "", "stepsize"},
               {"chains", "100000", "chains per initialisation"},
               {"seed", "0", "seed"},
               {"bins", "20", "histogram bins per axis"},
               {"confidence", "0.95", "confidence of the half-width"}}),
       RunValidateMixing},
  };
}

// ---- output ----------------------------------------------------------------

void WriteCsv(const Result& r, std::ostream& out) {
  out << absl::StrJoin(r.header, ",") << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << CellText(row[i]);
    }
    out << '\n';
  }
}

void WriteJson(const Result& r, std::ostream& out) {
  if (r.report) {
    out << r.report->dump(2) << '\n';
    return;
  }
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[r.header[i]] = CellJson(row[i]);
    }
    rows.push_back(std::move(obj));
  }
  out << (rows.size() == 1 ? rows[0] : rows).dump(2) << '\n';
}

void WriteError(std::ostream& err, const std::string& code,
                const std::string& message,
                std::optional<double> required_value) {
  Json j;
  j["code"] = code;
  j["message"] = message;
  j["required_value"] =
      required_value ? Json(*required_value) : Json(nullptr);
  err << j.dump() << '\n';
}

int ReportStatus(const absl::Status& status, std::ostream& err) {
  WriteError(err, ErrorCode(status), std::string(status.message()),
             RequiredValue(status));
  return IsUserError(status) ? kUserError : kInternalError;
}

// Replaces "--config FILE" by the command and flags stored in FILE.
absl::StatusOr<std::vector<std::string>> ExpandConfig(
    const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        return InvalidParameter("usage", "--config needs a file name");
      }
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) {
    return InvalidParameter("config_unreadable",
                            absl::StrFormat("cannot read '%s'", *path));
  }
  Json cfg = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (!cfg.is_object() || !cfg.contains("command") ||
      !cfg["command"].is_string()) {
    return InvalidParameter(
        "config_invalid",
        "config must be a flat JSON object with a string 'command'");
  }
  std::vector<std::string> expanded =
      absl::StrSplit(cfg["command"].get<std::string>(), ' ',
                     absl::SkipEmpty());
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      text = value.dump();
    } else if (value.is_array()) {
      std::vector<std::string> parts;
      for (const auto& item : value) {
        parts.push_back(item.is_string() ? item.get<std::string>()
                                         : item.dump());
      }
      text = absl::StrJoin(parts, ",");
    } else {
      return InvalidParameter(
          "config_invalid",
          absl::StrFormat("config key '%s' must be a scalar or array", key));
    }
    // The --key=value form also works for switches.
    expanded.push_back("--" + key + "=" + text);
  }
  expanded.insert(expanded.end(), rest.begin(), rest.end());
  return expanded;
}

}  // namespace

int Dispatch(const std::vector<std::string>& raw_args, std::ostream& out,
             std::ostream& err) {
  absl::StatusOr<std::vector<std::string>> args = ExpandConfig(raw_args);
  if (!args.ok()) return ReportStatus(args.status(), err);

  CLI::App app{"Privacy amplification by iteration: divergence bounds, "
               "mixing times and noisy-SGD privacy curves"};
  // Only --help: "-h" would collide with the modulus offset flag --h.
  app.set_help_flag("--help", "print help and exit");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "auto";
  std::string output;
  bool echo = false;
  app.add_option("--format", format, "auto, csv or json")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--output", output, "write results to this file");
  app.add_flag("--echo-config", echo,
               "print the resolved configuration as JSON on stderr");

  std::vector<CommandSpec> registry = Registry();
  // Flag storage must outlive parsing; one map per command.
  std::vector<Values> values(registry.size());
  // Switches (flags whose default is "false") are parsed as booleans and
  // copied back into 'values' afterwards.
  std::vector<std::map<std::string, bool>> switches(registry.size());
  std::vector<CLI::App*> leaves(registry.size(), nullptr);
  std::map<std::string, CLI::App*> groups;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const CommandSpec& spec = registry[i];
    CLI::App* parent = &app;
    for (std::size_t k = 0; k + 1 < spec.path.size(); ++k) {
      const std::string key = absl::StrJoin(spec.path.begin(),
                                            spec.path.begin() + k + 1, " ");
      auto it = groups.find(key);
      if (it == groups.end()) {
        CLI::App* group = parent->add_subcommand(spec.path[k], "");
        group->require_subcommand(0, 1);
        group->fallthrough();
        it = groups.emplace(key, group).first;
      }
      parent = it->second;
    }
    const std::string key = absl::StrJoin(spec.path, " ");
    CLI::App* leaf;
    if (auto it = groups.find(key); it != groups.end()) {
      leaf = it->second;  // "bound" is both a command and a group
      leaf->description(spec.help);
    } else {
      leaf = parent->add_subcommand(spec.path.back(), spec.help);
      leaf->fallthrough();
      groups.emplace(key, leaf);
    }
    leaves[i] = leaf;
    for (const FlagSpec& flag : spec.flags) {
      values[i][flag.name] = flag.default_value;
      if (flag.default_value == "false") {
        switches[i][flag.name] = false;
        leaf->add_flag("--" + flag.name, switches[i][flag.name], flag.help);
        continue;
      }
      CLI::Option* opt =
          leaf->add_option("--" + flag.name, values[i][flag.name], flag.help);
      if (flag.default_value.empty()) {
        opt->required();
      } else {
        opt->capture_default_str();
      }
    }
  }
  // Groups with a single required child.
  for (const auto& [key, group] : groups) {
    bool is_leaf = false;
    for (CLI::App* leaf : leaves) is_leaf |= leaf == group;
    if (!is_leaf) group->require_subcommand(1);
  }

  // CLI11 would only say a subcommand is required.
  if (!args->empty() && !absl::StartsWith(args->front(), "--") &&
      std::none_of(registry.begin(), registry.end(), [&](const CommandSpec& c) {
        return c.path.front() == args->front();
      })) {
    WriteError(err, "usage",
               absl::StrFormat("unknown command '%s'", args->front()),
               std::nullopt);
    return kUserError;
  }

  std::vector<std::string> reversed(args->rbegin(), args->rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    WriteError(err, "usage", e.what(), std::nullopt);
    return kUserError;
  }

  // The deepest parsed command wins ("privacy sweep" over "privacy").
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    if (!leaves[i]->parsed()) continue;
    bool child_parsed = false;
    for (const CLI::App* sub : leaves[i]->get_subcommands()) {
      child_parsed |= sub->parsed();
    }
    if (child_parsed) continue;
    if (!chosen || registry[i].path.size() > registry[*chosen].path.size()) {
      chosen = i;
    }
  }
  if (!chosen) {
    WriteError(err, "usage", "no command given", std::nullopt);
    return kUserError;
  }
  const CommandSpec& command = registry[*chosen];
  for (const auto& [name, on] : switches[*chosen]) {
    values[*chosen][name] = on ? "true" : "false";
  }
  const Values& flags = values[*chosen];

  if (echo) {
    Json cfg;
    cfg["command"] = absl::StrJoin(command.path, " ");
    cfg["format"] = format;
    for (const FlagSpec& flag : command.flags) cfg[flag.name] = flags.at(flag.name);
    err << cfg.dump() << '\n';
  }

  absl::StatusOr<Result> result;
  try {
    result = command.handler(flags);
  } catch (const std::exception& e) {
    WriteError(err, "internal", e.what(), std::nullopt);
    return kInternalError;
  }
  if (!result.ok()) return ReportStatus(result.status(), err);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!output.empty()) {
    file.open(output);
    if (!file) {
      WriteError(err, "output_unwritable",
                 absl::StrFormat("cannot write '%s'", output), std::nullopt);
      return kUserError;
    }
    sink = &file;
  }
  const bool as_json =
      format == "json" || (format == "auto" && result->prefers_json);
  if (as_json) {
    WriteJson(*result, *sink);
  } else {
    WriteCsv(*result, *sink);
  }
  return kOk;
}

}  // namespace pabi::cli
