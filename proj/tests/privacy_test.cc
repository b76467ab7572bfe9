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
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "pabi/status.h"
#include "test_util.h"

namespace pabi {
namespace {

using testing::RelErr;

constexpr double kE = 2.718281828459045;

// Both subsampled Gaussian conditions, typed out again with plain log().
bool ConditionsByHand(double q, double sigma, double alpha) {
  const double s2 = sigma * sigma;
  const double m = std::log(1.0 + 1.0 / (q * (alpha - 1.0)));
  const bool first = alpha <= m * s2 / 2.0 - std::log(s2);
  const double den = m + std::log(q * alpha) + 1.0 / (2.0 * s2);
  const bool second = den > 0.0 && alpha <= (m * m * s2 / 2.0 - std::log(5.0 * s2)) / den;
  return first && second;
}

TEST(Tbar, Examples) {
  EXPECT_EQ(*Tbar(1.0, 1000, 0.01, 1.0), 25000);
  EXPECT_EQ(*Tbar(1.0, 4, 1.0, 1.0), 1);
  EXPECT_EQ(*Tbar(1.0, 1000, 0.001, 1.0), 250000);
  EXPECT_EQ(*Tbar(1.0, 10, 1.0, 1.0), 3);
  EXPECT_FALSE(Tbar(0.0, 10, 1.0, 1.0).ok());
  EXPECT_FALSE(Tbar(1.0, 0, 1.0, 1.0).ok());
}

TEST(AlphaStar, Examples) {
  auto a = AlphaStar(0.001, 4.0);
  ASSERT_TRUE(a.ok()) << a.status();
  EXPECT_GT(*a, 2.0);
  EXPECT_TRUE(ConditionsByHand(0.001, 4.0, *a));
  EXPECT_TRUE(ConditionsByHand(0.001, 4.0, 2.0));
}

TEST(AlphaStar, Errors) {
  auto small = AlphaStar(0.01, 3.9);
  ASSERT_FALSE(small.ok());
  EXPECT_EQ(ErrorCode(small.status()), "noise_too_small");
  EXPECT_FALSE(AlphaStar(0.2, 10.0).ok());
  EXPECT_FALSE(AlphaStar(0.0, 10.0).ok());
}

// Everything on a fine grid below alpha* satisfies the conditions, and a
// point a little above does not.
TEST(AlphaStarProperty, PrefixValidAndTight) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> lq(std::log(1e-5), std::log(0.19)),
      ls(std::log(4.0), std::log(200.0));
  for (int i = 0; i < 100; ++i) {
    const double q = std::exp(lq(rng)), sigma = std::exp(ls(rng));
    auto a = AlphaStar(q, sigma);
    if (!a.ok()) {
      EXPECT_FALSE(ConditionsByHand(q, sigma, 1.0 + 1e-6)) << q << " " << sigma;
      continue;
    }
    for (int k = 1; k <= 500; ++k) {
      const double alpha = 1.0 + (*a - 1.0) * std::pow(k / 500.0, 3.0);
      ASSERT_TRUE(ConditionsByHand(q, sigma, alpha))
          << "q " << q << " sigma " << sigma << " alpha " << alpha;
    }
    EXPECT_FALSE(ConditionsByHand(q, sigma, *a + 2e-6 * std::max(1.0, *a) + 1e-9))
        << "q " << q << " sigma " << sigma;
  }
}

TEST(SAlphaBound, Examples) {
  EXPECT_DOUBLE_EQ(*SAlphaBound(0.01, 4.0, 2.0), 2.5e-5);
  EXPECT_DOUBLE_EQ(*SAlphaBound(0.01, 4.0, 4.0), 2.0 * *SAlphaBound(0.01, 4.0, 2.0));
  const double star = *AlphaStar(0.01, 4.0);
  auto over = SAlphaBound(0.01, 4.0, star * 1.01);
  ASSERT_FALSE(over.ok());
  EXPECT_EQ(ErrorCode(over.status()), "alpha_out_of_range");
  EXPECT_DOUBLE_EQ(*RequiredValue(over.status()), star);
  EXPECT_FALSE(SAlphaBound(0.01, 4.0, 1.0).ok());
}

TEST(VTerm, Examples) {
  EXPECT_EQ(*VTerm(1.0, 2.0, 10, 0.1, 1.0), 0.0);
  EXPECT_NEAR(*VTerm(1.0, 2.0, 10, 0.1, 0.0), 4.0 * (1.0 + std::log(10.0)), 1e-12);
  EXPECT_NEAR(*VTerm(1.0, 2.0, 10, 0.1, 0.0), 13.21, 5e-3);
  EXPECT_LT(*VTerm(1.0, 2.0, 10, 0.1, 1.0 - 1e-3), 1e-100);
  EXPECT_FALSE(VTerm(1.0, 2.0, 10, 0.1, 1.5).ok());
  EXPECT_FALSE(VTerm(1.0, 2.0, 0, 0.1, 0.5).ok());
}

TEST(VTerm, QuadraticGrowthInN) {
  const double eta = 0.01;
  double ratio = 0.0;
  for (std::int64_t n : {1000LL, 100000LL, 10000000LL}) {
    const double v1 = *VTerm(1.0, 2.0, *Tbar(1.0, n, eta, 1.0), eta, 0.0);
    const double v2 = *VTerm(1.0, 2.0, *Tbar(1.0, 2 * n, eta, 1.0), eta, 0.0);
    ratio = v2 / v1;
  }
  EXPECT_NEAR(ratio, 4.0, 0.2);
  EXPECT_GT(ratio, 4.0);
}

PrivacySpec BaseSpec() {
  PrivacySpec s;
  s.n = 1000;
  s.b = 50;
  s.lipschitz = 1.0;
  s.hoelder_constant = 2.0;
  s.p = 0.5;
  s.eta = 0.01;
  s.sigma = 1.0;
  s.alpha = 2.0;
  s.diameter = 1.0;
  s.horizon = 1000000;
  return s;
}

TEST(EpsilonNsgd, CappedAndGrowingRegimes) {
  PrivacySpec s = BaseSpec();
  auto capped = EpsilonNsgd(s);
  ASSERT_TRUE(capped.ok()) << capped.status();
  EXPECT_EQ(capped->tbar, 25000);
  EXPECT_EQ(capped->regime, PrivacyRegime::kCapped);
  const double per_step = 16.0 * s.alpha / (1e6 * s.sigma * s.sigma);
  EXPECT_LE(RelErr(capped->epsilon, per_step * capped->cap_horizon), 1e-14);
  EXPECT_EQ(RegimeName(capped->regime), "capped");

  s.horizon = 30000;
  auto growing = *EpsilonNsgd(s);
  EXPECT_EQ(growing.regime, PrivacyRegime::kGrowing);
  EXPECT_LE(RelErr(growing.epsilon, per_step * 30000.0), 1e-14);
}

TEST(EpsilonNsgd, SmoothLimitCapIsTwoTbar) {
  PrivacySpec s = BaseSpec();
  s.p = 1.0;
  auto r = *EpsilonNsgd(s);
  EXPECT_EQ(r.v_term, 0.0);
  EXPECT_EQ(r.cap_horizon, 2.0 * r.tbar);
  s.p = 1.0 - 1e-9;
  auto near = *EpsilonNsgd(s);
  EXPECT_LE(RelErr(near.epsilon, r.epsilon), 1e-12);
}

TEST(EpsilonNsgd, ThreeTermFormByHand) {
  PrivacySpec s = BaseSpec();
  auto r = *EpsilonNsgd(s);
  const double tb = 25000.0;
  const double offset = 4.0 * std::pow(0.01, 2.0) * (0.5 / 1.5) * std::pow(1.0, 4.0) *
                        std::log(tb * kE);
  const double expected = 2.0 * (16.0 * tb / 1e6 + 1.0 / (1e-4 * tb) + offset);
  EXPECT_LE(RelErr(r.epsilon_three_term, expected), 1e-13);
}

TEST(EpsilonNsgd, ThreeTermFormFiniteNearSmooth) {
  // eta^{2p/(1-p)} underflows while (M/2)^{2/(1-p)} overflows.
  PrivacySpec s = BaseSpec();
  s.hoelder_constant = 2.8;
  s.eta = 0.0015;
  s.p = 0.9992;
  auto r = *EpsilonNsgd(s);
  EXPECT_TRUE(std::isfinite(r.epsilon_three_term));
  const double capped_form = 16.0 * s.alpha / (1e6 * s.sigma * s.sigma) *
                        (2.0 * r.tbar + r.v_term);
  EXPECT_LE(r.epsilon_three_term, capped_form);
}

TEST(EpsilonNsgd, PreconditionsNameTheirThreshold) {
  struct Case {
    void (*mutate)(PrivacySpec&);
    const char* code;
  };
  const Case cases[] = {
      {[](PrivacySpec& s) { s.b = 2000; }, "batch_exceeds_dataset"},
      {[](PrivacySpec& s) { s.b = 300; }, "sampling_rate"},
      {[](PrivacySpec& s) { s.sigma = 0.2; }, "noise_too_small"},
      {[](PrivacySpec& s) { s.p = 1.0; s.eta = 1.5; }, "stepsize_not_nonexpansive"},
      {[](PrivacySpec& s) { s.horizon = 25000; }, "horizon_below_tbar"},
      {[](PrivacySpec& s) { s.alpha = 1e6; }, "alpha_out_of_range"},
      {[](PrivacySpec& s) { s.alpha = 1.0; }, "alpha_out_of_range"},
  };
  for (const Case& c : cases) {
    PrivacySpec s = BaseSpec();
    c.mutate(s);
    auto r = EpsilonNsgd(s);
    ASSERT_FALSE(r.ok()) << c.code;
    EXPECT_EQ(ErrorCode(r.status()), c.code);
    EXPECT_TRUE(RequiredValue(r.status()).has_value()) << c.code;
  }
  PrivacySpec s = BaseSpec();
  s.horizon = 25000;
  EXPECT_EQ(*RequiredValue(EpsilonNsgd(s).status()), 25001.0);
  s = BaseSpec();
  s.sigma = 0.2;
  EXPECT_DOUBLE_EQ(*RequiredValue(EpsilonNsgd(s).status()),
                   8.0 * std::sqrt(2.0) / 50.0);
}

absl::StatusOr<PrivacySpec> RandomValidSpec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PrivacySpec s;
  s.n = static_cast<std::int64_t>(std::exp(std::log(1e3) + u(rng) * std::log(1e3)));
  const double q = 0.001 + 0.18 * u(rng);
  s.b = std::max(1.0, std::floor(q * s.n));
  s.lipschitz = 0.5 + 1.5 * u(rng);
  s.hoelder_constant = 0.5 + 3.5 * u(rng);
  s.p = u(rng) < 0.1 ? 1.0 : u(rng);
  const double lo = 1.0 / s.n, hi = std::pow(double(s.n), -0.2);
  s.eta = std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
  if (s.p == 1.0) s.eta = std::min(s.eta, 2.0 / s.hoelder_constant);
  s.sigma = 8.0 * std::sqrt(2.0) * s.lipschitz / s.b * (1.01 + 20.0 * u(rng));
  s.diameter = 0.5 + 2.5 * u(rng);
  const double sigma_eff = s.b * s.sigma / (2.0 * std::sqrt(2.0) * s.lipschitz);
  auto star = AlphaStar(s.b / s.n, sigma_eff);
  if (!star.ok()) return star.status();
  s.alpha = 1.0 + (*star - 1.0) * (0.01 + 0.99 * u(rng));
  const std::int64_t tbar = *Tbar(s.diameter, s.n, s.eta, s.lipschitz);
  s.horizon = tbar + 1 + static_cast<std::int64_t>(u(rng) * 3.0 * tbar);
  return s;
}

TEST(EpsilonNsgdProperty, ThreeTermBelowCappedForm) {
  std::mt19937_64 rng(52);
  int checked = 0;
  while (checked < 500) {
    auto s = RandomValidSpec(rng);
    if (!s.ok()) continue;
    auto r = EpsilonNsgd(*s);
    ASSERT_TRUE(r.ok()) << r.status();
    const double n = double(s->n);
    const double capped_form = 16.0 * s->alpha * s->lipschitz * s->lipschitz /
                          (n * n * s->sigma * s->sigma) * (2.0 * r->tbar + r->v_term);
    EXPECT_LE(r->epsilon_three_term, capped_form * (1.0 + 1e-12)) << "spec " << checked;
    EXPECT_GE(r->epsilon, 0.0);
    ++checked;
  }
}

TEST(EpsilonNsgdProperty, CapIsConstantInHorizon) {
  std::mt19937_64 rng(53);
  int checked = 0;
  while (checked < 200) {
    auto s = RandomValidSpec(rng);
    if (!s.ok()) continue;
    const double cap = *Tbar(s->diameter, s->n, s->eta, s->lipschitz) * 2.0 +
                       *VTerm(s->diameter, s->hoelder_constant,
                              *Tbar(s->diameter, s->n, s->eta, s->lipschitz),
                              s->eta, s->p);
    if (!(cap < 1e17)) continue;
    s->horizon = static_cast<std::int64_t>(std::ceil(cap));
    auto at = *EpsilonNsgd(*s);
    s->horizon *= 10;
    auto later = *EpsilonNsgd(*s);
    EXPECT_EQ(at.regime, PrivacyRegime::kCapped);
    EXPECT_EQ(at.epsilon_cap, later.epsilon_cap);
    ++checked;
  }
}

TEST(Grids, EndpointsAndSpacing) {
  auto g = *GeometricGrid(1e-3, std::pow(1e3, -0.2), 100);
  ASSERT_EQ(g.size(), 100u);
  EXPECT_EQ(g.front(), 1e-3);
  EXPECT_EQ(g.back(), std::pow(1e3, -0.2));
  for (std::size_t k = 1; k + 1 < g.size(); ++k) {
    EXPECT_NEAR(g[k] * g[k], g[k - 1] * g[k + 1], 1e-12 * g[k] * g[k]);
  }
  auto l = *LinearGrid(1.0, 2.0, 11);
  EXPECT_DOUBLE_EQ(l[5], 1.5);
  EXPECT_EQ(l.back(), 2.0);
  EXPECT_FALSE(GeometricGrid(0.0, 1.0, 5).ok());
  EXPECT_FALSE(GeometricGrid(1.0, 2.0, 1).ok());
}

TEST(Grids, Parse) {
  EXPECT_EQ(ParseGrid("geometric:0.001,0.1,3")->size(), 3u);
  EXPECT_DOUBLE_EQ((*ParseGrid("linear:0,1,5"))[1], 0.25);
  EXPECT_FALSE(ParseGrid("geometric:1,2").ok());
  EXPECT_FALSE(ParseGrid("cubic:1,2,3").ok());
  EXPECT_FALSE(ParseGrid("0.1,0.2").ok());
}

SweepSpec CapSweepSpec(std::vector<double> ps, std::vector<double> grid) {
  SweepSpec s;
  s.n = 1000;
  s.lipschitz = 1.0;
  s.hoelder_constant = 2.0;
  s.diameter = 1.0;
  s.ps = std::move(ps);
  s.eta_grid = std::move(grid);
  return s;
}

std::vector<double> Series(const std::vector<SweepRow>& rows, double p) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.p == p) out.push_back(r.ln_bound);
  }
  return out;
}

TEST(PrivacyCurveSweep, GeometricGridShape) {
  auto grid = *GeometricGrid(1e-3, std::pow(1e3, -0.2), 100);
  auto rows = *PrivacyCurveSweep(CapSweepSpec({0.2, 0.4, 0.6, 0.8, 1.0}, grid));
  ASSERT_EQ(rows.size(), 500u);
  EXPECT_EQ(rows[0].p, 0.2);
  EXPECT_EQ(rows[4].p, 1.0);
  EXPECT_EQ(rows[5].eta, grid[1]);
  for (const auto& r : rows) {
    EXPECT_GE(r.ln_bound, 7.0);
    EXPECT_LE(r.ln_bound, 15.0);
    EXPECT_EQ(r.bound, 2.0 * r.tbar + r.v);
  }
  auto smooth = Series(rows, 1.0);
  for (std::size_t k = 1; k < smooth.size(); ++k) EXPECT_LE(smooth[k], smooth[k - 1]);
  auto rough = Series(rows, 0.2);
  auto argmin = std::min_element(rough.begin(), rough.end()) - rough.begin();
  EXPECT_GT(argmin, 0);
  EXPECT_LT(argmin, 99);
  auto near_smooth = Series(rows, 0.8);
  double gap = 0.0;
  for (std::size_t k = 0; k < smooth.size(); ++k) {
    gap = std::max(gap, std::abs(near_smooth[k] - smooth[k]));
  }
  EXPECT_LE(gap, 0.05);
}

// Linear grid that leaves out the left endpoint:
// eta_k = 1/n + (k + 1)(n^{-1/5} - 1/n)/100.
std::vector<double> EvenCapGrid() {
  const double lo = 1e-3, hi = std::pow(1000.0, -0.2);
  std::vector<double> grid;
  for (int k = 0; k < 100; ++k) grid.push_back(lo + (k + 1) * (hi - lo) / 100.0);
  return grid;
}

TEST(PrivacyCurveSweep, ReproducesGoldenSeries) {
  const double golden[4][100] = {
#include "data/cap_curve_golden.inc"
  };
  const double ps[4] = {0.2, 0.4, 0.6, 1.0};
  auto rows = *PrivacyCurveSweep(
      CapSweepSpec({ps[0], ps[1], ps[2], ps[3]}, EvenCapGrid()));
  for (int j = 0; j < 4; ++j) {
    auto series = Series(rows, ps[j]);
    ASSERT_EQ(series.size(), 100u);
    for (int k = 0; k < 100; ++k) {
      EXPECT_NEAR(series[k], golden[j][k], 1e-12) << "p " << ps[j] << " k " << k;
    }
  }
  // p = 0.2 bottoms out at the third point.
  auto rough = Series(rows, 0.2);
  EXPECT_EQ(std::min_element(rough.begin(), rough.end()) - rough.begin(), 2);
}

TEST(PrivacyCurveSweep, Errors) {
  EXPECT_FALSE(PrivacyCurveSweep(CapSweepSpec({0.5}, {})).ok());
  EXPECT_FALSE(PrivacyCurveSweep(CapSweepSpec({}, {0.01})).ok());
  auto out = PrivacyCurveSweep(CapSweepSpec({0.5}, {0.5}));
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(ErrorCode(out.status()), "grid_out_of_range");
}

TEST(WriteSweepCsv, Format) {
  auto rows = *PrivacyCurveSweep(CapSweepSpec({1.0}, {0.01}));
  std::ostringstream out;
  WriteSweepCsv(rows, out);
  EXPECT_EQ(out.str(),
            "eta,p,tbar,v,bound,ln_bound\n"
            "0.01,1,25000,0,50000,10.819778284410283\n");
}

TEST(NScaling, LipschitzCapGrowsQuadratically) {
  // p = 0: V / (n^2 ln(tbar e)) settles.
  const double eta = 0.01;
  auto normalized = [&](std::int64_t n) {
    const std::int64_t tbar = *Tbar(1.0, n, eta, 1.0);
    return *VTerm(1.0, 2.0, tbar, eta, 0.0) /
           (double(n) * double(n) * std::log(tbar * kE));
  };
  EXPECT_NEAR(normalized(1000000) / normalized(100000), 1.0, 0.01);
  EXPECT_GT(normalized(100000), 0.0);
}

TEST(NScaling, WeaklySmoothEpsilonDecays) {
  double previous = std::numeric_limits<double>::infinity();
  for (std::int64_t n : {1000LL, 10000LL, 100000LL, 1000000LL}) {
    PrivacySpec s;
    s.n = n;
    s.b = 0.01 * n;
    s.lipschitz = 1.0;
    s.hoelder_constant = 2.0;
    s.p = 0.5;
    s.eta = 1.0 / std::sqrt(double(n));
    s.sigma = 2.0;
    s.alpha = 2.0;
    s.diameter = 1.0;
    s.horizon = 4000000000000LL;
    auto r = EpsilonNsgd(s);
    ASSERT_TRUE(r.ok()) << r.status();
    EXPECT_EQ(r->regime, PrivacyRegime::kCapped);
    EXPECT_LT(r->epsilon_cap, previous) << n;
    previous = r->epsilon_cap;
  }
}

}  // namespace
}  // namespace pabi
