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
#include "pabi/simulate.h"

#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "pabi/rng.h"
#include "pabi/status.h"

namespace pabi {
namespace {

ChainConfig Config1d(double eta, std::int64_t steps, std::int64_t chains) {
  ChainConfig c;
  c.dim = 1;
  c.diameter = 1.0;
  c.eta = eta;
  c.sigma = std::sqrt(2.0 * eta);
  c.steps = steps;
  c.chains = chains;
  c.seed = 11;
  return c;
}

TvOptions Bins(int bins) {
  TvOptions opt;
  opt.bins = bins;
  return opt;
}

SampleMatrix FromVector(std::vector<double> v) {
  SampleMatrix m;
  m.dim = 1;
  m.rows = static_cast<std::int64_t>(v.size());
  m.data = std::move(v);
  return m;
}

TEST(CounterRng, UniformOpenAndNormalMoments) {
  const CounterRng rng(DeriveStream(3, 0));
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = rng.Uniform(k);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = rng.Normal(k);
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5.0 / std::sqrt(double(n)));
  EXPECT_NEAR(sum_sq / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NE(DeriveStream(3, 0), DeriveStream(3, 1));
  EXPECT_NE(DeriveStream(3, 0), DeriveStream(4, 0));
}

TEST(RunChains, FlatNoiselessIsIdentity) {
  ChainConfig c = Config1d(0.1, 5, 10);
  c.sigma = 0.0;
  for (double x0 : {-0.5, -0.1, 0.0, 0.3, 0.5}) {
    auto out = *RunChains(Flat{}, c, std::vector<double>{x0});
    for (double x : out.data) EXPECT_EQ(x, x0);
  }
  ChainConfig c2 = c;
  c2.dim = 2;
  c2.domain = DomainShape::kBall;
  auto out = *RunChains(Flat{}, c2, std::vector<double>{0.3, -0.2});
  EXPECT_EQ(out.at(7, 0), 0.3);
  EXPECT_EQ(out.at(7, 1), -0.2);
}

TEST(RunChains, RejectsInitOutsideDomain) {
  auto out = RunChains(AbsLipschitz{1.0}, Config1d(0.01, 1, 10),
                       std::vector<double>{0.7});
  ASSERT_FALSE(out.ok());
  EXPECT_EQ(ErrorCode(out.status()), "init_outside_domain");
  ChainConfig ball = Config1d(0.01, 1, 10);
  ball.dim = 2;
  ball.domain = DomainShape::kBall;
  EXPECT_FALSE(RunChains(Flat{}, ball, std::vector<double>{0.4, 0.4}).ok());
  EXPECT_FALSE(RunChains(Flat{}, ball, std::vector<double>{0.4}).ok());
}

TEST(RunChains, SymmetricInitGivesZeroMean) {
  ChainConfig c = Config1d(0.001, 200, 20000);
  auto out = *RunChains(AbsLipschitz{1.0}, c, std::vector<double>{0.0});
  const double mean = std::accumulate(out.data.begin(), out.data.end(), 0.0) / c.chains;
  double var = 0.0;
  for (double x : out.data) var += (x - mean) * (x - mean);
  var /= (c.chains - 1);
  EXPECT_LE(std::abs(mean), 3.0 * std::sqrt(var / c.chains));
}

TEST(RunChains, DeterministicAndThreadInvariant) {
  for (int dim : {1, 2}) {
    for (const Potential& pot :
         {Potential{AbsLipschitz{1.0}}, Potential{PowerWeaklySmooth{0.5, 2.0}},
          Potential{QuadraticSmooth{3.0}}}) {
      ChainConfig c = Config1d(0.02, 30, 5000);
      c.dim = dim;
      c.threads = 1;
      std::vector<double> init(dim, 0.1);
      auto a = *RunChains(pot, c, init);
      auto b = *RunChains(pot, c, init);
      c.threads = 3;
      auto d = *RunChains(pot, c, init);
      ASSERT_EQ(a.data.size(), d.data.size());
      EXPECT_EQ(0, std::memcmp(a.data.data(), b.data.data(), a.data.size() * 8));
      EXPECT_EQ(0, std::memcmp(a.data.data(), d.data.data(), a.data.size() * 8))
          << PotentialName(pot) << " dim " << dim;
      c.seed = 12;
      auto e = *RunChains(pot, c, init);
      EXPECT_NE(a.data, e.data);
    }
  }
}

TEST(RunChains, VectorisedPathMatchesReferenceLoop) {
  // One chain replayed by hand with the same stream layout.
  ChainConfig c = Config1d(0.03, 40, 64);
  auto out = *RunChains(AbsLipschitz{0.7}, c, std::vector<double>{-0.2});
  for (std::int64_t chain : {0, 17, 63}) {
    const CounterRng rng(DeriveStream(c.seed, 2 * chain));
    double x = -0.2;
    for (std::int64_t t = 0; t < c.steps; ++t) {
      const double g = 0.7 * ((x > 0) - (x < 0));
      x = (x - c.eta * g) + c.sigma * rng.Normal(t);
      x = std::min(std::max(x, -0.5), 0.5);
    }
    EXPECT_DOUBLE_EQ(out.data[chain], x) << chain;
  }
}

TEST(RunNoisySgd, FullBatchMatchesLangevinRun) {
  const std::int64_t n = 8;
  ChainConfig c = Config1d(0.02, 50, 300);
  auto loss = AbsLoss(std::vector<double>(n, 0.0), 1.0);
  auto sgd = *RunNoisySgd(loss, n, double(n), c, std::vector<double>{0.25});
  auto full = *RunChains(AbsLipschitz{1.0}, c, std::vector<double>{0.25});
  EXPECT_EQ(sgd.data, full.data);
}

TEST(RunNoisySgd, BatchSizeConcentrates) {
  const std::int64_t n = 100, steps = 100000;
  const double b = 10.0;
  const std::uint64_t stream = BatchStream(5, 0);
  double total = 0.0;
  for (std::int64_t t = 0; t < steps; ++t) {
    total += double(SampleBatch(stream, t, n, b / n).size());
  }
  EXPECT_NEAR(total / steps, b, 0.01 * b);
}

TEST(RunNoisySgd, NeighbouringDatasetsCoupleUntilSampled) {
  const std::int64_t n = 20, j = 13;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> points(n);
  for (double& p : points) p = u(rng);
  auto neighbour = points;
  points[j] = 5.0;
  neighbour[j] = -5.0;
  ChainConfig c = Config1d(0.05, 200, 1);
  c.sigma = 0.05 * 4.0;
  auto a = *TraceNoisySgd(AbsLoss(points, 1.0), n, 2.0, c, std::vector<double>{0.0}, 3);
  auto b = *TraceNoisySgd(AbsLoss(neighbour, 1.0), n, 2.0, c, std::vector<double>{0.0}, 3);
  ASSERT_EQ(a.batches, b.batches);
  std::int64_t first = -1;
  for (std::size_t t = 0; t < a.batches.size(); ++t) {
    if (std::find(a.batches[t].begin(), a.batches[t].end(), j) != a.batches[t].end()) {
      first = static_cast<std::int64_t>(t);
      break;
    }
  }
  ASSERT_GE(first, 0) << "index never sampled";
  for (std::int64_t t = 0; t <= first; ++t) EXPECT_EQ(a.iterates[t], b.iterates[t]);
  EXPECT_NE(a.iterates[first + 1], b.iterates[first + 1]);
}

TEST(RunNoisySgd, RejectsBadBatch) {
  auto loss = AbsLoss({0.0, 0.0}, 1.0);
  EXPECT_FALSE(RunNoisySgd(loss, 2, 3.0, Config1d(0.01, 1, 1), std::vector<double>{0}).ok());
  EXPECT_FALSE(RunNoisySgd(loss, 2, 0.0, Config1d(0.01, 1, 1), std::vector<double>{0}).ok());
}

TEST(EmpiricalTv, IdenticalAndDisjoint) {
  std::vector<double> a(2000), b(2000);
  for (int i = 0; i < 2000; ++i) {
    a[i] = -1.0 + i / 2000.0;
    b[i] = 0.01 + i / 2000.0;
  }
  auto same = *EmpiricalTv(FromVector(a), FromVector(a), Bins(10));
  EXPECT_EQ(same.estimate, 0.0);
  auto apart = *EmpiricalTv(FromVector(a), FromVector(b), Bins(10));
  EXPECT_GE(apart.estimate + apart.half_width, 1.0);
  EXPECT_GT(apart.estimate, 0.9);
}

TEST(EmpiricalTv, GaussianShiftMatchesClosedForm) {
  const std::int64_t n = 100000;
  const CounterRng ra(DeriveStream(1, 0)), rb(DeriveStream(1, 1));
  std::vector<double> a(n), b(n);
  for (std::int64_t i = 0; i < n; ++i) {
    a[i] = ra.Normal(i);
    b[i] = 1.0 + rb.Normal(i);
  }
  // Bin edge at 0.5, where the densities cross.
  TvOptions opt;
  opt.bins = 20;
  opt.range = std::make_pair(-4.5, 5.5);
  auto tv = *EmpiricalTv(FromVector(a), FromVector(b), opt);
  const double exact = std::erf(0.5 / std::sqrt(2.0));
  EXPECT_NEAR(exact, 0.3829, 1e-4);
  EXPECT_LE(std::abs(tv.estimate - exact), tv.half_width);
  EXPECT_NEAR(tv.half_width, 0.01874, 1e-4);
}

TEST(EmpiricalTv, Errors) {
  auto few = EmpiricalTv(FromVector(std::vector<double>(100, 0.0)),
                         FromVector(std::vector<double>(100, 1.0)), Bins(20));
  EXPECT_TRUE(few.ok());
  std::vector<double> spread(100);
  for (int i = 0; i < 100; ++i) spread[i] = i;
  auto thin = EmpiricalTv(FromVector(spread), FromVector(spread), Bins(20));
  ASSERT_FALSE(thin.ok());
  EXPECT_EQ(ErrorCode(thin.status()), "insufficient_samples");
  SampleMatrix two;
  two.dim = 2;
  two.rows = 1;
  two.data = {0.0, 0.0};
  auto mismatch = EmpiricalTv(FromVector({0.0}), two);
  ASSERT_FALSE(mismatch.ok());
  EXPECT_EQ(ErrorCode(mismatch.status()), "dimension_mismatch");
}

TEST(ValidateMixingBound, AbsAndQuadraticPass) {
  MixingValidationConfig c;
  c.eta = 1.0 / 27.0;
  c.seed = 7;
  auto abs = ValidateMixingBound(c);
  ASSERT_TRUE(abs.ok()) << abs.status();
  EXPECT_EQ(abs->steps, 27);
  EXPECT_TRUE(abs->pass);
  EXPECT_LE(abs->tv.half_width, 0.02);

  c.potential = QuadraticSmooth{2.0};
  auto quad = ValidateMixingBound(c);
  ASSERT_TRUE(quad.ok()) << quad.status();
  EXPECT_TRUE(quad->pass);
  EXPECT_GE(quad->margin, abs->margin - 2.0 * abs->tv.half_width);
}

TEST(ValidateMixingBound, BrokenStepsizeIsPreconditionError) {
  MixingValidationConfig c;
  c.eta = 10.0 / 27.0;
  auto r = ValidateMixingBound(c);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(ErrorCode(r.status()), "stepsize_threshold");
  c.potential = Flat{};
  c.eta = 0.01;
  EXPECT_EQ(ErrorCode(ValidateMixingBound(c).status()), "unsupported_potential");
}

TEST(ValidateMixingBound, DominanceGrid) {
  for (const Potential& pot :
       {Potential{AbsLipschitz{1.0}}, Potential{QuadraticSmooth{1.0}}}) {
    for (double eta : {1.0 / 27.0, 1.0 / 40.0, 1.0 / 60.0}) {
      MixingValidationConfig c;
      c.potential = pot;
      c.eta = eta;
      c.chains = 50000;
      c.seed = 100;
      auto r = ValidateMixingBound(c);
      ASSERT_TRUE(r.ok()) << r.status();
      EXPECT_TRUE(r->pass) << PotentialName(pot) << " eta " << eta
                           << " tv " << r->tv.estimate;
    }
  }
}

TEST(RunChains, TvBetweenHorizonsShrinks) {
  ChainConfig c = Config1d(1.0 / 27.0, 0, 50000);
  TvOptions opt;
  opt.range = std::make_pair(-0.5, 0.5);
  std::vector<double> tv;
  for (std::int64_t steps : {1, 2, 4, 8, 16}) {
    c.steps = steps;
    c.seed = 200 + steps;
    auto early = *RunChains(AbsLipschitz{1.0}, c, std::vector<double>{-0.5});
    c.steps = 2 * steps;
    c.seed = 300 + steps;
    auto late = *RunChains(AbsLipschitz{1.0}, c, std::vector<double>{-0.5});
    auto est = *EmpiricalTv(early, late, opt);
    tv.push_back(est.estimate);
    if (tv.size() > 1) {
      EXPECT_LT(tv.back(), tv[tv.size() - 2] + est.half_width) << steps;
    }
  }
  EXPECT_LT(tv.back(), 0.5 * tv.front());
}

TEST(Potential, PowerGradientIsHoelder) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double p : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    for (int dim : {1, 2}) {
      const Potential pot = PowerWeaklySmooth{p, 3.0};
      double worst = 0.0;
      for (int i = 0; i < 5000; ++i) {
        std::vector<double> x(dim), y(dim), gx(dim), gy(dim);
        for (int k = 0; k < dim; ++k) {
          x[k] = u(rng);
          y[k] = i % 2 == 0 ? -x[k] : u(rng);
        }
        Gradient(pot, x, gx);
        Gradient(pot, y, gy);
        double dg = 0.0, dx = 0.0;
        for (int k = 0; k < dim; ++k) {
          dg += (gx[k] - gy[k]) * (gx[k] - gy[k]);
          dx += (x[k] - y[k]) * (x[k] - y[k]);
        }
        if (dx == 0.0) continue;
        worst = std::max(worst, std::sqrt(dg) / std::pow(std::sqrt(dx), p));
      }
      EXPECT_LE(worst, 3.0 * (1.0 + 1e-12)) << "p " << p << " dim " << dim;
      EXPECT_GE(worst, 3.0 * 0.7) << "p " << p << " dim " << dim;
    }
  }
}

TEST(Potential, DissipativeInequalityHolds) {
  std::mt19937_64 rng(62);
  const DissipativeQuadratic f{0.5, 3.0, 0.8};
  ASSERT_TRUE(ValidatePotential(f, 2).ok());
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int dim : {1, 2}) {
    for (int i = 0; i < 20000; ++i) {
      std::vector<double> x(dim), y(dim), gx(dim), gy(dim);
      for (int k = 0; k < dim; ++k) {
        x[k] = u(rng);
        y[k] = x[k] + (i % 3 == 0 ? u(rng) * 0.3 : u(rng));
      }
      Gradient(f, x, gx);
      Gradient(f, y, gy);
      double inner = 0.0, dist_sq = 0.0;
      for (int k = 0; k < dim; ++k) {
        inner += (gx[k] - gy[k]) * (x[k] - y[k]);
        dist_sq += (x[k] - y[k]) * (x[k] - y[k]);
      }
      ASSERT_GE(inner, -f.lambda + f.kappa * dist_sq - 1e-12);
    }
  }
  EXPECT_FALSE(ValidatePotential(DissipativeQuadratic{1.0, 1.0, 0.5}, 1).ok());
}

TEST(Potential, GradientsAreDeterministic) {
  const Potential pots[] = {Flat{}, AbsLipschitz{2.0}, PowerWeaklySmooth{0.3, 1.5},
                            QuadraticSmooth{4.0}, DissipativeQuadratic{0.5, 3.0, 0.8}};
  auto digest = [&] {
    std::uint64_t h = 0;
    for (const Potential& pot : pots) {
      for (int i = -50; i <= 50; ++i) {
        std::vector<double> x{i / 100.0, -i / 70.0}, g(2);
        Gradient(pot, x, g);
        for (double v : g) {
          std::uint64_t bits;
          std::memcpy(&bits, &v, 8);
          h = SplitMix64(h ^ bits);
        }
      }
    }
    return h;
  };
  EXPECT_EQ(digest(), digest());
  std::vector<double> zero{0.0}, g(1);
  Gradient(AbsLipschitz{2.0}, zero, g);
  EXPECT_EQ(g[0], 0.0);
}

TEST(WriteSamplesCsv, Format) {
  SampleMatrix m;
  m.dim = 2;
  m.rows = 2;
  m.data = {0.1, -0.25, 0.5, 0.0};
  std::ostringstream out;
  WriteSamplesCsv(m, out);
  EXPECT_EQ(out.str(), "chain,dim0,dim1\n0,0.10000000000000001,-0.25\n1,0.5,0\n");
}

}  // namespace
}  // namespace pabi
