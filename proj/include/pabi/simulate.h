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
#ifndef PABI_SIMULATE_H_
#define PABI_SIMULATE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "pabi/potential.h"

namespace pabi {

enum class DomainShape { kBox, kBall };

// A centred domain of diameter D: the cube with half-side D / (2 sqrt(dim))
// or the ball of radius D / 2.
struct ChainConfig {
  int dim = 1;
  DomainShape domain = DomainShape::kBox;
  double diameter = 1.0;
  double eta = 0.0;
  // Per-step noise standard deviation: sqrt(2 eta) for the Langevin chain,
  // eta * sigma for noisy SGD.
  double sigma = 0.0;
  std::int64_t steps = 0;
  std::int64_t chains = 0;
  std::uint64_t seed = 0;
  // 0 means one thread per hardware core, capped by PABI_THREADS.
  int threads = 0;
};

// Row-major chains x dim matrix of final iterates.
struct SampleMatrix {
  int dim = 1;
  std::int64_t rows = 0;
  std::vector<double> data;

  double at(std::int64_t row, int col) const { return data[row * dim + col]; }
};

absl::Status ValidateChainConfig(const ChainConfig& config);

// Euclidean projection onto the configured domain.
void Project(const ChainConfig& config, std::span<double> x);

// The two endpoints of a diameter of the domain: opposite corners of the
// cube, or antipodal points of the ball.
std::pair<std::vector<double>, std::vector<double>> OppositeCorners(
    const ChainConfig& config);

// Runs config.chains independent copies of
//   X_{t+1} = Proj[X_t - eta grad f(X_t) + sigma xi_t],   X_0 = init,
// and returns X_T. Chain i draws its noise from DeriveStream(seed, i), so the
// output depends only on the inputs, not on thread count or scheduling.
absl::StatusOr<SampleMatrix> RunChains(const Potential& potential,
                                       const ChainConfig& config,
                                       std::span<const double> init);

// Gradient of the loss of data point i at x, written into grad.
using LossGradient =
    std::function<void(std::int64_t i, std::span<const double> x,
                        std::span<double> grad)>;

// l(x, z_i) = L |x - z_i| on 1D data.
LossGradient AbsLoss(std::vector<double> points, double lipschitz);

// Poisson-sampled minibatch of chain stream 'stream' at 'step': each of the
// n indices joins independently with probability q.
std::vector<std::int64_t> SampleBatch(std::uint64_t stream, std::int64_t step,
                                      std::int64_t n, double q);

// Batch stream of a chain; distinct from its noise stream.
std::uint64_t BatchStream(std::uint64_t seed, std::int64_t chain);

// Noisy SGD: X_{t+1} = Proj[X_t - eta (1/b) sum_{i in B_t} grad l(X_t, z_i)
// + sigma xi_t] with Poisson batches of expected size b. An empty batch
// contributes no gradient.
absl::StatusOr<SampleMatrix> RunNoisySgd(const LossGradient& loss,
                                         std::int64_t n, double b,
                                         const ChainConfig& config,
                                         std::span<const double> init);

// One chain of RunNoisySgd with its whole trajectory (steps + 1 rows) and the
// batch drawn at every step.
struct SgdTrace {
  std::vector<std::vector<double>> iterates;
  std::vector<std::vector<std::int64_t>> batches;
};
absl::StatusOr<SgdTrace> TraceNoisySgd(const LossGradient& loss,
                                       std::int64_t n, double b,
                                       const ChainConfig& config,
                                       std::span<const double> init,
                                       std::int64_t chain);

struct TvOptions {
  // Bins per axis.
  int bins = 20;
  // Histogram range per axis; pooled sample range when absent.
  std::optional<std::pair<double, double>> range;
  double confidence = 0.95;
  // Minimum samples per occupied cell for the smaller sample.
  double min_per_cell = 20.0;
};

struct TvEstimate {
  double estimate = 0.0;
  double half_width = 0.0;
  int cells = 0;
  int occupied = 0;
};

// Histogram total variation 1/2 sum |p_i - q_i| on a common grid. The
// half-width is the multinomial L1 deviation bound of Bretagnolle, Huber and
// Carol: with k cells, |p_hat - p|_1 <= sqrt(2 (k ln 2 + ln(1/delta)) / n)
// with probability 1 - delta; each sample gets delta = (1 - confidence) / 2.
absl::StatusOr<TvEstimate> EmpiricalTv(const SampleMatrix& a,
                                       const SampleMatrix& b,
                                       const TvOptions& options = {});

struct MixingValidationConfig {
  Potential potential = AbsLipschitz{1.0};
  int dim = 1;
  DomainShape domain = DomainShape::kBox;
  double diameter = 1.0;
  double eta = 0.0;
  std::int64_t chains = 100000;
  std::uint64_t seed = 0;
  int threads = 0;
  TvOptions tv;
};

struct MixingValidationReport {
  double p = 0.0;
  double hoelder_constant = 0.0;
  double theta = 0.0;
  std::int64_t steps = 0;
  double bound = 0.5;
  TvEstimate tv;
  // bound + half_width - estimate.
  double margin = 0.0;
  bool pass = false;
};

// Runs the chain from both ends of a diameter for ceil(D^2/eta) steps and
// compares the empirical TV with the constant-error bound 1/2. Only the
// weakly smooth family (abs, power, quadratic) is accepted; the stepsize
// must satisfy 1/eta >= Theta and eta <= D^2, otherwise a precondition
// error is returned and nothing is simulated.
absl::StatusOr<MixingValidationReport> ValidateMixingBound(
    const MixingValidationConfig& config);

// CSV with header chain,dim0[,dim1].
void WriteSamplesCsv(const SampleMatrix& samples, std::ostream& out);

// Worker count: hardware concurrency unless 'requested' > 0, then capped by
// the PABI_THREADS environment variable.
int ResolveThreads(int requested);

}  // namespace pabi

#endif  // PABI_SIMULATE_H_
