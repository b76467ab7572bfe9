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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>
#include <tuple>

#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "fmt/format.h"
#include "pabi/kernels.h"
#include "pabi/mixing.h"
#include "pabi/rng.h"
#include "pabi/status.h"

namespace pabi {
namespace {

constexpr std::int64_t kBlock = 4096;

bool Positive(double x) { return std::isfinite(x) && x > 0.0; }

// Same selection rules as the kernels, so both paths round identically.
inline double Clamp(double y, double lo, double hi) {
  const double above = y > lo ? y : lo;
  return above < hi ? above : hi;
}

double HalfSide(const ChainConfig& config) {
  return config.dim == 1 ? config.diameter / 2.0
                         : config.diameter / (2.0 * std::sqrt(config.dim));
}

std::uint64_t NoiseStream(std::uint64_t seed, std::int64_t chain) {
  return DeriveStream(seed, 2 * static_cast<std::uint64_t>(chain));
}

absl::Status CheckInit(const ChainConfig& config,
                       std::span<const double> init) {
  if (static_cast<int>(init.size()) != config.dim) {
    return InvalidParameter(
        "invalid_init", absl::StrFormat("init has %d coordinates, dim is %d",
                                        init.size(), config.dim));
  }
  std::vector<double> projected(init.begin(), init.end());
  Project(config, projected);
  for (int i = 0; i < config.dim; ++i) {
    if (std::abs(projected[i] - init[i]) > 1e-12 * config.diameter) {
      return InvalidParameter("init_outside_domain",
                              "initial point lies outside the domain");
    }
  }
  return absl::OkStatus();
}

// Calls body(first, last) over [0, total) in fixed blocks from a pool of
// workers. Blocks write disjoint output so the result ignores scheduling.
template <class Body>
void ParallelBlocks(std::int64_t total, int threads, Body body) {
  const std::int64_t blocks = (total + kBlock - 1) / kBlock;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(std::max(threads, 1), blocks));
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (std::int64_t blk = next++; blk < blocks; blk = next++) {
      const std::int64_t first = blk * kBlock;
      body(first, std::min(total, first + kBlock));
    }
  };
  if (workers <= 1) {
    work();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

}  // namespace

int ResolveThreads(int requested) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(threads, 1);
  if (const char* cap = std::getenv("PABI_THREADS")) {
    int limit = 0;
    if (absl::SimpleAtoi(cap, &limit) && limit > 0) {
      threads = std::min(threads, limit);
    }
  }
  return threads;
}

absl::Status ValidateChainConfig(const ChainConfig& config) {
  if (config.dim != 1 && config.dim != 2) {
    return InvalidParameter("invalid_dimension", "dim must be 1 or 2");
  }
  if (!Positive(config.diameter)) {
    return InvalidParameter("invalid_diameter", "D must be positive");
  }
  if (!(std::isfinite(config.eta) && config.eta >= 0.0)) {
    return InvalidParameter("invalid_stepsize", "eta must be nonnegative");
  }
  if (!(std::isfinite(config.sigma) && config.sigma >= 0.0)) {
    return InvalidParameter("invalid_sigma", "sigma must be nonnegative");
  }
  if (config.steps < 0) {
    return InvalidParameter("invalid_steps", "steps must be nonnegative");
  }
  if (config.chains < 1) {
    return InvalidParameter("invalid_chains", "need at least one chain");
  }
  return absl::OkStatus();
}

void Project(const ChainConfig& config, std::span<double> x) {
  if (config.domain == DomainShape::kBox || config.dim == 1) {
    const double h = HalfSide(config);
    for (double& v : x) v = Clamp(v, -h, h);
    return;
  }
  const double radius = config.diameter / 2.0;
  double norm_sq = 0.0;
  for (double v : x) norm_sq += v * v;
  const double norm = std::sqrt(norm_sq);
  if (norm > radius) {
    const double scale = radius / norm;
    for (double& v : x) v *= scale;
  }
}

std::pair<std::vector<double>, std::vector<double>> OppositeCorners(
    const ChainConfig& config) {
  std::vector<double> low(config.dim, 0.0), high(config.dim, 0.0);
  if (config.domain == DomainShape::kBox || config.dim == 1) {
    const double h = HalfSide(config);
    std::fill(low.begin(), low.end(), -h);
    std::fill(high.begin(), high.end(), h);
  } else {
    low[0] = -config.diameter / 2.0;
    high[0] = config.diameter / 2.0;
  }
  return {low, high};
}

absl::StatusOr<SampleMatrix> RunChains(const Potential& potential,
                                       const ChainConfig& config,
                                       std::span<const double> init) {
  PABI_RETURN_IF_ERROR(ValidateChainConfig(config));
  PABI_RETURN_IF_ERROR(ValidatePotential(potential, config.dim));
  PABI_RETURN_IF_ERROR(CheckInit(config, init));

  SampleMatrix out;
  out.dim = config.dim;
  out.rows = config.chains;
  out.data.resize(config.chains * config.dim);
  const int dim = config.dim;
  const auto kernel_gradient = KernelGradient(potential);
  const bool vectorised = dim == 1 && kernel_gradient.has_value();
  const kernels::KernelTable& table = kernels::ActiveKernels();

  ParallelBlocks(config.chains, ResolveThreads(config.threads),
                 [&](std::int64_t first, std::int64_t last) {
    const std::int64_t count = last - first;
    if (vectorised) {
      // All chains of the block advance in lockstep through the kernel.
      kernels::StepParams params = *kernel_gradient;
      params.eta = config.eta;
      params.sigma = config.sigma;
      params.lo = -HalfSide(config);
      params.hi = HalfSide(config);
      std::vector<double> x(count, init[0]);
      std::vector<double> z(count, 0.0);
      std::vector<CounterRng> rngs;
      rngs.reserve(count);
      for (std::int64_t c = first; c < last; ++c) {
        rngs.emplace_back(NoiseStream(config.seed, c));
      }
      for (std::int64_t step = 0; step < config.steps; ++step) {
        if (config.sigma > 0.0) {
          for (std::int64_t i = 0; i < count; ++i) {
            z[i] = rngs[i].Normal(static_cast<std::uint64_t>(step));
          }
        }
        table.projected_step(params, x.data(), z.data(), count);
      }
      std::copy(x.begin(), x.end(), out.data.begin() + first);
      return;
    }
    std::vector<double> x(dim), grad(dim);
    for (std::int64_t c = first; c < last; ++c) {
      const CounterRng rng(NoiseStream(config.seed, c));
      std::copy(init.begin(), init.end(), x.begin());
      for (std::int64_t step = 0; step < config.steps; ++step) {
        Gradient(potential, x, grad);
        for (int k = 0; k < dim; ++k) {
          const double z =
              config.sigma > 0.0
                  ? rng.Normal(static_cast<std::uint64_t>(step * dim + k))
                  : 0.0;
          x[k] = (x[k] - config.eta * grad[k]) + config.sigma * z;
        }
        Project(config, x);
      }
      std::copy(x.begin(), x.end(), out.data.begin() + c * dim);
    }
  });
  return out;
}

LossGradient AbsLoss(std::vector<double> points, double lipschitz) {
  return [points = std::move(points), lipschitz](
             std::int64_t i, std::span<const double> x,
             std::span<double> grad) {
    const double d = x[0] - points[i];
    grad[0] = lipschitz *
              (static_cast<double>(d > 0.0) - static_cast<double>(d < 0.0));
  };
}

std::uint64_t BatchStream(std::uint64_t seed, std::int64_t chain) {
  return DeriveStream(seed, 2 * static_cast<std::uint64_t>(chain) + 1);
}

std::vector<std::int64_t> SampleBatch(std::uint64_t stream, std::int64_t step,
                                      std::int64_t n, double q) {
  const CounterRng rng(stream);
  std::vector<std::int64_t> batch;
  const std::uint64_t base =
      static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(n);
  for (std::int64_t i = 0; i < n; ++i) {
    if (rng.Uniform(base + static_cast<std::uint64_t>(i)) < q) {
      batch.push_back(i);
    }
  }
  return batch;
}

namespace {

absl::Status CheckSgd(std::int64_t n, double b, const ChainConfig& config,
                      std::span<const double> init) {
  PABI_RETURN_IF_ERROR(ValidateChainConfig(config));
  if (n < 1) return InvalidParameter("invalid_dataset", "n must be >= 1");
  if (!(Positive(b) && b <= static_cast<double>(n))) {
    return InvalidParameter("invalid_batch",
                            absl::StrFormat("b = %g must lie in (0, n]", b));
  }
  return CheckInit(config, init);
}

// Advances one chain, optionally recording the path.
void SgdChain(const LossGradient& loss, std::int64_t n, double b,
              const ChainConfig& config, std::span<const double> init,
              std::int64_t chain, std::span<double> final_state,
              SgdTrace* trace) {
  const int dim = config.dim;
  const double q = b / static_cast<double>(n);
  const CounterRng noise(NoiseStream(config.seed, chain));
  const std::uint64_t batch_stream = BatchStream(config.seed, chain);
  std::vector<double> x(init.begin(), init.end()), sum(dim), g(dim);
  if (trace != nullptr) trace->iterates.push_back(x);
  for (std::int64_t step = 0; step < config.steps; ++step) {
    std::vector<std::int64_t> batch = SampleBatch(batch_stream, step, n, q);
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::int64_t i : batch) {
      loss(i, x, g);
      for (int k = 0; k < dim; ++k) sum[k] += g[k];
    }
    for (int k = 0; k < dim; ++k) {
      const double z =
          config.sigma > 0.0
              ? noise.Normal(static_cast<std::uint64_t>(step * dim + k))
              : 0.0;
      x[k] = (x[k] - config.eta * (sum[k] / b)) + config.sigma * z;
    }
    Project(config, x);
    if (trace != nullptr) {
      trace->iterates.push_back(x);
      trace->batches.push_back(std::move(batch));
    }
  }
  std::copy(x.begin(), x.end(), final_state.begin());
}

}  // namespace

absl::StatusOr<SampleMatrix> RunNoisySgd(const LossGradient& loss,
                                         std::int64_t n, double b,
                                         const ChainConfig& config,
                                         std::span<const double> init) {
  PABI_RETURN_IF_ERROR(CheckSgd(n, b, config, init));
  SampleMatrix out;
  out.dim = config.dim;
  out.rows = config.chains;
  out.data.resize(config.chains * config.dim);
  ParallelBlocks(config.chains, ResolveThreads(config.threads),
                 [&](std::int64_t first, std::int64_t last) {
                   for (std::int64_t c = first; c < last; ++c) {
                     SgdChain(loss, n, b, config, init, c,
                              std::span<double>(out.data).subspan(
                                  c * config.dim, config.dim),
                              nullptr);
                   }
                 });
  return out;
}

absl::StatusOr<SgdTrace> TraceNoisySgd(const LossGradient& loss,
                                       std::int64_t n, double b,
                                       const ChainConfig& config,
                                       std::span<const double> init,
                                       std::int64_t chain) {
  PABI_RETURN_IF_ERROR(CheckSgd(n, b, config, init));
  SgdTrace trace;
  std::vector<double> last(config.dim);
  SgdChain(loss, n, b, config, init, chain, last, &trace);
  return trace;
}

absl::StatusOr<TvEstimate> EmpiricalTv(const SampleMatrix& a,
                                       const SampleMatrix& b,
                                       const TvOptions& options) {
  if (a.dim != b.dim || a.dim < 1 || a.dim > 2) {
    return InvalidParameter("dimension_mismatch",
                            "samples must share dimension 1 or 2");
  }
  if (a.rows < 1 || b.rows < 1) {
    return InvalidParameter("empty_sample", "both samples must be nonempty");
  }
  if (options.bins < 1) {
    return InvalidParameter("invalid_bins", "bins must be positive");
  }
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) {
    return InvalidParameter("invalid_confidence",
                            "confidence must lie in (0, 1)");
  }
  const int dim = a.dim;
  const int bins = options.bins;
  const int cells = dim == 1 ? bins : bins * bins;
  const kernels::KernelTable& table = kernels::ActiveKernels();

  std::vector<double> lo(dim), inv(dim);
  for (int k = 0; k < dim; ++k) {
    double low, high;
    if (options.range) {
      std::tie(low, high) = *options.range;
      if (!(high > low)) {
        return InvalidParameter("invalid_range", "range must satisfy lo < hi");
      }
    } else {
      low = high = a.at(0, k);
      for (const SampleMatrix* s : {&a, &b}) {
        for (std::int64_t r = 0; r < s->rows; ++r) {
          low = std::min(low, s->at(r, k));
          high = std::max(high, s->at(r, k));
        }
      }
    }
    lo[k] = low;
    inv[k] = high > low ? bins / (high - low) : 0.0;
  }

  auto histogram = [&](const SampleMatrix& s) {
    std::vector<double> column(s.rows);
    std::vector<std::int32_t> index(s.rows), cell(s.rows, 0);
    for (int k = 0; k < dim; ++k) {
      for (std::int64_t r = 0; r < s.rows; ++r) column[r] = s.at(r, k);
      table.bin_indices(column.data(), s.rows, lo[k], inv[k], bins,
                        index.data());
      for (std::int64_t r = 0; r < s.rows; ++r) {
        cell[r] = cell[r] * bins + index[r];
      }
    }
    std::vector<double> counts(cells, 0.0);
    for (std::int32_t c : cell) counts[c] += 1.0;
    return counts;
  };
  std::vector<double> pa = histogram(a);
  std::vector<double> pb = histogram(b);

  TvEstimate out;
  out.cells = cells;
  for (int c = 0; c < cells; ++c) {
    if (pa[c] + pb[c] > 0.0) ++out.occupied;
  }
  const double smaller = static_cast<double>(std::min(a.rows, b.rows));
  if (smaller / out.occupied < options.min_per_cell) {
    return InvalidParameter(
        "insufficient_samples",
        absl::StrFormat("%d samples over %d occupied cells is below %g per "
                        "cell; use fewer bins or more chains",
                        static_cast<std::int64_t>(smaller), out.occupied,
                        options.min_per_cell));
  }
  for (double& v : pa) v /= static_cast<double>(a.rows);
  for (double& v : pb) v /= static_cast<double>(b.rows);
  out.estimate = 0.5 * table.l1_distance(pa.data(), pb.data(), cells);

  const double delta = (1.0 - options.confidence) / 2.0;
  auto deviation = [&](std::int64_t rows) {
    return std::sqrt(2.0 * (cells * std::numbers::ln2 + std::log(1.0 / delta)) /
                     static_cast<double>(rows));
  };
  out.half_width = 0.5 * (deviation(a.rows) + deviation(b.rows));
  return out;
}

absl::StatusOr<MixingValidationReport> ValidateMixingBound(
    const MixingValidationConfig& config) {
  MixingValidationReport report;
  if (const auto* f = std::get_if<AbsLipschitz>(&config.potential)) {
    report.p = 0.0;
    report.hoelder_constant = 2.0 * f->lipschitz;
  } else if (const auto* f = std::get_if<PowerWeaklySmooth>(&config.potential)) {
    report.p = f->p;
    report.hoelder_constant = f->hoelder_constant;
  } else if (const auto* f = std::get_if<QuadraticSmooth>(&config.potential)) {
    report.p = 1.0;
    report.hoelder_constant = f->beta;
  } else {
    return InvalidParameter(
        "unsupported_potential",
        absl::StrFormat("mixing validation needs a weakly smooth potential "
                        "(abs, power, quadratic), got %s",
                        PotentialName(config.potential)));
  }
  PABI_RETURN_IF_ERROR(ValidatePotential(config.potential, config.dim));
  PABI_ASSIGN_OR_RETURN(
      MixingResult mixing,
      MixingTimeWeaklySmooth(config.diameter, config.eta, report.p,
                             report.hoelder_constant, 0.5));
  report.theta = mixing.regime_parameter;
  report.steps = mixing.t_star;

  ChainConfig chain;
  chain.dim = config.dim;
  chain.domain = config.domain;
  chain.diameter = config.diameter;
  chain.eta = config.eta;
  chain.sigma = std::sqrt(2.0 * config.eta);
  chain.steps = report.steps;
  chain.chains = config.chains;
  chain.threads = config.threads;
  auto [low, high] = OppositeCorners(chain);

  chain.seed = config.seed;
  PABI_ASSIGN_OR_RETURN(SampleMatrix from_low,
                        RunChains(config.potential, chain, low));
  chain.seed = DeriveStream(config.seed, 1);
  PABI_ASSIGN_OR_RETURN(SampleMatrix from_high,
                        RunChains(config.potential, chain, high));

  TvOptions tv = config.tv;
  if (!tv.range) {
    const double extent = config.domain == DomainShape::kBox || config.dim == 1
                              ? HalfSide(chain)
                              : config.diameter / 2.0;
    tv.range = std::make_pair(-extent, extent);
  }
  PABI_ASSIGN_OR_RETURN(report.tv, EmpiricalTv(from_low, from_high, tv));
  report.margin = report.bound + report.tv.half_width - report.tv.estimate;
  report.pass = report.margin >= 0.0;
  return report;
}

void WriteSamplesCsv(const SampleMatrix& samples, std::ostream& out) {
  out << "chain";
  for (int k = 0; k < samples.dim; ++k) out << ",dim" << k;
  out << '\n';
  for (std::int64_t r = 0; r < samples.rows; ++r) {
    out << r;
    for (int k = 0; k < samples.dim; ++k) {
      out << fmt::format(",{:.17g}", samples.at(r, k));
    }
    out << '\n';
  }
}

}  // namespace pabi
