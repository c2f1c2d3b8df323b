// Copyright 2026 The dpdirichlet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPDIR_SAMPLERS_HPP_
#define DPDIR_SAMPLERS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dpdir/dirichlet.hpp"
#include "dpdir/matrix.hpp"
#include "dpdir/priors.hpp"
#include "dpdir/rng.hpp"

namespace dpdir {

struct SamplerSettings {
  std::size_t chains = 5;
  std::size_t iterations = 50000;
  std::size_t burn_in = 25000;
  std::size_t total_draws = 1000;  // retained across all chains
  std::size_t pseudo_records = 5;  // b, rescaled-likelihood chain
  unsigned threads = std::thread::hardware_concurrency();

  void validate() const;  // throws std::invalid_argument
};

struct SampleDiagnostics {
  std::vector<double> split_rhat;  // empty when not computable
  double rhat_max = 0.0;
  double record_accept_rate = 0.0;   // data-augmentation record updates
  double stat_refresh_drift = 0.0;   // max bookkeeping drift at refreshes
  std::optional<double> abc_delta;
  std::optional<double> abc_realized_rate;
  std::uint64_t seed = 0;
  std::size_t retained_per_chain = 0;
};

struct PosteriorSample {
  Matrix draws;  // T x d, grouped by chain in chain order
  std::vector<int> chain_ids;
  std::string method;
  SampleDiagnostics diagnostics;
};

// Data-augmentation chain over (alpha, latent dataset): one-record-at-a-time
// Metropolis-Hastings with the model proposal (the acceptance then reduces
// to the noise-density ratio on the censored statistic), and componentwise
// slice updates for alpha. Requires a prior with an analytic density.
PosteriorSample dpmcmc(const SufficientStatistic& released, double a,
                       double eps1, std::size_t n, const Prior& prior,
                       const SamplerSettings& settings, Rng& rng);

// Rescaled-likelihood variant: b pseudo-records stand in for the partition,
// each tempered to the power n2 / b.
PosteriorSample dpremcmc(const SufficientStatistic& released_partition2,
                         double a, double eps1, std::size_t n2, std::size_t b,
                         const Prior& prior, const SamplerSettings& settings,
                         Rng& rng);

// Rejection ABC: simulate (alpha, dataset, noise) triples from the prior,
// keep the draws whose simulated release lands nearest the observed one.
// The tolerance is set to the accept_rate quantile of the distances.
PosteriorSample dpabc(const SufficientStatistic& released_partition2, double a,
                      double eps1, std::size_t n2, const Prior& prior_sampler,
                      std::size_t total_simulations, double accept_rate,
                      Rng& rng);

// Gibbs sampler on the asymptotic-normal model of the statistic, with the
// noise written as a normal scale mixture so the statistic's conditional
// stays multivariate normal.
PosteriorSample dpapprox(const SufficientStatistic& released, double a,
                         double eps1, std::size_t n, const Prior& prior,
                         const SamplerSettings& settings, Rng& rng);

// Non-private benchmark targeting the posterior given the exact statistic.
PosteriorSample mcmc_benchmark(const SufficientStatistic& plain_stat,
                               std::size_t n, const Prior& prior,
                               const SamplerSettings& settings, Rng& rng);

// Asymptotic moments of the plain statistic under the model: mean
// digamma(alpha_j) - digamma(sum), covariance of one record's log vector
// (divide by n for the covariance of the average).
std::vector<double> stat_asymptotic_mean(const DirichletParams& params);
std::vector<double> stat_asymptotic_cov(const DirichletParams& params);

// Draws per retained parameter from the fitted model.
Matrix posterior_predictive(const PosteriorSample& sample,
                            std::size_t draws_per_alpha, Rng& rng);

// Prior represented by a pool of data-augmentation draws on the first
// partition. Enforces split-Rhat <= 1.1 on the pool chains (one retry with
// doubled iterations before giving up).
Prior make_p5(const SufficientStatistic& released_partition1, double eps1,
              double a, std::size_t n1, const Prior& inner_prior,
              const SamplerSettings& settings, Rng& rng);

// Test hook: applies `sweeps` kernel sweeps of the data-augmentation chain
// to the given state (latent data initialized from `data0`) and returns the
// updated alpha. Lets invariance checks run the kernel from a forward draw.
std::vector<double> dpmcmc_kernel_sweeps(const SufficientStatistic& released,
                                         double a, double eps1,
                                         const CompositionalDataset& data0,
                                         std::span<const double> alpha0,
                                         const Prior& prior,
                                         std::size_t sweeps, Rng& rng);

}  // namespace dpdir

#endif  // DPDIR_SAMPLERS_HPP_
