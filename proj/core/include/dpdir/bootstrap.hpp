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

#ifndef DPDIR_BOOTSTRAP_HPP_
#define DPDIR_BOOTSTRAP_HPP_

#include <cstdint>
#include <vector>

#include "dpdir/dirichlet.hpp"
#include "dpdir/matrix.hpp"
#include "dpdir/rng.hpp"

namespace dpdir {

struct BootstrapOptions {
  // Step v refit: censor the simulated data at the released threshold
  // before refitting (on), or refit on the plain statistic (off). The
  // censored refit composes the censoring bias twice, which pushes the
  // percentile interval off the truth whenever the selected threshold
  // censors a visible share of entries; the plain refit keeps the interval
  // centered, so it is the default.
  bool censored_refit = false;
  // Abort threshold for the feasibility gate.
  double min_gate_acceptance = 1e-4;
  std::size_t gate_check_after = 1000000;
};

struct BootstrapDraws {
  Matrix draws;  // B x d
  struct Meta {
    double a = 0.0;
    double eps1 = 0.0;
    std::size_t n = 0;
    std::size_t B = 0;
    std::size_t rejection_count = 0;  // feasibility-gate redraws
    std::size_t refit_failures = 0;   // step-v statistics outside the range
    std::uint64_t seed = 0;
    bool non_private = false;
  } meta;
};

// Parametric bootstrap against the released statistic: per iteration, strip
// a fresh noise draw (redrawing until the implied statistic is feasible,
// which realizes the truncated-noise convolution), refit, simulate a
// dataset of size n, and refit on its censored statistic.
BootstrapDraws dp_bootstrap(const SufficientStatistic& released, double eps1,
                            double a, std::size_t n, std::size_t B, Rng& rng,
                            const BootstrapOptions& options = {});

// Non-private benchmark: the same pipeline with the noise forced to zero
// and no feasibility gate, run on the plain statistic.
BootstrapDraws parametric_bootstrap(const SufficientStatistic& plain,
                                    std::size_t n, std::size_t B, Rng& rng);

struct ComponentInterval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class CiTarget { kAlpha, kMeanComposition };

// Componentwise percentile interval at symmetric order statistics
// k and B-k+1 with k = ceil(B (1-level)/2).
std::vector<ComponentInterval> percentile_ci(const BootstrapDraws& draws,
                                             double level, CiTarget target);

// Interval for the difference of mean compositions over paired draws.
std::vector<ComponentInterval> mean_difference_ci(const BootstrapDraws& a,
                                                  const BootstrapDraws& b,
                                                  double level);

// Reject H0_j: |difference_j| <= margin when the level interval for the
// difference lies entirely outside [-margin, margin].
std::vector<bool> test_mean_difference(const BootstrapDraws& a,
                                       const BootstrapDraws& b,
                                       double margin = 0.01,
                                       double level = 0.95);

}  // namespace dpdir

#endif  // DPDIR_BOOTSTRAP_HPP_
