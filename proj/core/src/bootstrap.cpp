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

#include "dpdir/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dpdir/mechanisms.hpp"

namespace dpdir {

namespace {

// Iteration i consumes two private substreams: 0 for noise, 1 for data.
// The non-private benchmark consumes only substream 1, so at enormous
// budgets the two pipelines see identical simulated datasets.
constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kDataStream = 1;

std::vector<double> sorted_column(const Matrix& m, std::size_t j) {
  std::vector<double> col(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) col[i] = m(i, j);
  std::sort(col.begin(), col.end());
  return col;
}

}  // namespace

BootstrapDraws dp_bootstrap(const SufficientStatistic& released, double eps1,
                            double a, std::size_t n, std::size_t B, Rng& rng,
                            const BootstrapOptions& options) {
  if (B < 1) throw std::invalid_argument("dp_bootstrap: B must be >= 1");
  const std::size_t d = released.dimension();
  const double scale = laplace_scale(a, n, d, eps1);

  BootstrapDraws out;
  out.draws = Matrix(B, d);
  out.meta = {a, eps1, n, B, 0, 0, rng.seed(), false};

  std::size_t attempts = 0;
  for (std::size_t b = 0; b < B; ++b) {
    const Rng iter_base = rng.derive(b);
    Rng noise_rng = iter_base.derive(kNoiseStream);
    Rng data_rng = iter_base.derive(kDataStream);
    for (;;) {
      ++attempts;
      if (attempts >= options.gate_check_after &&
          static_cast<double>(b) / static_cast<double>(attempts) <
              options.min_gate_acceptance) {
        double sum_exp = 0.0;
        for (double v : released.values) sum_exp += std::exp(v);
        throw std::runtime_error(
            "dp_bootstrap: feasibility gate acceptance below " +
            std::to_string(options.min_gate_acceptance) +
            " (released statistic too far outside the feasible range, "
            "sum exp = " +
            std::to_string(sum_exp) + ")");
      }
      SufficientStatistic denoised;
      denoised.values.resize(d);
      denoised.threshold = a;
      denoised.basis_count = n;
      for (std::size_t j = 0; j < d; ++j) {
        denoised.values[j] = released.values[j] - laplace_draw(noise_rng, scale);
      }
      if (!in_sufficient_range(denoised.values)) {
        ++out.meta.rejection_count;
        continue;
      }
      DirichletParams fitted;
      try {
        fitted = dirichlet_mle(denoised);
      } catch (const std::exception&) {
        ++out.meta.rejection_count;
        continue;
      }
      const CompositionalDataset simulated =
          dirichlet_sample(fitted, n, data_rng);
      const SufficientStatistic refit_stat =
          options.censored_refit ? sufficient_stat(simulated, a)
                                 : sufficient_stat(simulated, std::nullopt);
      DirichletParams refit;
      try {
        refit = dirichlet_mle(refit_stat);
      } catch (const std::exception&) {
        // Censoring can push the simulated statistic out of range, and
        // near-boundary fits (sum exp ~ 1) may exhaust the iteration cap;
        // either way, restart the iteration from a fresh noise draw.
        ++out.meta.refit_failures;
        continue;
      }
      std::copy(refit.alpha.begin(), refit.alpha.end(), out.draws.row(b).begin());
      break;
    }
  }
  return out;
}

BootstrapDraws parametric_bootstrap(const SufficientStatistic& plain,
                                    std::size_t n, std::size_t B, Rng& rng) {
  if (B < 1) throw std::invalid_argument("parametric_bootstrap: B must be >= 1");
  const std::size_t d = plain.dimension();
  const DirichletParams fitted = dirichlet_mle(plain);

  BootstrapDraws out;
  out.draws = Matrix(B, d);
  out.meta = {0.0, 0.0, n, B, 0, 0, rng.seed(), true};
  for (std::size_t b = 0; b < B; ++b) {
    Rng data_rng = rng.derive(b).derive(kDataStream);
    const CompositionalDataset simulated = dirichlet_sample(fitted, n, data_rng);
    const DirichletParams refit =
        dirichlet_mle(sufficient_stat(simulated, std::nullopt));
    std::copy(refit.alpha.begin(), refit.alpha.end(), out.draws.row(b).begin());
  }
  return out;
}

std::vector<ComponentInterval> percentile_ci(const BootstrapDraws& draws,
                                             double level, CiTarget target) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("percentile_ci: level must lie in (0, 1)");
  }
  const std::size_t B = draws.draws.rows;
  if (B < 100) {
    throw std::invalid_argument("percentile_ci: need at least 100 draws");
  }
  const std::size_t d = draws.draws.cols;
  Matrix values = draws.draws;
  if (target == CiTarget::kMeanComposition) {
    for (std::size_t i = 0; i < B; ++i) {
      auto row = values.row(i);
      double total = 0.0;
      for (double v : row) total += v;
      for (double& v : row) v /= total;
    }
  }
  // ceil with a small backoff so exact-integer cuts (e.g. 0.025 * 1000)
  // are not pushed up by float rounding.
  const std::size_t k = static_cast<std::size_t>(
      std::ceil(static_cast<double>(B) * (1.0 - level) / 2.0 - 1e-9));
  const std::size_t lo_idx = std::max<std::size_t>(k, 1) - 1;
  const std::size_t hi_idx = B - std::max<std::size_t>(k, 1);
  std::vector<ComponentInterval> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    const std::vector<double> col = sorted_column(values, j);
    out[j] = {col[lo_idx], col[hi_idx]};
  }
  return out;
}

std::vector<ComponentInterval> mean_difference_ci(const BootstrapDraws& a,
                                                  const BootstrapDraws& b,
                                                  double level) {
  if (a.draws.cols != b.draws.cols) {
    throw std::invalid_argument("mean_difference_ci: dimension mismatch");
  }
  const std::size_t B = std::min(a.draws.rows, b.draws.rows);
  const std::size_t d = a.draws.cols;
  BootstrapDraws diffs;
  diffs.draws = Matrix(B, d);
  for (std::size_t i = 0; i < B; ++i) {
    double sum_a = 0.0, sum_b = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      sum_a += a.draws(i, j);
      sum_b += b.draws(i, j);
    }
    for (std::size_t j = 0; j < d; ++j) {
      diffs.draws(i, j) = a.draws(i, j) / sum_a - b.draws(i, j) / sum_b;
    }
  }
  return percentile_ci(diffs, level, CiTarget::kAlpha);
}

std::vector<bool> test_mean_difference(const BootstrapDraws& a,
                                       const BootstrapDraws& b, double margin,
                                       double level) {
  const std::vector<ComponentInterval> intervals =
      mean_difference_ci(a, b, level);
  std::vector<bool> reject(intervals.size());
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    reject[j] = (intervals[j].lo > margin) || (intervals[j].hi < -margin);
  }
  return reject;
}

}  // namespace dpdir
