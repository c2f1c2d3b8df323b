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

#include "dpdir/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpdir/bootstrap.hpp"
#include "dpdir/linalg.hpp"

namespace dpdir {

Prior Prior::independent_gamma(std::vector<GammaFit> marginals,
                               std::string label) {
  for (const GammaFit& g : marginals) {
    if (!(g.shape > 0.0 && g.rate > 0.0)) {
      throw std::invalid_argument("Prior: gamma shape/rate must be positive");
    }
  }
  Prior p;
  p.kind_ = Kind::kGammaIndependent;
  p.label_ = std::move(label);
  p.dimension_ = marginals.size();
  p.marginals_ = std::move(marginals);
  return p;
}

Prior Prior::gamma_copula(std::vector<GammaFit> marginals,
                          std::vector<double> correlation, std::string label,
                          bool correlation_repaired) {
  const std::size_t d = marginals.size();
  if (correlation.size() != d * d) {
    throw std::invalid_argument("Prior: correlation matrix size mismatch");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(correlation[i * d + i] - 1.0) > 1e-8) {
      throw std::invalid_argument("Prior: correlation diagonal must be 1");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(correlation[i * d + j] - correlation[j * d + i]) > 1e-8) {
        throw std::invalid_argument("Prior: correlation must be symmetric");
      }
    }
  }
  Prior p;
  p.kind_ = Kind::kGammaCopula;
  p.label_ = std::move(label);
  p.dimension_ = d;
  p.marginals_ = std::move(marginals);
  p.chol_ = cholesky_lower(correlation, d);  // throws when not PD
  p.log_det_ = cholesky_log_det(p.chol_, d);
  p.correlation_ = std::move(correlation);
  p.correlation_repaired_ = correlation_repaired;
  return p;
}

Prior Prior::pool(Matrix draws, std::string label) {
  if (draws.rows < 1000) {
    throw std::invalid_argument("Prior: pool needs at least 1000 draws");
  }
  for (double v : draws.data) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("Prior: pool draws must be positive");
    }
  }
  Prior p;
  p.kind_ = Kind::kPool;
  p.label_ = std::move(label);
  p.dimension_ = draws.cols;
  p.pool_ = std::move(draws);
  return p;
}

std::vector<double> Prior::sample(Rng& rng) const {
  std::vector<double> out(dimension_);
  switch (kind_) {
    case Kind::kGammaIndependent:
      for (std::size_t j = 0; j < dimension_; ++j) {
        out[j] = gamma_draw(rng, marginals_[j].shape, marginals_[j].rate);
      }
      return out;
    case Kind::kGammaCopula: {
      const std::vector<double> z = mvn_draw(rng, chol_, dimension_);
      for (std::size_t j = 0; j < dimension_; ++j) {
        const double u =
            std::clamp(norm_cdf(z[j]), 1e-15, 1.0 - 1e-15);
        out[j] = gamma_quantile(u, marginals_[j].shape, marginals_[j].rate);
      }
      return out;
    }
    case Kind::kPool: {
      const std::size_t idx = rng.uniform_below(pool_.rows);
      const auto row = pool_.row(idx);
      std::copy(row.begin(), row.end(), out.begin());
      return out;
    }
  }
  throw std::logic_error("Prior: unknown kind");
}

double Prior::log_density(std::span<const double> alpha) const {
  if (alpha.size() != dimension_) {
    throw std::invalid_argument("Prior: dimension mismatch");
  }
  switch (kind_) {
    case Kind::kGammaIndependent: {
      double acc = 0.0;
      for (std::size_t j = 0; j < dimension_; ++j) {
        if (!(alpha[j] > 0.0)) return -std::numeric_limits<double>::infinity();
        acc += gamma_log_pdf(alpha[j], marginals_[j].shape, marginals_[j].rate);
      }
      return acc;
    }
    case Kind::kGammaCopula: {
      double acc = 0.0;
      std::vector<double> z(dimension_);
      for (std::size_t j = 0; j < dimension_; ++j) {
        if (!(alpha[j] > 0.0)) return -std::numeric_limits<double>::infinity();
        acc += gamma_log_pdf(alpha[j], marginals_[j].shape, marginals_[j].rate);
        const double u = std::clamp(
            gamma_cdf(alpha[j], marginals_[j].shape, marginals_[j].rate),
            1e-15, 1.0 - 1e-15);
        z[j] = norm_quantile(u);
      }
      // Gaussian copula density on normal scores z:
      // -1/2 log|R| - 1/2 z'(R^{-1} - I)z.
      const double quad = mahalanobis_sq(chol_, z, dimension_);
      double z_sq = 0.0;
      for (double v : z) z_sq += v * v;
      return acc - 0.5 * log_det_ - 0.5 * (quad - z_sq);
    }
    case Kind::kPool:
      throw std::logic_error(
          "Prior: pool priors have no analytic density (sampling only)");
  }
  throw std::logic_error("Prior: unknown kind");
}

std::vector<double> Prior::mean() const {
  std::vector<double> out(dimension_, 0.0);
  if (kind_ == Kind::kPool) {
    for (std::size_t i = 0; i < pool_.rows; ++i) {
      const auto row = pool_.row(i);
      for (std::size_t j = 0; j < dimension_; ++j) out[j] += row[j];
    }
    for (double& v : out) v /= static_cast<double>(pool_.rows);
    return out;
  }
  for (std::size_t j = 0; j < dimension_; ++j) {
    out[j] = marginals_[j].shape / marginals_[j].rate;
  }
  return out;
}

Prior make_p1(std::size_t d, double shape, double rate) {
  if (d < 2) throw std::invalid_argument("make_p1: need d >= 2");
  return Prior::independent_gamma(std::vector<GammaFit>(d, {shape, rate}),
                                  "p1");
}

Prior make_p2(const SufficientStatistic& released_partition1, double eps1,
              double a, std::size_t n1, std::size_t pool_size, Rng& rng) {
  BootstrapDraws draws =
      dp_bootstrap(released_partition1, eps1, a, n1, pool_size, rng);
  return Prior::pool(std::move(draws.draws), "p2");
}

namespace {

std::vector<GammaFit> fit_pool_marginals(const Matrix& pool) {
  const std::size_t d = pool.cols;
  std::vector<GammaFit> fits(d);
  std::vector<double> col(pool.rows);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < pool.rows; ++i) col[i] = pool(i, j);
    fits[j] = gamma_mle(col);
  }
  return fits;
}

}  // namespace

Prior make_p3(const Prior& pool_prior) {
  if (pool_prior.kind() != Prior::Kind::kPool) {
    throw std::invalid_argument("make_p3: expected a pool prior");
  }
  return Prior::independent_gamma(fit_pool_marginals(pool_prior.pool_draws()),
                                  "p3");
}

Prior make_p4(const Prior& pool_prior) {
  if (pool_prior.kind() != Prior::Kind::kPool) {
    throw std::invalid_argument("make_p4: expected a pool prior");
  }
  const Matrix& pool = pool_prior.pool_draws();
  const std::size_t d = pool.cols;
  const std::size_t n = pool.rows;
  std::vector<GammaFit> fits = fit_pool_marginals(pool);

  // Normal scores under the fitted marginals.
  Matrix scores(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double u = std::clamp(
          gamma_cdf(pool(i, j), fits[j].shape, fits[j].rate), 1e-15,
          1.0 - 1e-15);
      scores(i, j) = norm_quantile(u);
    }
  }
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += scores(i, j);
  }
  for (double& v : mean) v /= static_cast<double>(n);
  std::vector<double> cov(d * d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double cj = scores(i, j) - mean[j];
      for (std::size_t k = j; k < d; ++k) {
        cov[j * d + k] += cj * (scores(i, k) - mean[k]);
      }
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) {
      cov[j * d + k] /= static_cast<double>(n - 1);
      cov[k * d + j] = cov[j * d + k];
    }
  }
  std::vector<double> corr(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      corr[j * d + k] =
          cov[j * d + k] / std::sqrt(cov[j * d + j] * cov[k * d + k]);
    }
  }
  bool repaired = false;
  corr = repair_correlation(corr, d, 1e-6, &repaired);
  return Prior::gamma_copula(std::move(fits), std::move(corr), "p4", repaired);
}

}  // namespace dpdir
