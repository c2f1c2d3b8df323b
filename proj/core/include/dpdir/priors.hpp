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

#ifndef DPDIR_PRIORS_HPP_
#define DPDIR_PRIORS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpdir/dirichlet.hpp"
#include "dpdir/matrix.hpp"
#include "dpdir/rng.hpp"
#include "dpdir/special_math.hpp"

namespace dpdir {

// Prior over the positive parameter vector. Three representations:
//  - independent gamma marginals (p1, p3): analytic density available;
//  - gamma marginals tied by a Gaussian copula (p4): analytic density;
//  - a stored draw pool sampled with replacement (p2, p5): sampling only.
class Prior {
 public:
  enum class Kind { kGammaIndependent, kGammaCopula, kPool };

  static Prior independent_gamma(std::vector<GammaFit> marginals,
                                 std::string label);
  static Prior gamma_copula(std::vector<GammaFit> marginals,
                            std::vector<double> correlation, std::string label,
                            bool correlation_repaired);
  static Prior pool(Matrix draws, std::string label);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  std::size_t dimension() const { return dimension_; }
  bool has_log_density() const { return kind_ != Kind::kPool; }
  bool correlation_repaired() const { return correlation_repaired_; }
  const std::vector<GammaFit>& marginals() const { return marginals_; }
  const Matrix& pool_draws() const { return pool_; }

  std::vector<double> sample(Rng& rng) const;
  double log_density(std::span<const double> alpha) const;

  // Prior mean (pool mean for pool priors); used to seed samplers.
  std::vector<double> mean() const;

 private:
  Prior() = default;

  Kind kind_ = Kind::kGammaIndependent;
  std::string label_;
  std::size_t dimension_ = 0;
  std::vector<GammaFit> marginals_;
  // Copula state (kGammaCopula only).
  std::vector<double> correlation_;
  std::vector<double> chol_;
  double log_det_ = 0.0;
  bool correlation_repaired_ = false;
  // Pool state (kPool only).
  Matrix pool_;
};

// Vague independent-gamma prior with the standard defaults.
Prior make_p1(std::size_t d, double shape = 1.0, double rate = 0.1);

// Pool prior induced by the parametric bootstrap run on the first-partition
// statistic.
Prior make_p2(const SufficientStatistic& released_partition1, double eps1,
              double a, std::size_t n1, std::size_t pool_size, Rng& rng);

// Independent gamma fit to the pool of a p2-style prior.
Prior make_p3(const Prior& pool_prior);

// Gamma marginals plus a Gaussian copula whose correlation matrix is
// estimated from normal scores of the pool.
Prior make_p4(const Prior& pool_prior);

}  // namespace dpdir

#endif  // DPDIR_PRIORS_HPP_
