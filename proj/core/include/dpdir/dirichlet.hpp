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

#ifndef DPDIR_DIRICHLET_HPP_
#define DPDIR_DIRICHLET_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dpdir/matrix.hpp"
#include "dpdir/rng.hpp"

namespace dpdir {

// Positive Dirichlet parameter vector.
struct DirichletParams {
  std::vector<double> alpha;

  DirichletParams() = default;
  explicit DirichletParams(std::vector<double> a);  // validates positivity

  std::size_t dimension() const { return alpha.size(); }
  double sum() const;
};

// A validated compositional dataset: every entry strictly positive, every
// row summing to one within 1e-9. Immutable after construction.
class CompositionalDataset {
 public:
  CompositionalDataset() = default;  // empty; fill via validate()/trusted()

  // Validates and adopts the rows; throws std::invalid_argument listing the
  // offending row indices (ragged rows, non-positive entries, bad sums).
  static CompositionalDataset validate(const std::vector<std::vector<double>>& rows);

  // Adopts rows known to be valid (internal samplers).
  static CompositionalDataset trusted(Matrix rows);

  std::size_t record_count() const { return rows_.rows; }
  std::size_t component_count() const { return rows_.cols; }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  const Matrix& matrix() const { return rows_; }

 private:
  Matrix rows_;
};

// Mean of the per-record log statistic, optionally left-censored.
// threshold == nullopt means the plain (uncensored) statistic.
struct SufficientStatistic {
  std::vector<double> values;
  std::optional<double> threshold;
  std::size_t basis_count = 0;

  std::size_t dimension() const { return values.size(); }
};

// True when values lie in the feasible set of the statistic: all components
// strictly negative and sum_j exp(values_j) <= 1. Noisy statistics may fall
// outside; callers decide how to react.
bool in_sufficient_range(std::span<const double> values);

// Entrywise max with the threshold; rows are deliberately not rescaled to
// the simplex afterwards.
Matrix censor(const CompositionalDataset& data, double threshold);

SufficientStatistic sufficient_stat(const CompositionalDataset& data,
                                    std::optional<double> threshold);

// Log density of the Dirichlet distribution at a point strictly inside the
// simplex; throws std::domain_error otherwise.
double dirichlet_log_pdf(std::span<const double> x, const DirichletParams& params);

// n independent draws via normalized gamma variates.
CompositionalDataset dirichlet_sample(const DirichletParams& params,
                                      std::size_t n, Rng& rng);
void dirichlet_draw_row(const DirichletParams& params, Rng& rng,
                        std::span<double> out);

// Maximum-likelihood fit from a sufficient statistic by the convergent
// fixed-point iteration (digamma inversion per component). Throws
// std::range_error when the statistic is outside its feasible range and
// std::runtime_error when the iteration fails to converge.
DirichletParams dirichlet_mle(const SufficientStatistic& stat);

std::vector<double> mean_composition(const DirichletParams& params);

// Expected statistic under the model: digamma(alpha_j) - digamma(sum).
std::vector<double> expected_sufficient_stat(const DirichletParams& params);

}  // namespace dpdir

#endif  // DPDIR_DIRICHLET_HPP_
