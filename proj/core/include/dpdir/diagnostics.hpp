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

#ifndef DPDIR_DIAGNOSTICS_HPP_
#define DPDIR_DIAGNOSTICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dpdir/dirichlet.hpp"
#include "dpdir/matrix.hpp"
#include "dpdir/rng.hpp"

namespace dpdir {

// Mean squared Euclidean distance of the draws from the true parameter.
double mse_alpha(const Matrix& draws, std::span<const double> alpha_true);

// Same, after mapping draws and truth to mean compositions.
double mse_mean(const Matrix& draws, std::span<const double> alpha_true);

// Classic split-Rhat per component: each chain is halved, and the
// between/within variance ratio is computed over the half-chains.
// Chains must have a common length >= 4; at least two chains.
std::vector<double> split_rhat(const std::vector<Matrix>& chains);

// Fraction of fresh draws from the true model falling inside the
// level-quantile Mahalanobis ellipsoid of the predictive sample. The last
// component is dropped first (the full d-dimensional covariance of simplex
// data is singular).
double predictive_coverage(const Matrix& predictive,
                           const DirichletParams& alpha_true, double level,
                           std::size_t n_truth, Rng& rng);

struct MetricReport {
  std::string method;
  double mse_alpha = 0.0;
  double mse_mean = 0.0;
  std::vector<double> split_rhat;
  double rhat_max = 0.0;
  double predictive_coverage = 0.0;
};

}  // namespace dpdir

#endif  // DPDIR_DIAGNOSTICS_HPP_
