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

#ifndef DPDIR_CENSORING_HPP_
#define DPDIR_CENSORING_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "dpdir/dirichlet.hpp"

namespace dpdir {

// Closed-form and bounded analytics on the effect of left-censoring under
// the Dirichlet model. The marginal of component j is Beta(alpha_j, beta_j)
// with beta_j = sum(alpha) - alpha_j.

// P(x_j < a) per component.
std::vector<double> prob_censored(const DirichletParams& params, double a);

// Mean of prob_censored across components.
double expected_censored_proportion(const DirichletParams& params, double a);

struct BernsteinBound {
  double value = 1.0;
  bool vacuous = false;  // set when a >= component mean (bound is trivial)
};

// Exponential tail bound on the per-component censoring probability.
BernsteinBound bernstein_bound(const DirichletParams& params,
                               std::size_t component, double a);

// Bias of the censored log statistic per component:
// integral over (0, a) of (log a - log x) times the Beta marginal density.
std::vector<double> censoring_bias(const DirichletParams& params, double a);

// Closed-form upper bound on the bias, valid only when alpha_j > 1
// (nullopt otherwise).
std::optional<double> bias_upper_bound(const DirichletParams& params,
                                       std::size_t component, double a);

struct CensoringReport {
  double threshold = 0.0;
  std::vector<double> per_component_prob;
  double expected_proportion = 0.0;
  std::vector<double> per_component_bias;
  std::vector<BernsteinBound> bernstein_bounds;
  std::vector<std::optional<double>> bias_upper_bounds;
};

CensoringReport build_censoring_report(const DirichletParams& params, double a);

}  // namespace dpdir

#endif  // DPDIR_CENSORING_HPP_
