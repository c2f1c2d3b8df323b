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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpdir/censoring.hpp"
#include "dpdir/special_math.hpp"
#include "test_support.hpp"

using namespace dpdir;

TEST_SUITE("censoring") {

TEST_CASE("per-component censoring probabilities") {
  const std::vector<double> flat = prob_censored(DirichletParams({1.0, 1.0}), 0.1);
  CHECK(flat[0] == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(flat[1] == doctest::Approx(0.1).epsilon(1e-10));

  const std::vector<double> skew = prob_censored(DirichletParams({1.0, 2.0}), 0.1);
  CHECK(skew[0] == doctest::Approx(0.19).epsilon(1e-10));

  const std::vector<double> tiny =
      prob_censored(DirichletParams({2.2, 3.3, 4.4}), 1e-9);
  for (double p : tiny) CHECK(p <= 1e-6);
}

TEST_CASE("expected censored proportion") {
  CHECK(expected_censored_proportion(DirichletParams({1.0, 1.0}), 0.1) ==
        doctest::Approx(0.1).epsilon(1e-10));
  CHECK(expected_censored_proportion(DirichletParams({1.0, 2.0}), 0.1) ==
        doctest::Approx(0.10).epsilon(1e-10));
  const DirichletParams alpha({2.2, 3.3, 4.4});
  CHECK(expected_censored_proportion(alpha, 0.01) <
        expected_censored_proportion(alpha, 0.1));
}

TEST_CASE("tail bound evaluates and dominates the exact probability") {
  const BernsteinBound flat = bernstein_bound(DirichletParams({1.0, 1.0}), 0, 0.1);
  CHECK_FALSE(flat.vacuous);
  CHECK(flat.value == doctest::Approx(std::exp(-0.96)).epsilon(1e-9));

  const BernsteinBound trivial =
      bernstein_bound(DirichletParams({1.0, 9.0}), 0, 0.2);  // mean 0.1 < a
  CHECK(trivial.vacuous);
  CHECK(trivial.value == 1.0);

  Rng rng(301);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> alpha(3);
    for (double& v : alpha) v = 0.3 + rng.uniform01() * 8.0;
    if (rep % 2 == 0) alpha[rep % 3] = alpha.at((rep + 1) % 3) * 4.0;  // dominant
    const DirichletParams params(alpha);
    const std::size_t j = rep % 3;
    const double m = params.alpha[j] / params.sum();
    const double a = rng.uniform01() * m * 0.9 + 1e-4;
    if (a >= m) continue;
    const double exact = prob_censored(params, a)[j];
    const BernsteinBound bound = bernstein_bound(params, j, a);
    CHECK(bound.value >= exact - 1e-12);
  }
}

TEST_CASE("censoring bias in closed form and by Monte Carlo") {
  const std::vector<double> flat = censoring_bias(DirichletParams({1.0, 1.0}), 0.1);
  CHECK(flat[0] == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(flat[1] == doctest::Approx(0.1).epsilon(1e-8));

  // Increasing in the threshold, all components positive.
  const DirichletParams alpha({0.8, 2.0, 3.1});
  double prev = 0.0;
  for (double a : {0.01, 0.05, 0.1}) {
    const std::vector<double> bias = censoring_bias(alpha, a);
    double total = 0.0;
    for (double b : bias) {
      CHECK(b > 0.0);
      total += b;
    }
    CHECK(total > prev);
    prev = total;
  }

  // Concentration lowers the bias at a fixed threshold.
  CHECK(censoring_bias(DirichletParams({5.0, 5.0}), 0.01)[0] <
        censoring_bias(DirichletParams({1.0, 1.0}), 0.01)[0]);
}

TEST_CASE("bias bound requires shape above one and dominates") {
  CHECK_FALSE(bias_upper_bound(DirichletParams({1.0, 2.0}), 0, 0.1).has_value());

  const auto bound = bias_upper_bound(DirichletParams({2.0, 2.0}), 0, 0.1);
  REQUIRE(bound.has_value());
  CHECK(*bound == doctest::Approx(0.57).epsilon(1e-9));

  Rng rng(302);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> alpha(2);
    alpha[0] = 1.1 + rng.uniform01() * 18.9;
    alpha[1] = 0.5 + rng.uniform01() * 10.0;
    const DirichletParams params(alpha);
    const double a = 0.001 + rng.uniform01() * 0.199;
    const auto ub = bias_upper_bound(params, 0, a);
    REQUIRE(ub.has_value());
    const double exact = censoring_bias(params, a)[0];
    CHECK(*ub >= exact - 1e-10);
  }
}

TEST_CASE("monte carlo agreement for proportion and bias") {
  Rng rng(303);
  const DirichletParams alpha({1.7, 0.9, 2.4});
  const double a = 0.03;
  const std::size_t n = 100000;
  const auto data = dirichlet_sample(alpha, n, rng);

  std::size_t censored_entries = 0;
  std::vector<double> gap_sum(3, 0.0);
  std::vector<double> gap_sq(3, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < 3; ++j) {
      if (row[j] < a) ++censored_entries;
      const double gap = std::log(std::max(row[j], a)) - std::log(row[j]);
      gap_sum[j] += gap;
      gap_sq[j] += gap * gap;
    }
  }
  const double expected = expected_censored_proportion(alpha, a);
  const double observed =
      static_cast<double>(censored_entries) / static_cast<double>(3 * n);
  const double se = std::sqrt(expected * (1.0 - expected) /
                              static_cast<double>(3 * n));
  CHECK(std::abs(observed - expected) <= 4.0 * se);

  const std::vector<double> bias = censoring_bias(alpha, a);
  for (std::size_t j = 0; j < 3; ++j) {
    const double m1 = gap_sum[j] / static_cast<double>(n);
    const double var = gap_sq[j] / static_cast<double>(n) - m1 * m1;
    const double se_bias = std::sqrt(var / static_cast<double>(n));
    CHECK(std::abs(m1 - bias[j]) <= 4.0 * se_bias + 1e-9);
  }
}

TEST_CASE("report assembles every block") {
  const CensoringReport report =
      build_censoring_report(DirichletParams({2.0, 3.0, 4.0}), 0.05);
  CHECK(report.threshold == 0.05);
  CHECK(report.per_component_prob.size() == 3);
  CHECK(report.per_component_bias.size() == 3);
  CHECK(report.bernstein_bounds.size() == 3);
  CHECK(report.bias_upper_bounds.size() == 3);
  double acc = 0.0;
  for (double p : report.per_component_prob) acc += p;
  CHECK(report.expected_proportion == doctest::Approx(acc / 3.0));
}

}  // TEST_SUITE
