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
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dpdir/diagnostics.hpp"
#include "test_support.hpp"

using namespace dpdir;

TEST_SUITE("diagnostics") {

TEST_CASE("squared-error metric for the parameter") {
  Matrix draws(2, 2);
  draws(0, 0) = 3.0;
  draws(0, 1) = 1.0;
  draws(1, 0) = 4.0;  // offset e1
  draws(1, 1) = 1.0;
  const std::vector<double> truth = {3.0, 1.0};
  CHECK(mse_alpha(draws, truth) == doctest::Approx(0.5).epsilon(1e-12));

  Matrix exact(5, 2, 0.0);
  for (std::size_t i = 0; i < 5; ++i) {
    exact(i, 0) = 3.0;
    exact(i, 1) = 1.0;
  }
  CHECK(mse_alpha(exact, truth) == 0.0);

  // Permutation invariance.
  Matrix swapped(2, 2);
  swapped(0, 0) = 4.0;
  swapped(0, 1) = 1.0;
  swapped(1, 0) = 3.0;
  swapped(1, 1) = 1.0;
  CHECK(mse_alpha(swapped, truth) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(mse_alpha(draws, std::vector<double>{1.0, 2.0, 3.0}),
                  std::invalid_argument);
}

TEST_CASE("squared-error metric for the mean composition") {
  const std::vector<double> truth = {3.0, 1.0};
  Matrix draws(1, 2);
  draws(0, 0) = 1.0;
  draws(0, 1) = 1.0;
  CHECK(mse_mean(draws, truth) == doctest::Approx(0.125).epsilon(1e-12));

  // The composition map is scale free.
  Matrix doubled(1, 2);
  doubled(0, 0) = 6.0;
  doubled(0, 1) = 2.0;
  CHECK(mse_mean(doubled, truth) == doctest::Approx(0.0).epsilon(1e-15));

  Matrix exact(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    exact(i, 0) = 3.0;
    exact(i, 1) = 1.0;
  }
  CHECK(mse_mean(exact, truth) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("split variance ratio flags non-mixing chains") {
  Rng rng(801);
  // Chains drawn from a common distribution sit near one.
  std::vector<Matrix> good(4, Matrix(10000, 2));
  for (auto& chain : good) {
    for (std::size_t i = 0; i < chain.rows; ++i) {
      chain(i, 0) = rng.normal();
      chain(i, 1) = 3.0 + 2.0 * rng.normal();
    }
  }
  const std::vector<double> rhat = split_rhat(good);
  for (double r : rhat) {
    CHECK(r >= 0.99);
    CHECK(r <= 1.01);
  }

  // Affine transformation of every chain leaves it unchanged.
  std::vector<Matrix> scaled = good;
  for (auto& chain : scaled) {
    for (double& v : chain.data) v = 5.0 - 2.5 * v;
  }
  const std::vector<double> rhat_scaled = split_rhat(scaled);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(rhat_scaled[j] == doctest::Approx(rhat[j]).epsilon(1e-9));
  }

  std::vector<Matrix> constant(2, Matrix(100, 1, 1.0));
  for (std::size_t i = 0; i < 100; ++i) constant[1](i, 0) = 2.0;
  CHECK(split_rhat(constant)[0] > 1.5);

  CHECK_THROWS_AS(split_rhat({good[0]}), std::invalid_argument);
  std::vector<Matrix> short_chains(2, Matrix(2, 1, 1.0));
  CHECK_THROWS_AS(split_rhat(short_chains), std::invalid_argument);
}

TEST_CASE("predictive coverage is calibrated for the true model") {
  const DirichletParams truth({2.2, 3.3, 4.4});
  Rng rng(802);
  const auto pred_data = dirichlet_sample(truth, 5000, rng);
  Rng truth_rng(803);
  const double coverage =
      predictive_coverage(pred_data.matrix(), truth, 0.95, 100000, truth_rng);
  CHECK(std::abs(coverage - 0.95) <= 0.02);

  // A badly mis-centered model scores far below nominal.
  const DirichletParams wrong({20.0, 2.0, 2.0});
  Rng wrong_rng(804);
  const auto wrong_pred = dirichlet_sample(wrong, 5000, wrong_rng);
  Rng truth_rng2(805);
  const double bad =
      predictive_coverage(wrong_pred.matrix(), truth, 0.95, 20000, truth_rng2);
  CHECK(bad < 0.5);

  // Level one collects almost everything when the model is right.
  Rng truth_rng3(806);
  const double full =
      predictive_coverage(pred_data.matrix(), truth, 1.0, 20000, truth_rng3);
  CHECK(full >= 0.99);
}

TEST_CASE("coverage is insensitive to which component is dropped") {
  const DirichletParams truth({2.2, 3.3, 4.4});
  Rng rng(807);
  const auto pred = dirichlet_sample(truth, 8000, rng);
  Rng t1(808);
  const double base = predictive_coverage(pred.matrix(), truth, 0.9, 50000, t1);

  // Rotate components: drop a different one.
  Matrix rotated(pred.matrix().rows, 3);
  for (std::size_t i = 0; i < rotated.rows; ++i) {
    rotated(i, 0) = pred.matrix()(i, 1);
    rotated(i, 1) = pred.matrix()(i, 2);
    rotated(i, 2) = pred.matrix()(i, 0);
  }
  const DirichletParams rotated_truth({3.3, 4.4, 2.2});
  Rng t2(808);
  const double other =
      predictive_coverage(rotated, rotated_truth, 0.9, 50000, t2);
  CHECK(std::abs(base - other) <= 0.01);
}

TEST_CASE("coverage requires enough predictive rows") {
  const DirichletParams truth({2.0, 2.0});
  Rng rng(809);
  const auto pred = dirichlet_sample(truth, 100, rng);
  Rng t(810);
  CHECK_THROWS_AS(predictive_coverage(pred.matrix(), truth, 0.95, 1000, t),
                  std::invalid_argument);
}

}  // TEST_SUITE
