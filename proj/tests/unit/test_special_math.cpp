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
#include "dpdir/linalg.hpp"
#include "dpdir/rng.hpp"
#include "dpdir/special_math.hpp"
#include "test_support.hpp"

using namespace dpdir;

namespace {
constexpr double kEulerGamma = 0.5772156649015329;
}

TEST_SUITE("special_math") {

TEST_CASE("log_gamma known values") {
  CHECK(std::abs(log_gamma(1.0)) <= 1e-12);
  CHECK(std::abs(log_gamma(5.0) - std::log(24.0)) <= 1e-12);
  CHECK(std::abs(log_gamma(0.5) - 0.5 * std::log(M_PI)) <= 1e-12);
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-1.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(std::nan("")), std::domain_error);
}

TEST_CASE("digamma known values") {
  CHECK(std::abs(digamma(1.0) + kEulerGamma) <= 1e-10);
  CHECK(std::abs(digamma(2.0) - (1.0 - kEulerGamma)) <= 1e-10);
  CHECK(std::abs(digamma(0.5) - (-kEulerGamma - 2.0 * std::log(2.0))) <= 1e-10);
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
}

TEST_CASE("digamma recurrence over random arguments") {
  Rng rng(101);
  for (int i = 0; i < 1000; ++i) {
    const double x = 0.01 + rng.uniform01() * 99.99;
    CHECK(std::abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) <= 1e-9);
  }
}

TEST_CASE("trigamma known values and derivative identity") {
  const double pi_sq_6 = M_PI * M_PI / 6.0;
  CHECK(std::abs(trigamma(1.0) - pi_sq_6) <= 1e-10);
  CHECK(std::abs(trigamma(2.0) - (pi_sq_6 - 1.0)) <= 1e-10);
  CHECK(std::abs(trigamma(0.5) - M_PI * M_PI / 2.0) <= 1e-10);

  Rng rng(102);
  const double h = 1e-4;
  for (int i = 0; i < 200; ++i) {
    const double x = 0.25 + rng.uniform01() * 50.0;
    const double numeric = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
    CHECK(std::abs(trigamma(x) - numeric) <= 1e-5);
  }
}

TEST_CASE("digamma inverse round trip") {
  Rng rng(103);
  for (int i = 0; i < 500; ++i) {
    const double x = 0.05 + rng.uniform01() * 40.0;
    CHECK(digamma_inverse(digamma(x)) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("regularized incomplete beta") {
  CHECK(reg_inc_beta(1.0, 1.0, 0.1) == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(reg_inc_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(reg_inc_beta(1.0, 2.0, 0.1) == doctest::Approx(0.19).epsilon(1e-10));
  CHECK_THROWS_AS(reg_inc_beta(0.0, 1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(reg_inc_beta(1.0, 1.0, 1.5), std::domain_error);

  Rng rng(104);
  for (int i = 0; i < 500; ++i) {
    const double p = 0.1 + rng.uniform01() * 20.0;
    const double q = 0.1 + rng.uniform01() * 20.0;
    const double x = rng.uniform01();
    CHECK(std::abs(reg_inc_beta(p, q, x) + reg_inc_beta(q, p, 1.0 - x) - 1.0) <=
          1e-9);
  }
}

TEST_CASE("normal cdf and quantile") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(norm_quantile(0.975) - 1.959963984540054) <= 1e-9);
  CHECK(std::abs(norm_quantile(0.5)) <= 1e-12);
  Rng rng(105);
  for (int i = 0; i < 300; ++i) {
    const double p = 0.001 + rng.uniform01() * 0.998;
    CHECK(norm_cdf(norm_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
  CHECK_THROWS_AS(norm_quantile(0.0), std::domain_error);
}

TEST_CASE("correlated normal draws reproduce identity correlation") {
  const std::size_t d = 3;
  std::vector<double> identity(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) identity[i * d + i] = 1.0;
  const std::vector<double> chol = cholesky_lower(identity, d);
  Rng rng(106);
  const std::size_t n = 100000;
  std::vector<double> sums(d, 0.0);
  std::vector<double> cross(d * d, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::vector<double> z = mvn_draw(rng, chol, d);
    for (std::size_t i = 0; i < d; ++i) {
      sums[i] += z[i];
      for (std::size_t j = 0; j < d; ++j) cross[i * d + j] += z[i] * z[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double corr = cross[i * d + j] / static_cast<double>(n) -
                          sums[i] * sums[j] /
                              (static_cast<double>(n) * static_cast<double>(n));
      const double expected = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(corr - expected) <= 0.02);
    }
  }
}

TEST_CASE("cholesky rejects an indefinite matrix and reports it") {
  const std::vector<double> bad = {1.0, 2.0, 2.0, 1.0};  // eigenvalues 3, -1
  try {
    cholesky_lower(bad, 2);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("positive definite") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);  // matrix echoed back
  }
}

TEST_CASE("gamma cdf, quantile, draws, and fit") {
  CHECK(gamma_cdf(1.0, 1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));

  Rng rng(107);
  for (int i = 0; i < 200; ++i) {
    const double shape = 0.2 + rng.uniform01() * 15.0;
    const double rate = 0.1 + rng.uniform01() * 5.0;
    const double p = 0.001 + rng.uniform01() * 0.998;
    const double x = gamma_quantile(p, shape, rate);
    CHECK(gamma_cdf(x, shape, rate) == doctest::Approx(p).epsilon(1e-7));
  }

  const std::size_t n = 100000;
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) draws[i] = gamma_draw(rng, 3.0, 2.0);
  CHECK(std::abs(testsupport::mean(draws) - 1.5) <= 0.03);

  std::vector<double> sample(n);
  for (std::size_t i = 0; i < n; ++i) sample[i] = gamma_draw(rng, 2.0, 0.5);
  const GammaFit fit = gamma_mle(sample);
  CHECK(fit.shape >= 1.95);
  CHECK(fit.shape <= 2.05);
  CHECK(fit.rate >= 0.48);
  CHECK(fit.rate <= 0.52);

  const std::vector<double> constant(10, 2.5);
  CHECK_THROWS_AS(gamma_mle(constant), std::runtime_error);
  CHECK_THROWS_AS(gamma_mle(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("shape below one uses the boosted sampler") {
  Rng rng(108);
  const std::size_t n = 200000;
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) draws[i] = gamma_draw(rng, 0.5, 1.0);
  // mean = shape/rate, var = shape/rate^2
  CHECK(std::abs(testsupport::mean(draws) - 0.5) <= 0.01);
  CHECK(std::abs(testsupport::variance(draws) - 0.5) <= 0.02);
}

TEST_CASE("inverse gaussian moments") {
  Rng rng(109);
  const std::size_t n = 200000;
  const double mu = 2.0, lambda = 3.0;
  std::vector<double> draws(n);
  for (std::size_t i = 0; i < n; ++i) {
    draws[i] = inverse_gaussian_draw(rng, mu, lambda);
  }
  CHECK(std::abs(testsupport::mean(draws) - mu) <= 0.02);
  // var = mu^3 / lambda
  CHECK(std::abs(testsupport::variance(draws) - mu * mu * mu / lambda) <= 0.1);
}

}  // TEST_SUITE
