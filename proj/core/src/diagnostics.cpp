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

#include "dpdir/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpdir/linalg.hpp"

namespace dpdir {

double mse_alpha(const Matrix& draws, std::span<const double> alpha_true) {
  if (draws.rows < 1 || draws.cols != alpha_true.size()) {
    throw std::invalid_argument("mse_alpha: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < draws.rows; ++i) {
    for (std::size_t j = 0; j < draws.cols; ++j) {
      const double diff = draws(i, j) - alpha_true[j];
      acc += diff * diff;
    }
  }
  return acc / static_cast<double>(draws.rows);
}

double mse_mean(const Matrix& draws, std::span<const double> alpha_true) {
  if (draws.rows < 1 || draws.cols != alpha_true.size()) {
    throw std::invalid_argument("mse_mean: dimension mismatch");
  }
  double truth_sum = 0.0;
  for (double v : alpha_true) truth_sum += v;
  double acc = 0.0;
  for (std::size_t i = 0; i < draws.rows; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < draws.cols; ++j) row_sum += draws(i, j);
    for (std::size_t j = 0; j < draws.cols; ++j) {
      const double diff = draws(i, j) / row_sum - alpha_true[j] / truth_sum;
      acc += diff * diff;
    }
  }
  return acc / static_cast<double>(draws.rows);
}

std::vector<double> split_rhat(const std::vector<Matrix>& chains) {
  if (chains.size() < 2) {
    throw std::invalid_argument("split_rhat: need at least 2 chains");
  }
  std::size_t length = std::numeric_limits<std::size_t>::max();
  const std::size_t d = chains.front().cols;
  for (const Matrix& c : chains) {
    if (c.cols != d) throw std::invalid_argument("split_rhat: column mismatch");
    length = std::min(length, c.rows);
  }
  length -= length % 2;  // common even length
  if (length < 4) {
    throw std::invalid_argument("split_rhat: chains too short (< 4)");
  }
  const std::size_t half = length / 2;
  const std::size_t m = 2 * chains.size();

  std::vector<double> out(d);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> means;
    std::vector<double> vars;
    means.reserve(m);
    vars.reserve(m);
    for (const Matrix& c : chains) {
      for (int part = 0; part < 2; ++part) {
        const std::size_t from = part * half;
        double mean = 0.0;
        for (std::size_t t = 0; t < half; ++t) mean += c(from + t, j);
        mean /= static_cast<double>(half);
        double var = 0.0;
        for (std::size_t t = 0; t < half; ++t) {
          const double diff = c(from + t, j) - mean;
          var += diff * diff;
        }
        var /= static_cast<double>(half - 1);
        means.push_back(mean);
        vars.push_back(var);
      }
    }
    double w = 0.0;
    for (double v : vars) w += v;
    w /= static_cast<double>(m);
    double grand = 0.0;
    for (double v : means) grand += v;
    grand /= static_cast<double>(m);
    double b = 0.0;
    for (double v : means) b += (v - grand) * (v - grand);
    b *= static_cast<double>(half) / static_cast<double>(m - 1);
    if (w <= 0.0) {
      out[j] = (b <= 0.0) ? 1.0 : std::numeric_limits<double>::infinity();
      continue;
    }
    const double var_plus =
        (static_cast<double>(half - 1) / static_cast<double>(half)) * w +
        b / static_cast<double>(half);
    out[j] = std::sqrt(var_plus / w);
  }
  return out;
}

double predictive_coverage(const Matrix& predictive,
                           const DirichletParams& alpha_true, double level,
                           std::size_t n_truth, Rng& rng) {
  if (predictive.rows < 500) {
    throw std::invalid_argument("predictive_coverage: need >= 500 rows");
  }
  if (!(level > 0.0 && level <= 1.0)) {
    throw std::invalid_argument("predictive_coverage: level must be in (0, 1]");
  }
  const std::size_t d = predictive.cols;
  if (d != alpha_true.dimension() || d < 2) {
    throw std::invalid_argument("predictive_coverage: dimension mismatch");
  }
  const std::size_t p = d - 1;  // drop the last component

  std::vector<double> mean(p, 0.0);
  for (std::size_t i = 0; i < predictive.rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) mean[j] += predictive(i, j);
  }
  for (double& v : mean) v /= static_cast<double>(predictive.rows);

  std::vector<double> cov(p * p, 0.0);
  for (std::size_t i = 0; i < predictive.rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double cj = predictive(i, j) - mean[j];
      for (std::size_t k = j; k < p; ++k) {
        cov[j * p + k] += cj * (predictive(i, k) - mean[k]);
      }
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j; k < p; ++k) {
      cov[j * p + k] /= static_cast<double>(predictive.rows - 1);
      cov[k * p + j] = cov[j * p + k];
    }
  }
  const std::vector<double> chol = cholesky_lower(cov, p);  // throws if singular

  std::vector<double> dist(predictive.rows);
  std::vector<double> centered(p);
  for (std::size_t i = 0; i < predictive.rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) centered[j] = predictive(i, j) - mean[j];
    dist[i] = mahalanobis_sq(chol, centered, p);
  }
  std::sort(dist.begin(), dist.end());
  const std::size_t k_idx = std::min<std::size_t>(
      predictive.rows,
      std::max<std::size_t>(
          1, static_cast<std::size_t>(
                 std::ceil(level * static_cast<double>(predictive.rows)))));
  const double radius = dist[k_idx - 1];

  std::size_t inside = 0;
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n_truth; ++i) {
    dirichlet_draw_row(alpha_true, rng, row);
    for (std::size_t j = 0; j < p; ++j) centered[j] = row[j] - mean[j];
    if (mahalanobis_sq(chol, centered, p) <= radius) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(n_truth);
}

}  // namespace dpdir
