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

#include "dpdir/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dpdir/special_math.hpp"

namespace dpdir {

namespace {

constexpr double kRowSumTolerance = 1e-9;

}  // namespace

DirichletParams::DirichletParams(std::vector<double> a) : alpha(std::move(a)) {
  if (alpha.empty()) {
    throw std::invalid_argument("DirichletParams: empty parameter vector");
  }
  for (double v : alpha) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(
          "DirichletParams: all components must be positive and finite");
    }
  }
}

double DirichletParams::sum() const {
  return std::accumulate(alpha.begin(), alpha.end(), 0.0);
}

CompositionalDataset CompositionalDataset::validate(
    const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    throw std::invalid_argument("CompositionalDataset: no rows");
  }
  const std::size_t d = rows.front().size();
  if (d < 2) {
    throw std::invalid_argument(
        "CompositionalDataset: need at least 2 components");
  }
  std::vector<std::size_t> ragged, nonpositive, badsum;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      ragged.push_back(i);
      continue;
    }
    double sum = 0.0;
    bool pos = true;
    for (double v : rows[i]) {
      if (!(v > 0.0) || !std::isfinite(v)) pos = false;
      sum += v;
    }
    if (!pos) {
      nonpositive.push_back(i);
    } else if (std::abs(sum - 1.0) > kRowSumTolerance) {
      badsum.push_back(i);
    }
  }
  if (!ragged.empty() || !nonpositive.empty() || !badsum.empty()) {
    std::ostringstream os;
    os << "CompositionalDataset: invalid rows:";
    auto emit = [&os](const char* what, const std::vector<std::size_t>& idx) {
      if (idx.empty()) return;
      os << " " << what << " at rows";
      for (std::size_t k = 0; k < idx.size() && k < 20; ++k) os << " " << idx[k];
      if (idx.size() > 20) os << " ... (" << idx.size() << " total)";
      os << ";";
    };
    emit("ragged length", ragged);
    emit("non-positive entry", nonpositive);
    emit("row sum != 1", badsum);
    throw std::invalid_argument(os.str());
  }
  Matrix m(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  CompositionalDataset out;
  out.rows_ = std::move(m);
  return out;
}

CompositionalDataset CompositionalDataset::trusted(Matrix rows) {
  CompositionalDataset out;
  out.rows_ = std::move(rows);
  return out;
}

bool in_sufficient_range(std::span<const double> values) {
  double sum_exp = 0.0;
  for (double v : values) {
    if (!(v < 0.0)) return false;
    sum_exp += std::exp(v);
  }
  return sum_exp <= 1.0;
}

Matrix censor(const CompositionalDataset& data, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("censor: threshold must lie in (0, 1)");
  }
  Matrix out = data.matrix();
  for (double& v : out.data) v = std::max(v, threshold);
  return out;
}

SufficientStatistic sufficient_stat(const CompositionalDataset& data,
                                    std::optional<double> threshold) {
  if (threshold && !(*threshold > 0.0 && *threshold < 1.0)) {
    throw std::invalid_argument(
        "sufficient_stat: threshold must lie in (0, 1)");
  }
  const std::size_t n = data.record_count();
  const std::size_t d = data.component_count();
  std::vector<double> sums(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double v = threshold ? std::max(row[j], *threshold) : row[j];
      sums[j] += std::log(v);
    }
  }
  for (double& s : sums) s /= static_cast<double>(n);
  return SufficientStatistic{std::move(sums), threshold, n};
}

double dirichlet_log_pdf(std::span<const double> x,
                         const DirichletParams& params) {
  const std::size_t d = params.dimension();
  if (x.size() != d) {
    throw std::invalid_argument("dirichlet_log_pdf: dimension mismatch");
  }
  double sum = 0.0;
  for (double v : x) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error(
          "dirichlet_log_pdf: point not strictly inside the simplex");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    throw std::domain_error(
        "dirichlet_log_pdf: point not strictly inside the simplex (sum = " +
        std::to_string(sum) + ")");
  }
  double acc = log_gamma(params.sum());
  for (std::size_t j = 0; j < d; ++j) {
    acc -= log_gamma(params.alpha[j]);
    acc += (params.alpha[j] - 1.0) * std::log(x[j]);
  }
  return acc;
}

void dirichlet_draw_row(const DirichletParams& params, Rng& rng,
                        std::span<double> out) {
  const std::size_t d = params.dimension();
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    out[j] = gamma_draw(rng, params.alpha[j], 1.0);
    total += out[j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    out[j] /= total;
    if (out[j] <= 0.0) out[j] = 1e-308;  // guard against gamma underflow
  }
}

CompositionalDataset dirichlet_sample(const DirichletParams& params,
                                      std::size_t n, Rng& rng) {
  if (n < 1) {
    throw std::invalid_argument("dirichlet_sample: n must be >= 1");
  }
  Matrix m(n, params.dimension());
  for (std::size_t i = 0; i < n; ++i) {
    dirichlet_draw_row(params, rng, m.row(i));
  }
  return CompositionalDataset::trusted(std::move(m));
}

DirichletParams dirichlet_mle(const SufficientStatistic& stat) {
  const std::size_t d = stat.dimension();
  if (d < 2) {
    throw std::invalid_argument("dirichlet_mle: need at least 2 components");
  }
  double sum_exp = 0.0;
  for (double s : stat.values) {
    if (!(s < 0.0)) {
      throw std::range_error(
          "dirichlet_mle: statistic outside feasible range (component >= 0)");
    }
    sum_exp += std::exp(s);
  }
  if (sum_exp > 1.0) {
    throw std::range_error(
        "dirichlet_mle: statistic outside feasible range (sum exp = " +
        std::to_string(sum_exp) + " > 1)");
  }
  std::vector<double> alpha(d, 1.0);
  double alpha_sum = static_cast<double>(d);
  for (int it = 0; it < 10000; ++it) {
    const double psi_sum = digamma(alpha_sum);
    double max_change = 0.0;
    double new_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double next = digamma_inverse(psi_sum + stat.values[j]);
      max_change = std::max(max_change, std::abs(next - alpha[j]));
      alpha[j] = next;
      new_sum += next;
    }
    alpha_sum = new_sum;
    if (max_change < 1e-10) {
      return DirichletParams(std::move(alpha));
    }
  }
  throw std::runtime_error(
      "dirichlet_mle: fixed-point iteration did not converge in 10000 steps");
}

std::vector<double> mean_composition(const DirichletParams& params) {
  const double total = params.sum();
  std::vector<double> out(params.alpha);
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> expected_sufficient_stat(const DirichletParams& params) {
  const double psi_sum = digamma(params.sum());
  std::vector<double> out(params.dimension());
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    out[j] = digamma(params.alpha[j]) - psi_sum;
  }
  return out;
}

}  // namespace dpdir
