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

#include "dpdir/mechanisms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dpdir {

double laplace_scale(double a, std::size_t n, std::size_t d, double eps1) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("laplace_scale: threshold must lie in (0, 1)");
  }
  if (n < 1 || d < 1) {
    throw std::invalid_argument("laplace_scale: n and d must be >= 1");
  }
  if (!(eps1 > 0.0)) {
    throw std::invalid_argument("laplace_scale: eps1 must be positive");
  }
  return -static_cast<double>(d) * std::log(a) /
         (static_cast<double>(n) * eps1);
}

double laplace_draw(Rng& rng, double scale) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("laplace_draw: scale must be positive");
  }
  const double u = rng.uniform01() - 0.5;
  const double sign = (u >= 0.0) ? 1.0 : -1.0;
  return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

std::vector<double> laplace_vector(Rng& rng, double scale, std::size_t count) {
  std::vector<double> out(count);
  for (double& v : out) v = laplace_draw(rng, scale);
  return out;
}

double laplace_log_pdf(double x, double center, double scale) {
  return -std::abs(x - center) / scale - std::log(2.0 * scale);
}

TwoSidedGeometric::TwoSidedGeometric(double t) : t_(t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw std::invalid_argument(
        "TwoSidedGeometric: parameter must lie in [0, 1)");
  }
}

double TwoSidedGeometric::pmf(long long k) const {
  if (t_ == 0.0) return (k == 0) ? 1.0 : 0.0;
  return std::pow(t_, static_cast<double>(std::llabs(k))) * (1.0 - t_) /
         (1.0 + t_);
}

double TwoSidedGeometric::tail_at_least(long long k) const {
  if (t_ == 0.0) return (k <= 0) ? 1.0 : 0.0;
  // P(X >= k) = t^k / (1+t) for k >= 1; symmetry handles the rest.
  if (k >= 1) return std::pow(t_, static_cast<double>(k)) / (1.0 + t_);
  return 1.0 - std::pow(t_, static_cast<double>(1 - k)) / (1.0 + t_);
}

double TwoSidedGeometric::cdf(long long k) const { return tail_at_least(-k); }

long long TwoSidedGeometric::draw(Rng& rng) const {
  if (t_ == 0.0) return 0;
  // Difference of two geometric variates on {0, 1, ...}.
  const double log_t = std::log(t_);
  const auto geometric = [&]() -> long long {
    return static_cast<long long>(
        std::floor(std::log(rng.uniform01()) / log_t));
  };
  return geometric() - geometric();
}

std::pair<long long, long long> TwoSidedGeometric::quantile_pair(
    double tail) const {
  if (!(tail > 0.0 && tail < 0.5)) {
    throw std::invalid_argument(
        "TwoSidedGeometric: tail probability must lie in (0, 0.5)");
  }
  if (t_ == 0.0) return {0, 0};
  // Largest k >= 0 with P(X >= k) >= tail; closed form from the tail
  // formula t^k/(1+t) >= tail, checked exactly to avoid edge rounding.
  long long k = 0;
  if (tail <= 1.0 / (1.0 + t_)) {
    k = static_cast<long long>(
        std::floor(std::log(tail * (1.0 + t_)) / std::log(t_)));
    k = std::max<long long>(k, 0);
    while (tail_at_least(k + 1) >= tail) ++k;
    while (k > 0 && tail_at_least(k) < tail) --k;
  }
  return {-k, k};
}

ThresholdCandidates::ThresholdCandidates(std::vector<double> v)
    : values(std::move(v)) {
  if (values.empty()) {
    throw std::invalid_argument("ThresholdCandidates: need at least one");
  }
  for (std::size_t m = 0; m < values.size(); ++m) {
    if (!(values[m] > 0.0 && values[m] < 1.0)) {
      throw std::invalid_argument(
          "ThresholdCandidates: values must lie in (0, 1)");
    }
    if (m > 0 && !(values[m] < values[m - 1])) {
      throw std::invalid_argument(
          "ThresholdCandidates: values must be strictly decreasing");
    }
  }
}

ThresholdCandidates default_candidates() {
  return ThresholdCandidates({1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6});
}

std::vector<long long> score(const CompositionalDataset& data,
                             const ThresholdCandidates& candidates) {
  const std::size_t n = data.record_count();
  const std::size_t m_count = candidates.size();
  std::vector<long long> uncensored(m_count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = data.row(i);
    const double row_min = *std::min_element(row.begin(), row.end());
    for (std::size_t m = 0; m < m_count; ++m) {
      if (row_min >= candidates.values[m]) ++uncensored[m];
    }
  }
  std::vector<long long> out(m_count);
  long long prev = 0;
  for (std::size_t m = 0; m < m_count; ++m) {
    out[m] = uncensored[m] - prev;
    prev = uncensored[m];
  }
  return out;
}

std::vector<long long> dp_score(const CompositionalDataset& data,
                                const ThresholdCandidates& candidates,
                                double eps2, Rng& rng) {
  if (!(eps2 > 0.0)) {
    throw std::invalid_argument("dp_score: eps2 must be positive");
  }
  const TwoSidedGeometric noise(std::exp(-eps2 / 2.0));
  std::vector<long long> out = score(data, candidates);
  for (long long& s : out) s += noise.draw(rng);
  return out;
}

double select_threshold(const std::vector<long long>& noisy_score,
                        std::size_t n, double eps2,
                        const ThresholdCandidates& candidates,
                        const SelectorPolicy& policy) {
  if (noisy_score.size() != candidates.size()) {
    throw std::invalid_argument("select_threshold: score/candidate mismatch");
  }
  const TwoSidedGeometric noise(std::exp(-eps2 / 2.0));
  const auto [q_lo, q_hi] = noise.quantile_pair();
  // Integer score plus integer quantile against a fractional cut; the 1e-9
  // slack keeps exact boundary cases (score + quantile == ceil(frac * n))
  // on the >= side despite float rounding of frac * n.
  const double nd = static_cast<double>(n);
  const auto at_least = [](double lhs, double rhs) {
    return lhs >= rhs - 1e-9;
  };
  if (at_least(static_cast<double>(noisy_score[0] + q_hi),
               policy.high_frac * nd)) {
    return candidates.values[0];
  }
  for (std::size_t m = 1; m < candidates.size(); ++m) {
    if (at_least(static_cast<double>(noisy_score[m] - q_lo),
                 policy.low_frac * nd)) {
      return candidates.values[m];  // largest member of the feasible set
    }
  }
  return policy.fallback == SelectorPolicy::Fallback::kLastCandidate
             ? candidates.values.back()
             : candidates.values.front();
}

void PrivacyBudget::record_sequential(std::string mechanism, double epsilon) {
  entries_.push_back({std::move(mechanism), epsilon, "sequential"});
}

void PrivacyBudget::record_parallel(std::string mechanism, double epsilon,
                                    const std::string& group) {
  entries_.push_back({std::move(mechanism), epsilon, "parallel:" + group});
}

double PrivacyBudget::total() const {
  double total = 0.0;
  std::vector<std::string> seen_groups;
  for (const BudgetEntry& e : entries_) {
    if (e.composition == "sequential") {
      total += e.epsilon;
      continue;
    }
    if (std::find(seen_groups.begin(), seen_groups.end(), e.composition) !=
        seen_groups.end()) {
      continue;
    }
    seen_groups.push_back(e.composition);
    double group_max = 0.0;
    for (const BudgetEntry& other : entries_) {
      if (other.composition == e.composition) {
        group_max = std::max(group_max, other.epsilon);
      }
    }
    total += group_max;
  }
  return total;
}

double parallel_combined_total(const std::vector<PrivacyBudget>& budgets) {
  double combined = 0.0;
  for (const PrivacyBudget& b : budgets) combined = std::max(combined, b.total());
  return combined;
}

DPRelease release(const CompositionalDataset& data,
                  const ThresholdCandidates& candidates, double eps1,
                  double eps2, std::size_t n1, std::size_t n2, Rng& rng,
                  const SelectorPolicy& policy) {
  const std::size_t n = data.record_count();
  const std::size_t d = data.component_count();
  if (!(eps1 > 0.0 && eps2 > 0.0)) {
    throw std::invalid_argument("release: eps1 and eps2 must be positive");
  }
  if (n1 > 0 && n1 + n2 != n) {
    throw std::invalid_argument(
        "release: partition sizes must satisfy n1 + n2 = n");
  }

  DPRelease out;
  out.d = d;
  out.n = n;
  out.candidates = candidates;
  out.budget = PrivacyBudget(eps1, eps2);
  out.rng_seed = rng.seed();

  out.noisy_score = dp_score(data, candidates, eps2, rng);
  out.budget.record_sequential("two_sided_geometric(score)", eps2);
  out.selected_a = select_threshold(out.noisy_score, n, eps2, candidates, policy);
  const double a = out.selected_a;

  if (n1 == 0) {
    SufficientStatistic stat = sufficient_stat(data, a);
    const double scale = laplace_scale(a, n, d, eps1);
    const std::vector<double> noise = laplace_vector(rng, scale, d);
    for (std::size_t j = 0; j < d; ++j) stat.values[j] += noise[j];
    out.statistics.push_back({std::move(stat), scale});
    out.budget.record_sequential("laplace(statistic)", eps1);
    return out;
  }

  // Uniform random split; only the partition sizes are released.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i-- > 1;) {
    std::swap(perm[i], perm[rng.uniform_below(i + 1)]);
  }
  const std::array<std::pair<std::size_t, std::size_t>, 2> parts = {
      std::make_pair(std::size_t{0}, n1), std::make_pair(n1, n)};
  for (int l = 0; l < 2; ++l) {
    const std::size_t size = parts[l].second - parts[l].first;
    Matrix rows(size, d);
    for (std::size_t i = 0; i < size; ++i) {
      const auto src = data.row(perm[parts[l].first + i]);
      std::copy(src.begin(), src.end(), rows.row(i).begin());
    }
    const CompositionalDataset part = CompositionalDataset::trusted(std::move(rows));
    SufficientStatistic stat = sufficient_stat(part, a);
    const double scale = laplace_scale(a, size, d, eps1);
    const std::vector<double> noise = laplace_vector(rng, scale, d);
    for (std::size_t j = 0; j < d; ++j) stat.values[j] += noise[j];
    out.statistics.push_back({std::move(stat), scale});
    out.budget.record_parallel(
        l == 0 ? "laplace(statistic_partition_1)" : "laplace(statistic_partition_2)",
        eps1, "partitioned_statistic");
  }
  return out;
}

}  // namespace dpdir
