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

#ifndef DPDIR_MECHANISMS_HPP_
#define DPDIR_MECHANISMS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dpdir/dirichlet.hpp"
#include "dpdir/rng.hpp"

namespace dpdir {

// Laplace noise scale for the censored log statistic: -d log(a) / (n eps).
double laplace_scale(double a, std::size_t n, std::size_t d, double eps1);

// Laplace(0, scale) by inverse CDF.
double laplace_draw(Rng& rng, double scale);
std::vector<double> laplace_vector(Rng& rng, double scale, std::size_t count);
double laplace_log_pdf(double x, double center, double scale);

// Two-sided geometric (discrete Laplace) distribution with pmf
// t^|k| (1-t)/(1+t). t == 0 is accepted as the degenerate point mass at 0,
// which is what exp(-eps/2) underflows to for enormous budgets.
class TwoSidedGeometric {
 public:
  explicit TwoSidedGeometric(double t);

  double t() const { return t_; }
  double pmf(long long k) const;
  double cdf(long long k) const;            // P(X <= k)
  double tail_at_least(long long k) const;  // P(X >= k)
  long long draw(Rng& rng) const;

  // Central interval quantiles (lo, hi): hi is the largest integer k with
  // P(X >= k) >= tail, and lo = -hi by symmetry, so that
  // [x + lo, x + hi] is a central >= (1 - 2 tail) interval for the noised x.
  std::pair<long long, long long> quantile_pair(double tail = 0.025) const;

 private:
  double t_;
};

// Strictly decreasing candidate censoring thresholds in (0, 1).
struct ThresholdCandidates {
  std::vector<double> values;

  ThresholdCandidates() = default;
  explicit ThresholdCandidates(std::vector<double> v);  // validates

  std::size_t size() const { return values.size(); }
};

// Default candidate list used throughout: (0.1, 1e-2, ..., 1e-6).
ThresholdCandidates default_candidates();

// Score: s_m = u_m - u_{m-1} where u_m counts records whose smallest
// component is >= a_m (u_0 = 0).
std::vector<long long> score(const CompositionalDataset& data,
                             const ThresholdCandidates& candidates);

// Score plus iid two-sided geometric noise at t = exp(-eps2 / 2)
// (the score has global sensitivity 2).
std::vector<long long> dp_score(const CompositionalDataset& data,
                                const ThresholdCandidates& candidates,
                                double eps2, Rng& rng);

struct SelectorPolicy {
  double high_frac = 0.99;
  double low_frac = 0.01;
  // Fallback when no candidate clears either test. The displayed selection
  // rule falls through to the last (smallest) candidate; the surrounding
  // prose instead returns the first. Both readings are supported.
  enum class Fallback { kLastCandidate, kFirstCandidate };
  Fallback fallback = Fallback::kLastCandidate;
};

// Deterministic threshold selection from the noisy score.
double select_threshold(const std::vector<long long>& noisy_score,
                        std::size_t n, double eps2,
                        const ThresholdCandidates& candidates,
                        const SelectorPolicy& policy = {});

struct BudgetEntry {
  std::string mechanism;
  double epsilon = 0.0;
  // "sequential", or "parallel:<group>" for mechanisms running on disjoint
  // partitions (combined by max within a group).
  std::string composition;
};

// Append-only privacy accounting. Not thread-safe: a ledger has a single
// writer; independent releases use independent ledgers.
class PrivacyBudget {
 public:
  PrivacyBudget() = default;
  PrivacyBudget(double eps1, double eps2) : eps1_(eps1), eps2_(eps2) {}

  void record_sequential(std::string mechanism, double epsilon);
  void record_parallel(std::string mechanism, double epsilon,
                       const std::string& group);

  double eps1() const { return eps1_; }
  double eps2() const { return eps2_; }
  const std::vector<BudgetEntry>& entries() const { return entries_; }

  // Sequential entries add; entries sharing a parallel group contribute
  // their maximum.
  double total() const;

 private:
  double eps1_ = 0.0;
  double eps2_ = 0.0;
  std::vector<BudgetEntry> entries_;
};

// Budget of several mechanisms applied to disjoint datasets (max).
double parallel_combined_total(const std::vector<PrivacyBudget>& budgets);

struct ReleasedStatistic {
  SufficientStatistic stat;
  double noise_scale = 0.0;
};

// The public artifact: everything downstream inference consumes. No raw
// record ever crosses this boundary.
struct DPRelease {
  int version = 1;
  std::size_t d = 0;
  std::size_t n = 0;
  ThresholdCandidates candidates;
  std::vector<long long> noisy_score;
  double selected_a = 0.0;
  std::vector<ReleasedStatistic> statistics;  // one, or two when partitioned
  PrivacyBudget budget;
  std::uint64_t rng_seed = 0;

  bool partitioned() const { return statistics.size() == 2; }
};

// Selects the censoring threshold from the noisy score and releases the
// noise-protected statistic. With n1 == 0 a single statistic over all n
// records is released; otherwise the data are split uniformly at random
// into partitions of sizes n1 and n2 (n1 + n2 == n) and one statistic per
// partition is released, each noised at its own partition scale. Total
// budget is eps1 + eps2 either way.
DPRelease release(const CompositionalDataset& data,
                  const ThresholdCandidates& candidates, double eps1,
                  double eps2, std::size_t n1, std::size_t n2, Rng& rng,
                  const SelectorPolicy& policy = {});

// Serialization of DPRelease to/from a versioned JSON document.
std::string release_to_json(const DPRelease& release);
DPRelease release_from_json(const std::string& text);
void save_release(const DPRelease& release, const std::string& path);
DPRelease load_release(const std::string& path);

}  // namespace dpdir

#endif  // DPDIR_MECHANISMS_HPP_
