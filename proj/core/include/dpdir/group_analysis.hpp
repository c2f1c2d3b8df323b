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

#ifndef DPDIR_GROUP_ANALYSIS_HPP_
#define DPDIR_GROUP_ANALYSIS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dpdir/mechanisms.hpp"
#include "dpdir/methods.hpp"
#include "dpdir/simulation.hpp"

namespace dpdir {

struct GroupAnalysisConfig {
  double margin = 0.01;
  double epsilon = 0.5;
  double ci_level = 0.95;
  SplitPolicy split;
  ThresholdCandidates candidates = default_candidates();
  SelectorPolicy selector;
  std::size_t runs = 10;
  std::vector<std::string> methods = {"dpboots", "dpmcmc_p1", "dpremcmc_p4",
                                      "dpabc_p5"};
  MethodOptions method_options;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;

  void validate() const;
};

struct GroupComponentDecision {
  std::size_t component = 0;
  double mean_group_a = 0.0;       // averaged over runs
  double mean_group_b = 0.0;
  double reject_fraction = 0.0;    // fraction of runs rejecting H0
  double avg_posterior_prob = 0.0; // P(H0 | release); NaN for bootstrap
};

struct GroupMethodReport {
  std::string method;
  bool non_private = false;
  std::size_t failed_runs = 0;
  std::vector<GroupComponentDecision> components;
};

struct GroupAnalysisResult {
  std::string group_a;
  std::string group_b;
  std::size_t n_group_a = 0;
  std::size_t n_group_b = 0;
  std::size_t dropped_zero_rows = 0;
  // Parallel composition across the two disjoint groups: the whole analysis
  // costs epsilon, not 2 epsilon.
  double combined_budget = 0.0;
  std::vector<GroupMethodReport> methods;
};

// Runs the two-group difference-in-means analysis: per run and per group an
// independent release at the full budget, inference with every requested
// method, and per-component decisions on H0: |mean difference| <= margin
// (interval tests for the bootstrap methods, posterior probability < 0.5
// for the Bayesian ones).
GroupAnalysisResult analyze_groups(const CompositionalDataset& data,
                                   const std::vector<std::string>& labels,
                                   const GroupAnalysisConfig& config);

std::string group_result_to_json(const GroupAnalysisResult& result);
void write_group_result_csv(const GroupAnalysisResult& result,
                            const std::string& path);

}  // namespace dpdir

#endif  // DPDIR_GROUP_ANALYSIS_HPP_
