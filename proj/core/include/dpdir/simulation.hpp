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

#ifndef DPDIR_SIMULATION_HPP_
#define DPDIR_SIMULATION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "dpdir/mechanisms.hpp"
#include "dpdir/methods.hpp"

namespace dpdir {

struct SplitPolicy {
  double eps1_frac = 0.25;
  double eps2_frac = 0.75;
  double n1_frac = 0.25;
  double n2_frac = 0.75;

  void validate() const;  // fractions in (0,1), each pair summing to 1
};

struct SimulationConfig {
  int version = 1;
  std::vector<std::vector<double>> alphas;
  std::vector<std::size_t> n_list;
  std::vector<double> eps_list;
  SplitPolicy split;
  ThresholdCandidates candidates = default_candidates();
  SelectorPolicy selector;
  std::size_t replicates = 50;
  std::vector<std::string> methods;
  MethodOptions method_options;
  std::size_t predictive_per_draw = 5;
  std::size_t coverage_truth_draws = 20000;
  std::uint64_t master_seed = 1;
  unsigned threads = 1;

  void validate() const;
};

SimulationConfig simulation_config_from_json(const std::string& text);
std::string simulation_config_to_json(const SimulationConfig& config);

// The full factorial study this library was built around: five parameter
// vectors, n in {1000, 5000}, budgets {0.25, 0.5, 1.5, 1e10} with the 25/75
// budget and sample splits, six candidate thresholds, 50 replicates.
SimulationConfig paper_grid_config();

struct SimulationRow {
  std::string alpha_id;  // "alpha1", "alpha2", ... by config order
  std::size_t n = 0;
  double eps = 0.0;
  std::size_t replicate = 0;
  std::string method;
  double mse_alpha = 0.0;
  double mse_mean = 0.0;
  double rhat_max = 0.0;      // NaN for bootstrap engines
  double coverage = 0.0;      // NaN for bootstrap engines
  double runtime_ms = 0.0;
  double selected_a = 0.0;    // NaN for non-private engines
  bool non_private = false;
  bool ok = true;
  std::string error;
};

// Runs the full grid: per (alpha, n, eps, replicate) simulate a dataset,
// produce the single-statistic and partitioned releases, then run every
// requested method against them. Failures are recorded per row and never
// abort the grid.
std::vector<SimulationRow> run_simulation(const SimulationConfig& config);

// results.csv (successful rows) plus an errors sidecar when failures exist.
void write_results_csv(const std::vector<SimulationRow>& rows,
                       const std::string& path);
// Median summary per (alpha_id, n, eps, method) with per-panel
// max-normalized columns.
void write_summary_csv(const std::vector<SimulationRow>& rows,
                       const std::string& path);

}  // namespace dpdir

#endif  // DPDIR_SIMULATION_HPP_
