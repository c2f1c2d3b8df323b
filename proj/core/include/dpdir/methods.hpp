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

#ifndef DPDIR_METHODS_HPP_
#define DPDIR_METHODS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dpdir/bootstrap.hpp"
#include "dpdir/mechanisms.hpp"
#include "dpdir/priors.hpp"
#include "dpdir/samplers.hpp"

namespace dpdir {

// A named inference method: an engine plus (for the Bayesian engines) a
// prior construction. Names look like "dpboots", "mcmc_p1", "dpremcmc_p4".
struct MethodSpec {
  enum class Engine {
    kBoots,      // non-private parametric bootstrap benchmark
    kDpBoots,    // bootstrap against the released statistic
    kMcmcBench,  // non-private posterior benchmark
    kDpMcmc,
    kDpReMcmc,
    kDpAbc,
    kDpApprox,
  };

  Engine engine = Engine::kDpBoots;
  std::string prior_label;  // "p1".."p5"; empty for bootstrap engines

  static MethodSpec parse(const std::string& name);
  std::string name() const;

  bool non_private() const {
    return engine == Engine::kBoots || engine == Engine::kMcmcBench;
  }
  // Bayesian engines on a data-split prior consume the partitioned release;
  // everything else consumes the single-statistic release.
  bool uses_split_release() const;
  // Stable stream id (independent of any method-list ordering).
  std::uint64_t stream_id() const;
};

struct MethodOptions {
  SamplerSettings sampler;
  std::size_t bootstrap_draws = 1000;
  std::size_t abc_simulations = 10000;
  double abc_accept_rate = 0.1;
  std::size_t prior_pool_size = 1000;
  BootstrapOptions bootstrap_options;
};

// Lazily builds and caches the priors derived from the first partition of a
// partitioned release. p1 never needs the release. The cache is built with
// fixed derived streams so results do not depend on construction order.
class PriorBuilder {
 public:
  PriorBuilder(std::size_t dimension, const DPRelease* split_release,
               const MethodOptions& options, Rng base);

  const Prior& get(const std::string& label);

 private:
  const Prior& pool_p2();

  std::size_t dimension_;
  const DPRelease* split_release_;
  MethodOptions options_;
  Rng base_;
  std::map<std::string, Prior> cache_;
};

struct MethodOutcome {
  PosteriorSample sample;
  double selected_a = 0.0;  // NaN for non-private engines
  bool non_private = false;
};

// Runs one method. `confidential` is needed only by the non-private
// benchmarks; the DP engines consume only the release artifacts.
MethodOutcome run_method(const MethodSpec& spec,
                         const CompositionalDataset* confidential,
                         const DPRelease* full_release,
                         const DPRelease* split_release, PriorBuilder* priors,
                         const MethodOptions& options, Rng rng);

}  // namespace dpdir

#endif  // DPDIR_METHODS_HPP_
