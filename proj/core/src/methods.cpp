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

#include "dpdir/methods.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpdir {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

PosteriorSample bootstrap_as_sample(BootstrapDraws&& draws,
                                    std::string method) {
  PosteriorSample out;
  out.method = std::move(method);
  out.chain_ids.assign(draws.draws.rows, 0);
  out.diagnostics.seed = draws.meta.seed;
  out.diagnostics.retained_per_chain = draws.draws.rows;
  out.diagnostics.rhat_max = kNan;
  out.draws = std::move(draws.draws);
  return out;
}

int prior_index(const std::string& label) {
  if (label.empty()) return 0;
  if (label.size() == 2 && label[0] == 'p' && label[1] >= '1' &&
      label[1] <= '5') {
    return label[1] - '0';
  }
  throw std::invalid_argument("MethodSpec: unknown prior '" + label + "'");
}

}  // namespace

MethodSpec MethodSpec::parse(const std::string& name) {
  MethodSpec spec;
  const auto underscore = name.find('_');
  const std::string engine_name =
      underscore == std::string::npos ? name : name.substr(0, underscore);
  spec.prior_label =
      underscore == std::string::npos ? "" : name.substr(underscore + 1);
  if (engine_name == "boots") {
    spec.engine = Engine::kBoots;
  } else if (engine_name == "dpboots") {
    spec.engine = Engine::kDpBoots;
  } else if (engine_name == "mcmc") {
    spec.engine = Engine::kMcmcBench;
  } else if (engine_name == "dpmcmc") {
    spec.engine = Engine::kDpMcmc;
  } else if (engine_name == "dpremcmc") {
    spec.engine = Engine::kDpReMcmc;
  } else if (engine_name == "dpabc") {
    spec.engine = Engine::kDpAbc;
  } else if (engine_name == "dpapprox") {
    spec.engine = Engine::kDpApprox;
  } else {
    throw std::invalid_argument("MethodSpec: unknown method '" + name + "'");
  }
  const bool bootstrap_engine =
      spec.engine == Engine::kBoots || spec.engine == Engine::kDpBoots;
  if (bootstrap_engine && !spec.prior_label.empty()) {
    throw std::invalid_argument("MethodSpec: '" + engine_name +
                                "' takes no prior suffix");
  }
  if (!bootstrap_engine) {
    if (spec.prior_label.empty()) {
      throw std::invalid_argument("MethodSpec: '" + engine_name +
                                  "' needs a prior suffix (e.g. _p1)");
    }
    (void)prior_index(spec.prior_label);  // validates
    if (spec.engine == Engine::kMcmcBench && spec.prior_label != "p1") {
      throw std::invalid_argument("MethodSpec: benchmark mcmc supports p1 only");
    }
    const int idx = prior_index(spec.prior_label);
    if ((spec.engine == Engine::kDpMcmc || spec.engine == Engine::kDpReMcmc ||
         spec.engine == Engine::kDpApprox) &&
        (idx == 2 || idx == 5)) {
      throw std::invalid_argument(
          "MethodSpec: pool priors (p2, p5) have no analytic density; use "
          "them with dpabc");
    }
  }
  return spec;
}

std::string MethodSpec::name() const {
  std::string base;
  switch (engine) {
    case Engine::kBoots: base = "boots"; break;
    case Engine::kDpBoots: base = "dpboots"; break;
    case Engine::kMcmcBench: base = "mcmc"; break;
    case Engine::kDpMcmc: base = "dpmcmc"; break;
    case Engine::kDpReMcmc: base = "dpremcmc"; break;
    case Engine::kDpAbc: base = "dpabc"; break;
    case Engine::kDpApprox: base = "dpapprox"; break;
  }
  return prior_label.empty() ? base : base + "_" + prior_label;
}

bool MethodSpec::uses_split_release() const {
  switch (engine) {
    case Engine::kBoots:
    case Engine::kMcmcBench:
      return false;
    case Engine::kDpBoots:
      return false;
    case Engine::kDpReMcmc:
      return true;  // the rescaled likelihood targets the split model
    case Engine::kDpMcmc:
    case Engine::kDpApprox:
    case Engine::kDpAbc:
      return prior_label != "p1";  // p1 targets the single-statistic model
  }
  return false;
}

std::uint64_t MethodSpec::stream_id() const {
  return static_cast<std::uint64_t>(engine) * 8 +
         static_cast<std::uint64_t>(prior_index(prior_label));
}

PriorBuilder::PriorBuilder(std::size_t dimension,
                           const DPRelease* split_release,
                           const MethodOptions& options, Rng base)
    : dimension_(dimension),
      split_release_(split_release),
      options_(options),
      base_(base) {}

const Prior& PriorBuilder::pool_p2() {
  auto it = cache_.find("p2");
  if (it != cache_.end()) return it->second;
  if (split_release_ == nullptr || !split_release_->partitioned()) {
    throw std::invalid_argument(
        "PriorBuilder: priors p2-p5 need a partitioned release");
  }
  const ReleasedStatistic& part1 = split_release_->statistics[0];
  Rng rng = base_.derive(0);
  Prior p2 = make_p2(part1.stat, split_release_->budget.eps1(),
                     split_release_->selected_a, part1.stat.basis_count,
                     options_.prior_pool_size, rng);
  return cache_.emplace("p2", std::move(p2)).first->second;
}

const Prior& PriorBuilder::get(const std::string& label) {
  auto it = cache_.find(label);
  if (it != cache_.end()) return it->second;
  if (label == "p1") {
    return cache_.emplace("p1", make_p1(dimension_)).first->second;
  }
  if (label == "p2") return pool_p2();
  if (label == "p3") {
    return cache_.emplace("p3", make_p3(pool_p2())).first->second;
  }
  if (label == "p4") {
    return cache_.emplace("p4", make_p4(pool_p2())).first->second;
  }
  if (label == "p5") {
    if (split_release_ == nullptr || !split_release_->partitioned()) {
      throw std::invalid_argument(
          "PriorBuilder: priors p2-p5 need a partitioned release");
    }
    const ReleasedStatistic& part1 = split_release_->statistics[0];
    Rng rng = base_.derive(1);
    SamplerSettings inner = options_.sampler;
    inner.total_draws = std::max<std::size_t>(options_.prior_pool_size, 1000);
    Prior p5 =
        make_p5(part1.stat, split_release_->budget.eps1(),
                split_release_->selected_a, part1.stat.basis_count,
                get("p1"), inner, rng);
    return cache_.emplace("p5", std::move(p5)).first->second;
  }
  throw std::invalid_argument("PriorBuilder: unknown prior '" + label + "'");
}

MethodOutcome run_method(const MethodSpec& spec,
                         const CompositionalDataset* confidential,
                         const DPRelease* full_release,
                         const DPRelease* split_release, PriorBuilder* priors,
                         const MethodOptions& options, Rng rng) {
  MethodOutcome out;
  out.non_private = spec.non_private();

  const auto require = [](const void* p, const char* what) {
    if (p == nullptr) {
      throw std::invalid_argument(std::string("run_method: ") + what);
    }
  };

  switch (spec.engine) {
    case MethodSpec::Engine::kBoots: {
      require(confidential, "non-private benchmark needs the raw data");
      const SufficientStatistic plain =
          sufficient_stat(*confidential, std::nullopt);
      out.sample = bootstrap_as_sample(
          parametric_bootstrap(plain, confidential->record_count(),
                               options.bootstrap_draws, rng),
          "boots");
      out.selected_a = kNan;
      return out;
    }
    case MethodSpec::Engine::kMcmcBench: {
      require(confidential, "non-private benchmark needs the raw data");
      require(priors, "prior builder required");
      const SufficientStatistic plain =
          sufficient_stat(*confidential, std::nullopt);
      out.sample = mcmc_benchmark(plain, confidential->record_count(),
                                  priors->get("p1"), options.sampler, rng);
      out.selected_a = kNan;
      return out;
    }
    case MethodSpec::Engine::kDpBoots: {
      require(full_release, "dpboots needs a single-statistic release");
      if (full_release->partitioned()) {
        throw std::invalid_argument(
            "run_method: dpboots expects an unpartitioned release");
      }
      const ReleasedStatistic& stat = full_release->statistics[0];
      out.sample = bootstrap_as_sample(
          dp_bootstrap(stat.stat, full_release->budget.eps1(),
                       full_release->selected_a, full_release->n,
                       options.bootstrap_draws, rng,
                       options.bootstrap_options),
          "dpboots");
      out.selected_a = full_release->selected_a;
      return out;
    }
    default:
      break;
  }

  // Bayesian engines.
  require(priors, "prior builder required");
  const bool split = spec.uses_split_release();
  const DPRelease* release = split ? split_release : full_release;
  require(release, split ? "method needs the partitioned release"
                         : "method needs the single-statistic release");
  if (split && !release->partitioned()) {
    throw std::invalid_argument(
        "run_method: method '" + spec.name() + "' needs a partitioned release");
  }
  if (!split && release->partitioned()) {
    throw std::invalid_argument(
        "run_method: method '" + spec.name() +
        "' needs an unpartitioned release");
  }
  const ReleasedStatistic& stat =
      split ? release->statistics[1] : release->statistics[0];
  const std::size_t n_basis = stat.stat.basis_count;
  const double eps1 = release->budget.eps1();
  const double a = release->selected_a;
  const Prior& prior = priors->get(spec.prior_label);
  out.selected_a = a;

  switch (spec.engine) {
    case MethodSpec::Engine::kDpMcmc:
      out.sample = dpmcmc(stat.stat, a, eps1, n_basis, prior, options.sampler,
                          rng);
      return out;
    case MethodSpec::Engine::kDpReMcmc:
      out.sample = dpremcmc(stat.stat, a, eps1, n_basis,
                            options.sampler.pseudo_records, prior,
                            options.sampler, rng);
      return out;
    case MethodSpec::Engine::kDpAbc:
      out.sample = dpabc(stat.stat, a, eps1, n_basis, prior,
                         options.abc_simulations, options.abc_accept_rate,
                         rng);
      return out;
    case MethodSpec::Engine::kDpApprox:
      out.sample = dpapprox(stat.stat, a, eps1, n_basis, prior,
                            options.sampler, rng);
      return out;
    default:
      throw std::logic_error("run_method: unreachable engine");
  }
}

}  // namespace dpdir
