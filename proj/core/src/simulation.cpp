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

#include "dpdir/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>
#include <thread>

#include "dpdir/diagnostics.hpp"
#include "json.hpp"

namespace dpdir {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Streams consumed per replicate.
constexpr std::uint64_t kDataStream = 0;
constexpr std::uint64_t kFullReleaseStream = 1;
constexpr std::uint64_t kSplitReleaseStream = 2;
constexpr std::uint64_t kPriorStream = 3;
constexpr std::uint64_t kCoverageStream = 4;
constexpr std::uint64_t kMethodStreamBase = 16;

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SplitPolicy::validate() const {
  const auto frac = [](double v) { return v > 0.0 && v < 1.0; };
  if (!frac(eps1_frac) || !frac(eps2_frac) || !frac(n1_frac) || !frac(n2_frac)) {
    throw std::invalid_argument("SplitPolicy: fractions must lie in (0, 1)");
  }
  if (std::abs(eps1_frac + eps2_frac - 1.0) > 1e-12 ||
      std::abs(n1_frac + n2_frac - 1.0) > 1e-12) {
    throw std::invalid_argument("SplitPolicy: fraction pairs must sum to 1");
  }
}

void SimulationConfig::validate() const {
  if (alphas.empty() || n_list.empty() || eps_list.empty() || methods.empty()) {
    throw std::invalid_argument(
        "SimulationConfig: alphas, n_list, eps_list, and methods are required");
  }
  for (const auto& a : alphas) {
    (void)DirichletParams(a);  // validates
    if (a.size() < 2) {
      throw std::invalid_argument("SimulationConfig: alpha needs d >= 2");
    }
  }
  for (std::size_t n : n_list) {
    if (n < 4) throw std::invalid_argument("SimulationConfig: n too small");
  }
  for (double e : eps_list) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("SimulationConfig: eps must be positive");
    }
  }
  if (replicates < 1) {
    throw std::invalid_argument("SimulationConfig: replicates >= 1");
  }
  split.validate();
  for (const std::string& m : methods) (void)MethodSpec::parse(m);
  method_options.sampler.validate();
}

SimulationConfig simulation_config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SimulationConfig cfg;
  cfg.version = j.value("version", 1);
  if (cfg.version != 1) {
    throw std::runtime_error("simulation config: unsupported version");
  }
  cfg.alphas = j.at("alphas").get<std::vector<std::vector<double>>>();
  cfg.n_list = j.at("n_list").get<std::vector<std::size_t>>();
  cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
  cfg.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("split")) {
    const auto& s = j.at("split");
    cfg.split.eps1_frac = s.value("eps1_frac", cfg.split.eps1_frac);
    cfg.split.eps2_frac = s.value("eps2_frac", cfg.split.eps2_frac);
    cfg.split.n1_frac = s.value("n1_frac", cfg.split.n1_frac);
    cfg.split.n2_frac = s.value("n2_frac", cfg.split.n2_frac);
  }
  if (j.contains("candidates")) {
    cfg.candidates =
        ThresholdCandidates(j.at("candidates").get<std::vector<double>>());
  }
  if (j.contains("selector")) {
    const auto& s = j.at("selector");
    cfg.selector.high_frac = s.value("high_frac", cfg.selector.high_frac);
    cfg.selector.low_frac = s.value("low_frac", cfg.selector.low_frac);
    const std::string fb = s.value("fallback", std::string("last"));
    cfg.selector.fallback = (fb == "first")
                                ? SelectorPolicy::Fallback::kFirstCandidate
                                : SelectorPolicy::Fallback::kLastCandidate;
  }
  cfg.replicates = j.value("replicates", cfg.replicates);
  if (j.contains("sampler")) {
    const auto& s = j.at("sampler");
    auto& sp = cfg.method_options.sampler;
    sp.chains = s.value("chains", sp.chains);
    sp.iterations = s.value("iterations", sp.iterations);
    sp.burn_in = s.value("burn_in", sp.burn_in);
    sp.total_draws = s.value("total_draws", sp.total_draws);
    sp.pseudo_records = s.value("pseudo_records", sp.pseudo_records);
  }
  cfg.method_options.bootstrap_draws =
      j.value("bootstrap_draws", cfg.method_options.bootstrap_draws);
  cfg.method_options.abc_simulations =
      j.value("abc_simulations", cfg.method_options.abc_simulations);
  cfg.method_options.abc_accept_rate =
      j.value("abc_accept_rate", cfg.method_options.abc_accept_rate);
  cfg.method_options.prior_pool_size =
      j.value("prior_pool_size", cfg.method_options.prior_pool_size);
  cfg.method_options.bootstrap_options.censored_refit = j.value(
      "bootstrap_censor_refit",
      cfg.method_options.bootstrap_options.censored_refit);
  cfg.predictive_per_draw = j.value("predictive_per_draw", cfg.predictive_per_draw);
  cfg.coverage_truth_draws =
      j.value("coverage_truth_draws", cfg.coverage_truth_draws);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.method_options.sampler.threads = 1;  // replicate-level parallelism only
  cfg.validate();
  return cfg;
}

std::string simulation_config_to_json(const SimulationConfig& cfg) {
  nlohmann::json j{
      {"version", cfg.version},
      {"alphas", cfg.alphas},
      {"n_list", cfg.n_list},
      {"eps_list", cfg.eps_list},
      {"methods", cfg.methods},
      {"split",
       {{"eps1_frac", cfg.split.eps1_frac},
        {"eps2_frac", cfg.split.eps2_frac},
        {"n1_frac", cfg.split.n1_frac},
        {"n2_frac", cfg.split.n2_frac}}},
      {"candidates", cfg.candidates.values},
      {"selector",
       {{"high_frac", cfg.selector.high_frac},
        {"low_frac", cfg.selector.low_frac},
        {"fallback",
         cfg.selector.fallback == SelectorPolicy::Fallback::kFirstCandidate
             ? "first"
             : "last"}}},
      {"replicates", cfg.replicates},
      {"sampler",
       {{"chains", cfg.method_options.sampler.chains},
        {"iterations", cfg.method_options.sampler.iterations},
        {"burn_in", cfg.method_options.sampler.burn_in},
        {"total_draws", cfg.method_options.sampler.total_draws},
        {"pseudo_records", cfg.method_options.sampler.pseudo_records}}},
      {"bootstrap_draws", cfg.method_options.bootstrap_draws},
      {"abc_simulations", cfg.method_options.abc_simulations},
      {"abc_accept_rate", cfg.method_options.abc_accept_rate},
      {"prior_pool_size", cfg.method_options.prior_pool_size},
      {"bootstrap_censor_refit",
       cfg.method_options.bootstrap_options.censored_refit},
      {"predictive_per_draw", cfg.predictive_per_draw},
      {"coverage_truth_draws", cfg.coverage_truth_draws},
      {"master_seed", cfg.master_seed},
      {"threads", cfg.threads}};
  return j.dump(2);
}

SimulationConfig paper_grid_config() {
  SimulationConfig cfg;
  cfg.alphas = {{3.3, 4.4},
                {0.5, 0.5, 0.5},
                {2.2, 3.3, 4.4},
                {2.0, 20.0, 2.0},
                {2.2, 3.3, 4.4, 5.5, 6.6}};
  cfg.n_list = {1000, 5000};
  cfg.eps_list = {0.25, 0.5, 1.5, 1e10};
  cfg.replicates = 50;
  cfg.methods = {"boots",       "dpboots",     "mcmc_p1",     "dpmcmc_p1",
                 "dpmcmc_p3",   "dpmcmc_p4",   "dpremcmc_p1", "dpremcmc_p3",
                 "dpremcmc_p4", "dpabc_p1",    "dpabc_p2",    "dpabc_p3",
                 "dpabc_p4",    "dpabc_p5",    "dpapprox_p1", "dpapprox_p3",
                 "dpapprox_p4"};
  return cfg;
}

namespace {

struct ReplicateTask {
  std::size_t alpha_idx;
  std::size_t n_idx;
  std::size_t eps_idx;
  std::size_t replicate;
};

bool method_is_bayesian(const MethodSpec& spec) {
  switch (spec.engine) {
    case MethodSpec::Engine::kMcmcBench:
    case MethodSpec::Engine::kDpMcmc:
    case MethodSpec::Engine::kDpReMcmc:
    case MethodSpec::Engine::kDpAbc:
    case MethodSpec::Engine::kDpApprox:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<SimulationRow> run_simulation(const SimulationConfig& config) {
  config.validate();
  std::vector<MethodSpec> specs;
  specs.reserve(config.methods.size());
  bool any_split = false;
  for (const std::string& m : config.methods) {
    specs.push_back(MethodSpec::parse(m));
    any_split = any_split || specs.back().uses_split_release() ||
                !specs.back().prior_label.empty();
  }

  std::vector<ReplicateTask> tasks;
  for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
    for (std::size_t ni = 0; ni < config.n_list.size(); ++ni) {
      for (std::size_t ei = 0; ei < config.eps_list.size(); ++ei) {
        for (std::size_t r = 0; r < config.replicates; ++r) {
          tasks.push_back({ai, ni, ei, r});
        }
      }
    }
  }

  const std::size_t method_count = specs.size();
  std::vector<SimulationRow> rows(tasks.size() * method_count);
  const Rng master(config.master_seed);

  const auto run_task = [&](std::size_t task_idx) {
    const ReplicateTask& task = tasks[task_idx];
    const DirichletParams alpha(config.alphas[task.alpha_idx]);
    const std::size_t n = config.n_list[task.n_idx];
    const double eps = config.eps_list[task.eps_idx];
    const double eps1 = config.split.eps1_frac * eps;
    const double eps2 = config.split.eps2_frac * eps;
    const std::size_t n1 = static_cast<std::size_t>(
        std::llround(config.split.n1_frac * static_cast<double>(n)));

    const Rng rep_rng = master.derive(task.alpha_idx)
                            .derive(task.n_idx)
                            .derive(task.eps_idx)
                            .derive(task.replicate);

    SimulationRow base;
    base.alpha_id = "alpha" + std::to_string(task.alpha_idx + 1);
    base.n = n;
    base.eps = eps;
    base.replicate = task.replicate;

    CompositionalDataset data;
    DPRelease full_release;
    DPRelease split_release;
    bool setup_ok = true;
    std::string setup_error;
    try {
      Rng data_rng = rep_rng.derive(kDataStream);
      data = dirichlet_sample(alpha, n, data_rng);
      Rng full_rng = rep_rng.derive(kFullReleaseStream);
      full_release = release(data, config.candidates, eps1, eps2, 0, 0,
                             full_rng, config.selector);
      if (any_split) {
        Rng split_rng = rep_rng.derive(kSplitReleaseStream);
        split_release = release(data, config.candidates, eps1, eps2, n1,
                                n - n1, split_rng, config.selector);
      }
    } catch (const std::exception& e) {
      setup_ok = false;
      setup_error = e.what();
    }

    PriorBuilder priors(alpha.dimension(), any_split ? &split_release : nullptr,
                        config.method_options, rep_rng.derive(kPriorStream));

    for (std::size_t mi = 0; mi < method_count; ++mi) {
      SimulationRow row = base;
      row.method = specs[mi].name();
      row.non_private = specs[mi].non_private();
      if (!setup_ok) {
        row.ok = false;
        row.error = setup_error;
        rows[task_idx * method_count + mi] = std::move(row);
        continue;
      }
      const auto started = std::chrono::steady_clock::now();
      try {
        Rng method_rng =
            rep_rng.derive(kMethodStreamBase + specs[mi].stream_id());
        MethodOutcome outcome =
            run_method(specs[mi], &data, &full_release, &split_release,
                       &priors, config.method_options, method_rng);
        row.mse_alpha = mse_alpha(outcome.sample.draws, alpha.alpha);
        row.mse_mean = mse_mean(outcome.sample.draws, alpha.alpha);
        row.rhat_max = outcome.sample.diagnostics.split_rhat.empty()
                           ? kNan
                           : outcome.sample.diagnostics.rhat_max;
        row.selected_a = outcome.selected_a;
        if (method_is_bayesian(specs[mi]) &&
            config.coverage_truth_draws > 0) {
          Rng cov_rng = rep_rng.derive(kCoverageStream)
                            .derive(specs[mi].stream_id());
          Matrix pred = posterior_predictive(
              outcome.sample, config.predictive_per_draw, cov_rng);
          Rng truth_rng = cov_rng.derive(1);
          row.coverage = predictive_coverage(pred, alpha, 0.95,
                                             config.coverage_truth_draws,
                                             truth_rng);
        } else {
          row.coverage = kNan;
        }
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      const auto finished = std::chrono::steady_clock::now();
      row.runtime_ms =
          std::chrono::duration<double, std::milli>(finished - started).count();
      rows[task_idx * method_count + mi] = std::move(row);
    }
  };

  const unsigned threads = std::max(1u, config.threads);
  if (threads <= 1 || tasks.size() <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, tasks.size()); ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= tasks.size()) return;
          run_task(t);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return rows;
}

void write_results_csv(const std::vector<SimulationRow>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
  out << "alpha_id,n,eps,replicate,method,mse_alpha,mse_mean,rhat_max,"
         "coverage,runtime_ms,selected_a\n";
  std::size_t failures = 0;
  for (const SimulationRow& r : rows) {
    if (!r.ok) {
      ++failures;
      continue;
    }
    out << r.alpha_id << ',' << r.n << ',' << format_double(r.eps) << ','
        << r.replicate << ',' << r.method << ',' << format_double(r.mse_alpha)
        << ',' << format_double(r.mse_mean) << ',' << format_double(r.rhat_max)
        << ',' << format_double(r.coverage) << ','
        << format_double(r.runtime_ms) << ',' << format_double(r.selected_a)
        << '\n';
  }
  if (failures > 0) {
    std::ofstream err(path + ".errors.csv");
    err << "alpha_id,n,eps,replicate,method,error\n";
    for (const SimulationRow& r : rows) {
      if (r.ok) continue;
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      err << r.alpha_id << ',' << r.n << ',' << format_double(r.eps) << ','
          << r.replicate << ',' << r.method << ',' << msg << '\n';
    }
  }
}

namespace {

double median_of(std::vector<double> values) {
  if (values.empty()) return kNan;
  std::sort(values.begin(), values.end());
  const std::size_t k = values.size();
  return (k % 2 == 1) ? values[k / 2]
                      : 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

}  // namespace

void write_summary_csv(const std::vector<SimulationRow>& rows,
                       const std::string& path) {
  // Keyed medians over replicates.
  struct Key {
    std::string alpha_id;
    std::size_t n;
    double eps;
    std::string method;
    bool operator<(const Key& o) const {
      return std::tie(alpha_id, n, eps, method) <
             std::tie(o.alpha_id, o.n, o.eps, o.method);
    }
  };
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok) continue;
    groups[{rows[i].alpha_id, rows[i].n, rows[i].eps, rows[i].method}]
        .push_back(i);
  }
  struct Summary {
    Key key;
    double med_mse_alpha;
    double med_mse_mean;
    double med_coverage;
  };
  std::vector<Summary> summaries;
  for (const auto& [key, idx] : groups) {
    std::vector<double> ma, mm, cov;
    for (std::size_t i : idx) {
      ma.push_back(rows[i].mse_alpha);
      mm.push_back(rows[i].mse_mean);
      if (!std::isnan(rows[i].coverage)) cov.push_back(rows[i].coverage);
    }
    summaries.push_back({key, median_of(ma), median_of(mm), median_of(cov)});
  }
  // Per-panel (alpha_id, n, eps) max-normalization of the medians.
  std::map<std::tuple<std::string, std::size_t, double>, std::pair<double, double>>
      panel_max;
  for (const Summary& s : summaries) {
    auto& entry = panel_max[{s.key.alpha_id, s.key.n, s.key.eps}];
    entry.first = std::max(entry.first, s.med_mse_alpha);
    entry.second = std::max(entry.second, s.med_mse_mean);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_summary_csv: cannot open " + path);
  out << "alpha_id,n,eps,method,median_mse_alpha,median_mse_mean,"
         "median_coverage,norm_mse_alpha,norm_mse_mean\n";
  for (const Summary& s : summaries) {
    const auto& mx = panel_max[{s.key.alpha_id, s.key.n, s.key.eps}];
    const double na = mx.first > 0.0 ? s.med_mse_alpha / mx.first : kNan;
    const double nm = mx.second > 0.0 ? s.med_mse_mean / mx.second : kNan;
    out << s.key.alpha_id << ',' << s.key.n << ',' << format_double(s.key.eps)
        << ',' << s.key.method << ',' << format_double(s.med_mse_alpha) << ','
        << format_double(s.med_mse_mean) << ','
        << format_double(s.med_coverage) << ',' << format_double(na) << ','
        << format_double(nm) << '\n';
  }
}

}  // namespace dpdir
