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

#include "dpdir/group_analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "dpdir/bootstrap.hpp"
#include "json.hpp"

namespace dpdir {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct GroupData {
  std::string label;
  CompositionalDataset data;
};

struct RunOutcome {
  bool ok = false;
  std::vector<bool> reject;
  std::vector<double> posterior_prob;  // NaN for bootstrap methods
  std::vector<double> mean_a;
  std::vector<double> mean_b;
};

std::vector<double> draw_mean_composition(const Matrix& draws) {
  std::vector<double> out(draws.cols, 0.0);
  for (std::size_t i = 0; i < draws.rows; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < draws.cols; ++j) total += draws(i, j);
    for (std::size_t j = 0; j < draws.cols; ++j) out[j] += draws(i, j) / total;
  }
  for (double& v : out) v /= static_cast<double>(draws.rows);
  return out;
}

}  // namespace

void GroupAnalysisConfig::validate() const {
  if (!(margin > 0.0)) {
    throw std::invalid_argument("GroupAnalysisConfig: margin must be > 0");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("GroupAnalysisConfig: epsilon must be > 0");
  }
  if (runs < 1) throw std::invalid_argument("GroupAnalysisConfig: runs >= 1");
  split.validate();
  for (const std::string& m : methods) {
    const MethodSpec spec = MethodSpec::parse(m);
    if (spec.engine == MethodSpec::Engine::kBoots ||
        spec.engine == MethodSpec::Engine::kMcmcBench) {
      continue;  // benchmarks allowed
    }
  }
  method_options.sampler.validate();
}

GroupAnalysisResult analyze_groups(const CompositionalDataset& data,
                                   const std::vector<std::string>& labels,
                                   const GroupAnalysisConfig& config) {
  config.validate();
  if (labels.size() != data.record_count()) {
    throw std::invalid_argument("analyze_groups: one label per record needed");
  }
  const std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() != 2) {
    throw std::invalid_argument("analyze_groups: need exactly 2 groups (got " +
                                std::to_string(distinct.size()) + ")");
  }
  const std::size_t d = data.component_count();
  std::vector<GroupData> groups;
  for (const std::string& label : distinct) {  // set order: lexicographic
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < data.record_count(); ++i) {
      if (labels[i] == label) {
        const auto row = data.row(i);
        rows.emplace_back(row.begin(), row.end());
      }
    }
    if (rows.size() < 10) {
      throw std::invalid_argument("analyze_groups: group '" + label +
                                  "' has fewer than 10 records");
    }
    groups.push_back({label, CompositionalDataset::validate(rows)});
  }

  std::vector<MethodSpec> specs;
  for (const std::string& m : config.methods) {
    specs.push_back(MethodSpec::parse(m));
  }

  const double eps1 = config.split.eps1_frac * config.epsilon;
  const double eps2 = config.split.eps2_frac * config.epsilon;
  const Rng master(config.master_seed);

  // outcome[run][method]
  std::vector<std::vector<RunOutcome>> outcomes(
      config.runs, std::vector<RunOutcome>(specs.size()));
  std::atomic<double> combined_budget{0.0};

  const auto run_one = [&](std::size_t run) {
    const Rng run_rng = master.derive(run);
    // Per group: one single-statistic release and one partitioned release,
    // both at the full budget (the groups are disjoint, so the analysis
    // composes in parallel).
    std::vector<DPRelease> full_releases(2);
    std::vector<DPRelease> split_releases(2);
    std::vector<PriorBuilder> priors;
    priors.reserve(2);
    for (int g = 0; g < 2; ++g) {
      const Rng group_rng = run_rng.derive(g);
      const std::size_t n_g = groups[g].data.record_count();
      const std::size_t n1 = static_cast<std::size_t>(
          std::llround(config.split.n1_frac * static_cast<double>(n_g)));
      Rng full_rng = group_rng.derive(0);
      full_releases[g] = release(groups[g].data, config.candidates, eps1, eps2,
                                 0, 0, full_rng, config.selector);
      Rng split_rng = group_rng.derive(1);
      split_releases[g] = release(groups[g].data, config.candidates, eps1,
                                  eps2, n1, n_g - n1, split_rng,
                                  config.selector);
      priors.emplace_back(d, &split_releases[g], config.method_options,
                          group_rng.derive(2));
    }
    if (run == 0) {
      combined_budget.store(parallel_combined_total(
          {full_releases[0].budget, full_releases[1].budget}));
    }

    for (std::size_t mi = 0; mi < specs.size(); ++mi) {
      RunOutcome& outcome = outcomes[run][mi];
      try {
        std::vector<Matrix> draws(2);
        for (int g = 0; g < 2; ++g) {
          Rng method_rng =
              run_rng.derive(g).derive(16 + specs[mi].stream_id());
          MethodOutcome res = run_method(
              specs[mi], &groups[g].data, &full_releases[g],
              &split_releases[g], &priors[g], config.method_options,
              method_rng);
          draws[g] = std::move(res.sample.draws);
        }
        outcome.mean_a = draw_mean_composition(draws[0]);
        outcome.mean_b = draw_mean_composition(draws[1]);
        outcome.reject.resize(d);
        outcome.posterior_prob.assign(d, kNan);
        if (specs[mi].engine == MethodSpec::Engine::kBoots ||
            specs[mi].engine == MethodSpec::Engine::kDpBoots) {
          BootstrapDraws a, b;
          a.draws = std::move(draws[0]);
          b.draws = std::move(draws[1]);
          const std::vector<bool> reject =
              test_mean_difference(a, b, config.margin, config.ci_level);
          outcome.reject = reject;
        } else {
          // Posterior probability of H0 from paired draws.
          const std::size_t pairs = std::min(draws[0].rows, draws[1].rows);
          std::vector<std::size_t> inside(d, 0);
          for (std::size_t t = 0; t < pairs; ++t) {
            double sum_a = 0.0, sum_b = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              sum_a += draws[0](t, j);
              sum_b += draws[1](t, j);
            }
            for (std::size_t j = 0; j < d; ++j) {
              const double diff =
                  draws[0](t, j) / sum_a - draws[1](t, j) / sum_b;
              if (std::abs(diff) <= config.margin) ++inside[j];
            }
          }
          for (std::size_t j = 0; j < d; ++j) {
            outcome.posterior_prob[j] =
                static_cast<double>(inside[j]) / static_cast<double>(pairs);
            outcome.reject[j] = outcome.posterior_prob[j] < 0.5;
          }
        }
        outcome.ok = true;
      } catch (const std::exception&) {
        outcome.ok = false;
      }
    }
  };

  const unsigned threads = std::max(1u, config.threads);
  if (threads <= 1 || config.runs <= 1) {
    for (std::size_t r = 0; r < config.runs; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(threads, config.runs); ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t r = next.fetch_add(1);
          if (r >= config.runs) return;
          run_one(r);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  GroupAnalysisResult result;
  result.group_a = groups[0].label;
  result.group_b = groups[1].label;
  result.n_group_a = groups[0].data.record_count();
  result.n_group_b = groups[1].data.record_count();
  result.combined_budget = combined_budget.load();
  for (std::size_t mi = 0; mi < specs.size(); ++mi) {
    GroupMethodReport report;
    report.method = specs[mi].name();
    report.non_private = specs[mi].non_private();
    std::size_t ok_runs = 0;
    std::vector<double> mean_a(d, 0.0), mean_b(d, 0.0), prob(d, 0.0);
    std::vector<std::size_t> rejects(d, 0);
    bool has_prob = false;
    for (std::size_t r = 0; r < config.runs; ++r) {
      const RunOutcome& o = outcomes[r][mi];
      if (!o.ok) {
        ++report.failed_runs;
        continue;
      }
      ++ok_runs;
      for (std::size_t j = 0; j < d; ++j) {
        mean_a[j] += o.mean_a[j];
        mean_b[j] += o.mean_b[j];
        if (o.reject[j]) ++rejects[j];
        if (!std::isnan(o.posterior_prob[j])) {
          prob[j] += o.posterior_prob[j];
          has_prob = true;
        }
      }
    }
    for (std::size_t j = 0; j < d; ++j) {
      GroupComponentDecision dec;
      dec.component = j;
      if (ok_runs > 0) {
        dec.mean_group_a = mean_a[j] / static_cast<double>(ok_runs);
        dec.mean_group_b = mean_b[j] / static_cast<double>(ok_runs);
        dec.reject_fraction =
            static_cast<double>(rejects[j]) / static_cast<double>(ok_runs);
        dec.avg_posterior_prob =
            has_prob ? prob[j] / static_cast<double>(ok_runs) : kNan;
      } else {
        dec.mean_group_a = dec.mean_group_b = kNan;
        dec.reject_fraction = kNan;
        dec.avg_posterior_prob = kNan;
      }
      report.components.push_back(dec);
    }
    result.methods.push_back(std::move(report));
  }
  return result;
}

std::string group_result_to_json(const GroupAnalysisResult& result) {
  nlohmann::json methods = nlohmann::json::array();
  for (const GroupMethodReport& m : result.methods) {
    nlohmann::json comps = nlohmann::json::array();
    for (const GroupComponentDecision& c : m.components) {
      nlohmann::json jc{{"component", c.component},
                        {"mean_group_a", c.mean_group_a},
                        {"mean_group_b", c.mean_group_b},
                        {"reject_fraction", c.reject_fraction}};
      if (!std::isnan(c.avg_posterior_prob)) {
        jc["avg_posterior_prob"] = c.avg_posterior_prob;
      }
      comps.push_back(jc);
    }
    nlohmann::json jm{{"method", m.method},
                      {"failed_runs", m.failed_runs},
                      {"components", comps}};
    if (m.non_private) jm["NON-PRIVATE"] = true;
    methods.push_back(jm);
  }
  const nlohmann::json j{{"group_a", result.group_a},
                         {"group_b", result.group_b},
                         {"n_group_a", result.n_group_a},
                         {"n_group_b", result.n_group_b},
                         {"dropped_zero_rows", result.dropped_zero_rows},
                         {"combined_budget", result.combined_budget},
                         {"methods", methods}};
  return j.dump(2);
}

void write_group_result_csv(const GroupAnalysisResult& result,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_group_result_csv: cannot open " + path);
  }
  out << "method,component,mean_group_a,mean_group_b,reject_fraction,"
         "avg_posterior_prob,non_private\n";
  for (const GroupMethodReport& m : result.methods) {
    for (const GroupComponentDecision& c : m.components) {
      out << m.method << ',' << c.component << ',' << c.mean_group_a << ','
          << c.mean_group_b << ',' << c.reject_fraction << ',';
      if (std::isnan(c.avg_posterior_prob)) {
        out << "";
      } else {
        out << c.avg_posterior_prob;
      }
      out << ',' << (m.non_private ? "NON-PRIVATE" : "") << '\n';
    }
  }
}

}  // namespace dpdir
