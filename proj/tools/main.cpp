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

// Command-line front end: releases noise-protected statistics from
// compositional data and runs the frequentist and Bayesian inference
// engines against released artifacts only.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpdir/bootstrap.hpp"
#include "dpdir/censoring.hpp"
#include "dpdir/csv.hpp"
#include "dpdir/group_analysis.hpp"
#include "dpdir/mechanisms.hpp"
#include "dpdir/methods.hpp"
#include "dpdir/samplers.hpp"
#include "dpdir/simulation.hpp"

namespace {

using namespace dpdir;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(item));
  }
  return out;
}

void write_draws_csv(const PosteriorSample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "chain";
  for (std::size_t j = 0; j < sample.draws.cols; ++j) {
    out << ",alpha_" << (j + 1);
  }
  out << "\n";
  for (std::size_t i = 0; i < sample.draws.rows; ++i) {
    out << sample.chain_ids[i];
    for (std::size_t j = 0; j < sample.draws.cols; ++j) {
      out << ',' << fmt(sample.draws(i, j));
    }
    out << "\n";
  }
}

nlohmann::json diagnostics_json(const PosteriorSample& sample) {
  nlohmann::json j{{"method", sample.method},
                   {"retained_draws", sample.draws.rows},
                   {"retained_per_chain", sample.diagnostics.retained_per_chain},
                   {"seed", sample.diagnostics.seed}};
  if (!sample.diagnostics.split_rhat.empty()) {
    j["split_rhat"] = sample.diagnostics.split_rhat;
    j["rhat_max"] = sample.diagnostics.rhat_max;
  }
  if (sample.diagnostics.record_accept_rate > 0.0) {
    j["record_accept_rate"] = sample.diagnostics.record_accept_rate;
  }
  if (sample.diagnostics.abc_delta) {
    j["delta"] = *sample.diagnostics.abc_delta;
    j["realized_accept_rate"] = *sample.diagnostics.abc_realized_rate;
  }
  return j;
}

struct CommonSamplerFlags {
  std::size_t chains = 5;
  std::size_t iters = 50000;
  std::size_t burnin = 25000;
  std::size_t total_draws = 1000;
  std::size_t b = 5;
  double accept_rate = 0.1;
  std::size_t n_total = 10000;
  std::size_t bootstrap_draws = 1000;
  std::size_t pool_size = 1000;

  SamplerSettings settings() const {
    SamplerSettings s;
    s.chains = chains;
    s.iterations = iters;
    s.burn_in = burnin;
    s.total_draws = total_draws;
    s.pseudo_records = b;
    s.threads = 1;
    return s;
  }

  MethodOptions options() const {
    MethodOptions o;
    o.sampler = settings();
    o.abc_simulations = n_total;
    o.abc_accept_rate = accept_rate;
    o.bootstrap_draws = bootstrap_draws;
    o.prior_pool_size = pool_size;
    return o;
  }
};

void add_sampler_flags(CLI::App* cmd, CommonSamplerFlags* flags) {
  cmd->add_option("--chains", flags->chains, "number of chains");
  cmd->add_option("--iters", flags->iters, "iterations per chain");
  cmd->add_option("--burnin", flags->burnin, "burn-in per chain");
  cmd->add_option("--draws", flags->total_draws, "total retained draws");
  cmd->add_option("--b", flags->b, "pseudo-records for the rescaled chain");
  cmd->add_option("--accept-rate", flags->accept_rate, "ABC acceptance rate");
  cmd->add_option("--N", flags->n_total, "ABC simulation count");
  cmd->add_option("--pool-size", flags->pool_size, "pool size for p2/p5");
}

int cmd_release(const std::string& input, double eps, double eps1, double eps2,
                double split, const std::string& candidates_text,
                std::uint64_t seed, bool drop_zero, const std::string& out) {
  double e1 = eps1, e2 = eps2;
  if (e1 <= 0.0 || e2 <= 0.0) {
    if (eps <= 0.0) {
      throw std::runtime_error(
          "release: provide --eps (splits 25/75) or both --eps1 and --eps2");
    }
    e1 = 0.25 * eps;
    e2 = 0.75 * eps;
  }
  const IngestResult ingest = ingest_csv(input, "", drop_zero);
  const ThresholdCandidates candidates =
      candidates_text.empty()
          ? default_candidates()
          : ThresholdCandidates(parse_double_list(candidates_text));
  const std::size_t n = ingest.data.record_count();
  std::size_t n1 = 0;
  if (split > 0.0) {
    n1 = static_cast<std::size_t>(std::llround(split * static_cast<double>(n)));
    if (n1 == 0 || n1 >= n) {
      throw std::runtime_error("release: --split leaves an empty partition");
    }
  }
  Rng rng(seed);
  const DPRelease rel = release(ingest.data, candidates, e1, e2, n1,
                                n1 > 0 ? n - n1 : 0, rng);
  save_release(rel, out);
  std::cout << "{\"written\": \"" << out << "\", \"selected_a\": "
            << fmt(rel.selected_a)
            << ", \"budget_total\": " << fmt(rel.budget.total())
            << ", \"dropped_zero_rows\": " << ingest.dropped_zero_rows << "}"
            << std::endl;
  return 0;
}

int cmd_bootstrap(const std::string& release_path, std::size_t B,
                  std::uint64_t seed, double level, bool refit_censored,
                  const std::string& out) {
  const DPRelease rel = load_release(release_path);
  if (rel.partitioned()) {
    throw std::runtime_error(
        "bootstrap: expects an unpartitioned release (one statistic)");
  }
  BootstrapOptions options;
  options.censored_refit = refit_censored;
  Rng rng(seed);
  const BootstrapDraws draws =
      dp_bootstrap(rel.statistics[0].stat, rel.budget.eps1(), rel.selected_a,
                   rel.n, B, rng, options);

  PosteriorSample as_sample;
  as_sample.method = "dpboots";
  as_sample.draws = draws.draws;
  as_sample.chain_ids.assign(draws.draws.rows, 0);
  write_draws_csv(as_sample, out + "_draws.csv");

  nlohmann::json summary{{"method", "dpboots"},
                         {"B", draws.meta.B},
                         {"a", draws.meta.a},
                         {"eps1", draws.meta.eps1},
                         {"n", draws.meta.n},
                         {"rejection_count", draws.meta.rejection_count},
                         {"seed", draws.meta.seed},
                         {"level", level}};
  const auto alpha_ci = percentile_ci(draws, level, CiTarget::kAlpha);
  const auto mean_ci = percentile_ci(draws, level, CiTarget::kMeanComposition);
  nlohmann::json alpha_json = nlohmann::json::array();
  nlohmann::json mean_json = nlohmann::json::array();
  for (std::size_t j = 0; j < alpha_ci.size(); ++j) {
    alpha_json.push_back({{"lo", alpha_ci[j].lo}, {"hi", alpha_ci[j].hi}});
    mean_json.push_back({{"lo", mean_ci[j].lo}, {"hi", mean_ci[j].hi}});
  }
  summary["alpha_ci"] = alpha_json;
  summary["mean_composition_ci"] = mean_json;
  std::ofstream sum_out(out + "_summary.json");
  sum_out << summary.dump(2) << "\n";
  std::cout << "{\"written\": [\"" << out << "_draws.csv\", \"" << out
            << "_summary.json\"]}" << std::endl;
  return 0;
}

int cmd_sampler(const std::string& engine, const std::string& release_path,
                const std::string& prior, const CommonSamplerFlags& flags,
                std::uint64_t seed, const std::string& out) {
  const DPRelease rel = load_release(release_path);
  const MethodSpec spec = MethodSpec::parse(engine + "_" + prior);
  const MethodOptions options = flags.options();
  PriorBuilder priors(rel.d, rel.partitioned() ? &rel : nullptr, options,
                      Rng(seed).derive(1));
  const DPRelease* full = rel.partitioned() ? nullptr : &rel;
  const DPRelease* split = rel.partitioned() ? &rel : nullptr;
  Rng rng = Rng(seed).derive(2);
  const MethodOutcome outcome =
      run_method(spec, nullptr, full, split, &priors, options, rng);
  write_draws_csv(outcome.sample, out + "_draws.csv");
  std::ofstream diag(out + "_diagnostics.json");
  diag << diagnostics_json(outcome.sample).dump(2) << "\n";
  std::cout << "{\"written\": [\"" << out << "_draws.csv\", \"" << out
            << "_diagnostics.json\"]}" << std::endl;
  return 0;
}

int cmd_censoring_report(const std::string& alpha_text, double a,
                         const std::string& candidates_text,
                         const std::string& out) {
  const DirichletParams alpha(parse_double_list(alpha_text));
  std::vector<double> thresholds;
  if (!candidates_text.empty()) {
    thresholds = parse_double_list(candidates_text);
  } else {
    thresholds.push_back(a);
  }
  nlohmann::json reports = nlohmann::json::array();
  for (double threshold : thresholds) {
    const CensoringReport report = build_censoring_report(alpha, threshold);
    nlohmann::json bounds = nlohmann::json::array();
    nlohmann::json bias_bounds = nlohmann::json::array();
    for (std::size_t j = 0; j < alpha.dimension(); ++j) {
      bounds.push_back({{"value", report.bernstein_bounds[j].value},
                        {"vacuous", report.bernstein_bounds[j].vacuous}});
      if (report.bias_upper_bounds[j]) {
        bias_bounds.push_back(*report.bias_upper_bounds[j]);
      } else {
        bias_bounds.push_back("n/a");
      }
    }
    reports.push_back({{"threshold_a", report.threshold},
                       {"per_component_prob", report.per_component_prob},
                       {"expected_proportion", report.expected_proportion},
                       {"per_component_bias", report.per_component_bias},
                       {"bernstein_bounds", bounds},
                       {"bias_upper_bounds", bias_bounds}});
  }
  const nlohmann::json doc{{"alpha", alpha.alpha}, {"reports", reports}};
  if (out.empty()) {
    std::cout << doc.dump(2) << std::endl;
  } else {
    std::ofstream file(out);
    file << doc.dump(2) << "\n";
    std::cout << "{\"written\": \"" << out << "\"}" << std::endl;
  }
  return 0;
}

int cmd_simulate(const std::string& config_path,
                 std::optional<std::uint64_t> seed, unsigned threads,
                 const std::string& out, bool emit_config) {
  if (emit_config) {
    std::cout << simulation_config_to_json(paper_grid_config()) << std::endl;
    return 0;
  }
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("simulate: cannot open " + config_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  SimulationConfig cfg = simulation_config_from_json(text);
  if (seed) cfg.master_seed = *seed;
  if (threads > 0) cfg.threads = threads;
  const std::vector<SimulationRow> rows = run_simulation(cfg);
  write_results_csv(rows, out + "_results.csv");
  write_summary_csv(rows, out + "_summary.csv");
  std::size_t failures = 0;
  for (const SimulationRow& r : rows) {
    if (!r.ok) ++failures;
  }
  std::cout << "{\"written\": [\"" << out << "_results.csv\", \"" << out
            << "_summary.csv\"], \"rows\": " << rows.size()
            << ", \"failures\": " << failures << "}" << std::endl;
  return failures == rows.size() ? 1 : 0;
}

int cmd_analyze(const std::string& input, const std::string& group_col,
                double eps, double margin, std::size_t runs,
                const std::vector<std::string>& methods,
                const CommonSamplerFlags& flags, std::uint64_t seed,
                bool drop_zero, bool paper_scale, const std::string& out) {
  const IngestResult ingest = ingest_csv(input, group_col, drop_zero);
  GroupAnalysisConfig cfg;
  cfg.epsilon = eps;
  cfg.margin = margin;
  cfg.runs = paper_scale ? 100 : runs;
  if (!methods.empty()) cfg.methods = methods;
  cfg.method_options = flags.options();
  cfg.master_seed = seed;
  GroupAnalysisResult result =
      analyze_groups(ingest.data, ingest.group_labels, cfg);
  result.dropped_zero_rows = ingest.dropped_zero_rows;
  std::ofstream json_out(out + "_decisions.json");
  json_out << group_result_to_json(result) << "\n";
  write_group_result_csv(result, out + "_decisions.csv");
  std::cout << "{\"written\": [\"" << out << "_decisions.json\", \"" << out
            << "_decisions.csv\"], \"budget\": " << fmt(result.combined_budget)
            << "}" << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "differentially private inference for compositional data under a "
      "Dirichlet model"};
  app.require_subcommand(1);

  auto* release_cmd = app.add_subcommand(
      "release", "select a censoring threshold and release the statistic");
  std::string rel_input, rel_candidates, rel_out = "release.json";
  double rel_eps = 0.0, rel_eps1 = 0.0, rel_eps2 = 0.0, rel_split = 0.0;
  std::uint64_t rel_seed = 1;
  bool rel_drop_zero = false;
  release_cmd->add_option("--input", rel_input, "input CSV")->required();
  release_cmd->add_option("--eps", rel_eps, "total budget (25/75 split)");
  release_cmd->add_option("--eps1", rel_eps1, "statistic budget");
  release_cmd->add_option("--eps2", rel_eps2, "threshold-selection budget");
  release_cmd->add_option("--split", rel_split,
                          "fraction of records in the first partition");
  release_cmd->add_option("--candidates", rel_candidates,
                          "comma-separated candidate thresholds");
  release_cmd->add_option("--seed", rel_seed, "rng seed");
  release_cmd->add_flag("--drop-zero", rel_drop_zero,
                        "drop rows containing zero entries");
  release_cmd->add_option("--out", rel_out, "output release JSON");

  auto* boot_cmd =
      app.add_subcommand("bootstrap", "parametric bootstrap on a release");
  std::string boot_release, boot_out = "bootstrap";
  std::size_t boot_B = 1000;
  std::uint64_t boot_seed = 1;
  double boot_level = 0.95;
  bool boot_refit_censored = false;
  boot_cmd->add_option("--release", boot_release, "release JSON")->required();
  boot_cmd->add_option("--B", boot_B, "bootstrap iterations");
  boot_cmd->add_option("--seed", boot_seed, "rng seed");
  boot_cmd->add_option("--level", boot_level, "interval level");
  boot_cmd->add_flag("--refit-censored", boot_refit_censored,
                     "censor simulated data at the released threshold "
                     "before refitting");
  boot_cmd->add_option("--out", boot_out, "output prefix");

  struct SamplerCmd {
    CLI::App* cmd = nullptr;
    std::string release;
    std::string prior = "p1";
    std::string out;
    std::uint64_t seed = 1;
    CommonSamplerFlags flags;
  };
  std::map<std::string, SamplerCmd> samplers;
  for (const std::string name : {"mcmc", "remcmc", "abc", "approx"}) {
    SamplerCmd& sc = samplers[name];
    sc.cmd = app.add_subcommand(
        name, name == "mcmc"     ? "data-augmentation chain"
              : name == "remcmc" ? "rescaled pseudo-record chain"
              : name == "abc"    ? "rejection sampler"
                                 : "asymptotic-normal Gibbs chain");
    sc.out = name;
    sc.cmd->add_option("--release", sc.release, "release JSON")->required();
    sc.cmd->add_option("--prior", sc.prior, "prior p1..p5");
    sc.cmd->add_option("--seed", sc.seed, "rng seed");
    sc.cmd->add_option("--out", sc.out, "output prefix");
    add_sampler_flags(sc.cmd, &sc.flags);
  }

  auto* cens_cmd = app.add_subcommand(
      "censoring-report", "closed-form censoring analytics for a parameter");
  std::string cens_alpha, cens_candidates, cens_out;
  double cens_a = 0.01;
  cens_cmd->add_option("--alpha", cens_alpha, "comma-separated parameter")
      ->required();
  cens_cmd->add_option("--a", cens_a, "censoring threshold");
  cens_cmd->add_option("--candidates", cens_candidates,
                       "comma-separated thresholds to sweep");
  cens_cmd->add_option("--out", cens_out, "output JSON (stdout when absent)");

  auto* sim_cmd =
      app.add_subcommand("simulate", "run the simulation grid from a config");
  std::string sim_config, sim_out = "simulation";
  std::uint64_t sim_seed = 0;
  unsigned sim_threads = 0;
  bool sim_emit_config = false;
  sim_cmd->add_option("--config", sim_config, "config JSON");
  sim_cmd->add_flag("--emit-config", sim_emit_config,
                    "print the full factorial study config and exit");
  auto* sim_seed_opt =
      sim_cmd->add_option("--seed", sim_seed, "master seed override");
  sim_cmd->add_option("--threads", sim_threads, "worker threads");
  sim_cmd->add_option("--out", sim_out, "output prefix");

  auto* an_cmd = app.add_subcommand(
      "analyze", "two-group mean-difference testing workflow");
  std::string an_input, an_group = "group", an_out = "analysis";
  double an_eps = 0.5, an_margin = 0.01;
  std::size_t an_runs = 10;
  std::vector<std::string> an_methods;
  std::uint64_t an_seed = 1;
  bool an_drop_zero = false, an_paper_scale = false;
  CommonSamplerFlags an_flags;
  an_cmd->add_option("--input", an_input, "input CSV")->required();
  an_cmd->add_option("--group-col", an_group, "group column name");
  an_cmd->add_option("--eps", an_eps, "privacy budget per group");
  an_cmd->add_option("--margin", an_margin, "null-hypothesis margin");
  an_cmd->add_option("--runs", an_runs, "independent repetitions");
  an_cmd->add_option("--method", an_methods, "methods to run")
      ->delimiter(',');
  an_cmd->add_option("--seed", an_seed, "master seed");
  an_cmd->add_flag("--drop-zero", an_drop_zero, "drop rows with zero entries");
  an_cmd->add_flag("--paper-scale", an_paper_scale, "100 repetitions");
  an_cmd->add_option("--out", an_out, "output prefix");
  an_cmd->add_option("--B", an_flags.bootstrap_draws, "bootstrap iterations");
  add_sampler_flags(an_cmd, &an_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (release_cmd->parsed()) {
      return cmd_release(rel_input, rel_eps, rel_eps1, rel_eps2, rel_split,
                         rel_candidates, rel_seed, rel_drop_zero, rel_out);
    }
    if (boot_cmd->parsed()) {
      return cmd_bootstrap(boot_release, boot_B, boot_seed, boot_level,
                           boot_refit_censored, boot_out);
    }
    for (auto& [name, sc] : samplers) {
      if (sc.cmd->parsed()) {
        const std::string engine = name == "mcmc"     ? "dpmcmc"
                                   : name == "remcmc" ? "dpremcmc"
                                   : name == "abc"    ? "dpabc"
                                                      : "dpapprox";
        return cmd_sampler(engine, sc.release, sc.prior, sc.flags, sc.seed,
                           sc.out);
      }
    }
    if (cens_cmd->parsed()) {
      return cmd_censoring_report(cens_alpha, cens_a, cens_candidates,
                                  cens_out);
    }
    if (sim_cmd->parsed()) {
      if (!sim_emit_config && sim_config.empty()) {
        throw std::runtime_error("simulate: --config required");
      }
      return cmd_simulate(sim_config,
                          sim_seed_opt->count() > 0
                              ? std::optional<std::uint64_t>(sim_seed)
                              : std::nullopt,
                          sim_threads, sim_out, sim_emit_config);
    }
    if (an_cmd->parsed()) {
      return cmd_analyze(an_input, an_group, an_eps, an_margin, an_runs,
                         an_methods, an_flags, an_seed, an_drop_zero,
                         an_paper_scale, an_out);
    }
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}};
    std::cerr << err.dump() << std::endl;
    return 1;
  }
  return 0;
}
