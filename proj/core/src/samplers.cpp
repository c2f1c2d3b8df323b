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

#include "dpdir/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dpdir/diagnostics.hpp"
#include "dpdir/linalg.hpp"
#include "dpdir/mechanisms.hpp"
#include "dpdir/slice.hpp"
#include "dpdir/special_math.hpp"

namespace dpdir {

void SamplerSettings::validate() const {
  if (chains < 1) throw std::invalid_argument("SamplerSettings: chains >= 1");
  if (burn_in >= iterations) {
    throw std::invalid_argument("SamplerSettings: burn_in must be < iterations");
  }
  if (pseudo_records < 1) {
    throw std::invalid_argument("SamplerSettings: pseudo_records >= 1");
  }
  if (total_draws < 1) {
    throw std::invalid_argument("SamplerSettings: total_draws >= 1");
  }
  const std::size_t per_chain = (total_draws + chains - 1) / chains;
  if (iterations - burn_in < per_chain) {
    throw std::invalid_argument(
        "SamplerSettings: iterations - burn_in too small for the retention "
        "target");
  }
}

namespace {

constexpr std::size_t kRefreshInterval = 1000;

struct RetentionPlan {
  std::size_t per_chain = 0;
  std::size_t thin = 0;
};

RetentionPlan retention_plan(const SamplerSettings& s) {
  RetentionPlan plan;
  plan.per_chain = (s.total_draws + s.chains - 1) / s.chains;
  plan.thin = (s.iterations - s.burn_in) / plan.per_chain;
  return plan;
}

// MLE of the released statistic after projecting it into the feasible set;
// falls back to the prior mean. Used only to seed the chains.
std::vector<double> initial_alpha(const SufficientStatistic& released,
                                  const Prior& prior) {
  SufficientStatistic projected = released;
  for (double& v : projected.values) v = std::min(v, -1e-6);
  double sum_exp = 0.0;
  for (double v : projected.values) sum_exp += std::exp(v);
  if (sum_exp > 1.0) {
    const double shift = std::log(sum_exp) + 0.01;
    for (double& v : projected.values) v -= shift;
  }
  try {
    return dirichlet_mle(projected).alpha;
  } catch (const std::exception&) {
    return prior.mean();
  }
}

std::vector<double> jitter_alpha(std::span<const double> alpha, Rng& rng) {
  std::vector<double> out(alpha.begin(), alpha.end());
  for (double& v : out) v *= std::exp(0.2 * rng.normal());
  return out;
}

void run_per_chain(std::size_t chains, unsigned threads,
                   const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || chains <= 1) {
    for (std::size_t c = 0; c < chains; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  const unsigned count = std::min<unsigned>(threads, chains);
  for (unsigned t = 0; t < count; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= chains) return;
        body(c);
      }
    });
  }
  for (std::thread& t : pool) t.join();
}

PosteriorSample assemble_sample(std::vector<Matrix> kept, std::string method,
                                std::uint64_t seed) {
  const std::size_t chains = kept.size();
  const std::size_t per_chain = kept.front().rows;
  const std::size_t d = kept.front().cols;
  PosteriorSample out;
  out.method = std::move(method);
  out.draws = Matrix(chains * per_chain, d);
  out.chain_ids.resize(chains * per_chain);
  for (std::size_t c = 0; c < chains; ++c) {
    for (std::size_t t = 0; t < per_chain; ++t) {
      const auto src = kept[c].row(t);
      std::copy(src.begin(), src.end(), out.draws.row(c * per_chain + t).begin());
      out.chain_ids[c * per_chain + t] = static_cast<int>(c);
    }
  }
  out.diagnostics.seed = seed;
  out.diagnostics.retained_per_chain = per_chain;
  if (chains >= 2 && per_chain >= 4) {
    out.diagnostics.split_rhat = split_rhat(kept);
    out.diagnostics.rhat_max = *std::max_element(
        out.diagnostics.split_rhat.begin(), out.diagnostics.split_rhat.end());
  }
  return out;
}

// Log target for alpha given a mean-log statistic with likelihood weight w:
// w * [sum_j (alpha_j - 1) s_j - sum_j lgamma(alpha_j) + lgamma(sum alpha)]
// plus the prior.
double alpha_log_target(std::span<const double> alpha,
                        std::span<const double> mean_log, double weight,
                        const Prior& prior) {
  double ll = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    ll += (alpha[j] - 1.0) * mean_log[j] - std::lgamma(alpha[j]);
    total += alpha[j];
  }
  ll = weight * (ll + std::lgamma(total));
  return ll + prior.log_density(alpha);
}

void slice_update_alpha(std::vector<double>& alpha,
                        std::span<const double> mean_log, double weight,
                        const Prior& prior, Rng& rng) {
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const double y0 = std::log(alpha[j]);
    std::vector<double> trial(alpha);
    const auto target = [&](double y) {
      if (y < -300.0 || y > 300.0) {
        return -std::numeric_limits<double>::infinity();
      }
      trial[j] = std::exp(y);
      return alpha_log_target(trial, mean_log, weight, prior) + y;
    };
    const double y1 = slice_sample(y0, target, rng);
    alpha[j] = std::exp(y1);
  }
}

// Markov chain over (alpha, latent log-rows). The latent records enter the
// posterior only through their censored mean log (noise term) and their
// plain mean log (model term), so rows are stored directly as logs.
class AugmentedChain {
 public:
  AugmentedChain(std::span<const double> released, double a, double noise_scale,
                 double like_weight, std::size_t rows, const Prior& prior)
      : released_(released.begin(), released.end()),
        log_a_(std::log(a)),
        noise_scale_(noise_scale),
        like_weight_(like_weight),
        // The scale-refresh jump needs the model proposal to cancel the data
        // terms exactly, which holds only for the untempered chain.
        full_weight_(like_weight == static_cast<double>(rows)),
        rows_(rows),
        d_(released.size()),
        prior_(&prior),
        log_rows_(rows, released.size()),
        cens_sum_(released.size(), 0.0),
        plain_sum_(released.size(), 0.0) {}

  void init(std::span<const double> alpha0, Rng& rng) {
    alpha_.assign(alpha0.begin(), alpha0.end());
    const DirichletParams params(alpha_);
    std::vector<double> row(d_);
    for (std::size_t i = 0; i < rows_; ++i) {
      dirichlet_draw_row(params, rng, row);
      for (std::size_t j = 0; j < d_; ++j) log_rows_(i, j) = std::log(row[j]);
    }
    recompute_sums();
  }

  void init_from_data(const CompositionalDataset& data,
                      std::span<const double> alpha0) {
    alpha_.assign(alpha0.begin(), alpha0.end());
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto row = data.row(i);
      for (std::size_t j = 0; j < d_; ++j) log_rows_(i, j) = std::log(row[j]);
    }
    recompute_sums();
  }

  void sweep(Rng& rng) {
    const DirichletParams params(alpha_);
    const double inv_rows = 1.0 / static_cast<double>(rows_);
    std::vector<double> prop(d_);
    std::vector<double> prop_log(d_);
    for (std::size_t i = 0; i < rows_; ++i) {
      dirichlet_draw_row(params, rng, prop);
      double log_ratio = 0.0;
      for (std::size_t j = 0; j < d_; ++j) {
        prop_log[j] = std::log(prop[j]);
        const double old_cl = std::max(log_rows_(i, j), log_a_);
        const double new_cl = std::max(prop_log[j], log_a_);
        const double s_old = cens_sum_[j] * inv_rows;
        const double s_new = s_old + (new_cl - old_cl) * inv_rows;
        log_ratio += (std::abs(s_old - released_[j]) -
                      std::abs(s_new - released_[j])) /
                     noise_scale_;
      }
      ++proposals_;
      if (std::log(rng.uniform01()) < log_ratio) {
        ++accepts_;
        for (std::size_t j = 0; j < d_; ++j) {
          const double old_log = log_rows_(i, j);
          cens_sum_[j] +=
              std::max(prop_log[j], log_a_) - std::max(old_log, log_a_);
          plain_sum_[j] += prop_log[j] - old_log;
          log_rows_(i, j) = prop_log[j];
        }
      }
    }

    std::vector<double> plain_mean(d_);
    for (std::size_t j = 0; j < d_; ++j) plain_mean[j] = plain_sum_[j] * inv_rows;
    slice_update_alpha(alpha_, plain_mean, like_weight_, *prior_, rng);

    if (full_weight_) scale_refresh_move(rng);

    if (++sweeps_ % kRefreshInterval == 0) refresh();
  }

  const std::vector<double>& alpha() const { return alpha_; }
  std::size_t proposals() const { return proposals_; }
  std::size_t accepts() const { return accepts_; }
  double max_drift() const { return max_drift_; }

 private:
  // The slow direction of this chain is the overall concentration: alpha
  // given the latent rows is tight, and the statistic of the rows drifts by
  // O(1/sqrt(rows)) per sweep, so traversing the concentration ridge by
  // local moves takes O(rows) sweeps. This jump move rescales alpha by a
  // common factor and redraws the latent rows from the scaled model in one
  // Metropolis step. Proposing the rows from the model cancels the data
  // terms, leaving the noise-term ratio, the prior ratio, and the e^{dz}
  // Jacobian of alpha -> alpha e^z.
  void scale_refresh_move(Rng& rng) {
    // Two proposal widths: short steps keep a usable acceptance rate when
    // the noise term is tight, long ones cross wide ridges (heavy noise)
    // in a few jumps. The mixture is symmetric in z, so the acceptance
    // ratio is unchanged.
    const double width = (rng.uniform01() < 0.5) ? 0.15 : 0.6;
    const double z = width * rng.normal();
    std::vector<double> scaled(alpha_);
    for (double& v : scaled) v *= std::exp(z);
    double log_acc = static_cast<double>(d_) * z;
    log_acc += prior_->log_density(scaled) - prior_->log_density(alpha_);
    if (!std::isfinite(log_acc)) return;

    const DirichletParams params(scaled);
    Matrix fresh(rows_, d_);
    std::vector<double> cens(d_, 0.0);
    std::vector<double> plain(d_, 0.0);
    std::vector<double> row(d_);
    for (std::size_t i = 0; i < rows_; ++i) {
      dirichlet_draw_row(params, rng, row);
      for (std::size_t j = 0; j < d_; ++j) {
        const double lv = std::log(row[j]);
        fresh(i, j) = lv;
        plain[j] += lv;
        cens[j] += std::max(lv, log_a_);
      }
    }
    const double inv_rows = 1.0 / static_cast<double>(rows_);
    for (std::size_t j = 0; j < d_; ++j) {
      log_acc += (std::abs(cens_sum_[j] * inv_rows - released_[j]) -
                  std::abs(cens[j] * inv_rows - released_[j])) /
                 noise_scale_;
    }
    if (std::log(rng.uniform01()) < log_acc) {
      alpha_ = std::move(scaled);
      log_rows_ = std::move(fresh);
      cens_sum_ = std::move(cens);
      plain_sum_ = std::move(plain);
    }
  }

  void recompute_sums() {
    std::fill(cens_sum_.begin(), cens_sum_.end(), 0.0);
    std::fill(plain_sum_.begin(), plain_sum_.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < d_; ++j) {
        cens_sum_[j] += std::max(log_rows_(i, j), log_a_);
        plain_sum_[j] += log_rows_(i, j);
      }
    }
  }

  void refresh() {
    const std::vector<double> cens_old = cens_sum_;
    recompute_sums();
    const double inv_rows = 1.0 / static_cast<double>(rows_);
    for (std::size_t j = 0; j < d_; ++j) {
      max_drift_ = std::max(max_drift_,
                            std::abs(cens_old[j] - cens_sum_[j]) * inv_rows);
    }
  }

  std::vector<double> released_;
  double log_a_;
  double noise_scale_;
  double like_weight_;
  bool full_weight_;
  std::size_t rows_;
  std::size_t d_;
  const Prior* prior_;

  std::vector<double> alpha_;
  Matrix log_rows_;
  std::vector<double> cens_sum_;
  std::vector<double> plain_sum_;
  std::size_t sweeps_ = 0;
  std::size_t proposals_ = 0;
  std::size_t accepts_ = 0;
  double max_drift_ = 0.0;
};

PosteriorSample run_augmented(const SufficientStatistic& released, double a,
                              double noise_scale, double like_weight,
                              std::size_t latent_rows, const Prior& prior,
                              const SamplerSettings& settings, Rng& rng,
                              std::string method,
                              std::span<const double> alpha_seed) {
  settings.validate();
  const std::size_t d = released.dimension();
  if (d < 2) throw std::invalid_argument(method + ": need d >= 2");
  if (!prior.has_log_density()) {
    throw std::invalid_argument(
        method + ": prior must have an analytic density (p1/p3/p4)");
  }
  const RetentionPlan plan = retention_plan(settings);

  std::vector<Matrix> kept(settings.chains, Matrix(plan.per_chain, d));
  std::vector<std::size_t> proposals(settings.chains, 0);
  std::vector<std::size_t> accepts(settings.chains, 0);
  std::vector<double> drifts(settings.chains, 0.0);

  run_per_chain(settings.chains, settings.threads, [&](std::size_t c) {
    Rng chain_rng = rng.derive(c);
    AugmentedChain chain(released.values, a, noise_scale, like_weight,
                         latent_rows, prior);
    chain.init(jitter_alpha(alpha_seed, chain_rng), chain_rng);
    std::size_t kept_count = 0;
    for (std::size_t t = 1; t <= settings.iterations; ++t) {
      chain.sweep(chain_rng);
      if (t > settings.burn_in && (t - settings.burn_in) % plan.thin == 0 &&
          kept_count < plan.per_chain) {
        std::copy(chain.alpha().begin(), chain.alpha().end(),
                  kept[c].row(kept_count).begin());
        ++kept_count;
      }
    }
    proposals[c] = chain.proposals();
    accepts[c] = chain.accepts();
    drifts[c] = chain.max_drift();
  });

  PosteriorSample out = assemble_sample(std::move(kept), std::move(method),
                                        rng.seed());
  const double total_props = static_cast<double>(
      std::accumulate(proposals.begin(), proposals.end(), std::size_t{0}));
  const double total_accepts = static_cast<double>(
      std::accumulate(accepts.begin(), accepts.end(), std::size_t{0}));
  out.diagnostics.record_accept_rate =
      total_props > 0.0 ? total_accepts / total_props : 0.0;
  out.diagnostics.stat_refresh_drift = *std::max_element(drifts.begin(),
                                                         drifts.end());
  return out;
}

}  // namespace

PosteriorSample dpmcmc(const SufficientStatistic& released, double a,
                       double eps1, std::size_t n, const Prior& prior,
                       const SamplerSettings& settings, Rng& rng) {
  const double scale = laplace_scale(a, n, released.dimension(), eps1);
  const std::vector<double> seed_alpha = initial_alpha(released, prior);
  return run_augmented(released, a, scale, static_cast<double>(n), n, prior,
                       settings, rng, "dpmcmc_" + prior.label(), seed_alpha);
}

PosteriorSample dpremcmc(const SufficientStatistic& released_partition2,
                         double a, double eps1, std::size_t n2, std::size_t b,
                         const Prior& prior, const SamplerSettings& settings,
                         Rng& rng) {
  if (b < 1 || b > n2) {
    throw std::invalid_argument("dpremcmc: need 1 <= b <= n2");
  }
  const double scale =
      laplace_scale(a, n2, released_partition2.dimension(), eps1);
  // Pseudo-records start from the prior mean.
  const std::vector<double> seed_alpha = prior.mean();
  return run_augmented(released_partition2, a, scale, static_cast<double>(n2),
                       b, prior, settings, rng, "dpremcmc_" + prior.label(),
                       seed_alpha);
}

PosteriorSample mcmc_benchmark(const SufficientStatistic& plain_stat,
                               std::size_t n, const Prior& prior,
                               const SamplerSettings& settings, Rng& rng) {
  settings.validate();
  const std::size_t d = plain_stat.dimension();
  if (d < 2) throw std::invalid_argument("mcmc_benchmark: need d >= 2");
  if (!prior.has_log_density()) {
    throw std::invalid_argument("mcmc_benchmark: prior must have a density");
  }
  const RetentionPlan plan = retention_plan(settings);
  const std::vector<double> seed_alpha = initial_alpha(plain_stat, prior);

  std::vector<Matrix> kept(settings.chains, Matrix(plan.per_chain, d));
  run_per_chain(settings.chains, settings.threads, [&](std::size_t c) {
    Rng chain_rng = rng.derive(c);
    std::vector<double> alpha = jitter_alpha(seed_alpha, chain_rng);
    std::size_t kept_count = 0;
    for (std::size_t t = 1; t <= settings.iterations; ++t) {
      slice_update_alpha(alpha, plain_stat.values, static_cast<double>(n),
                         prior, chain_rng);
      if (t > settings.burn_in && (t - settings.burn_in) % plan.thin == 0 &&
          kept_count < plan.per_chain) {
        std::copy(alpha.begin(), alpha.end(), kept[c].row(kept_count).begin());
        ++kept_count;
      }
    }
  });
  return assemble_sample(std::move(kept), "mcmc_" + prior.label(), rng.seed());
}

PosteriorSample dpabc(const SufficientStatistic& released_partition2, double a,
                      double eps1, std::size_t n2, const Prior& prior_sampler,
                      std::size_t total_simulations, double accept_rate,
                      Rng& rng) {
  if (total_simulations < 1000) {
    throw std::invalid_argument("dpabc: need at least 1000 simulations");
  }
  if (!(accept_rate > 0.0 && accept_rate <= 1.0)) {
    throw std::invalid_argument("dpabc: accept_rate must lie in (0, 1]");
  }
  const std::size_t d = released_partition2.dimension();
  const double scale = laplace_scale(a, n2, d, eps1);

  Matrix candidates(total_simulations, d);
  std::vector<double> distance(total_simulations);
  std::vector<double> stat(d);
  for (std::size_t k = 0; k < total_simulations; ++k) {
    const Rng base = rng.derive(k);
    Rng prior_rng = base.derive(0);
    Rng data_rng = base.derive(1);
    Rng noise_rng = base.derive(2);
    const std::vector<double> alpha = prior_sampler.sample(prior_rng);
    const DirichletParams params(alpha);
    const CompositionalDataset data = dirichlet_sample(params, n2, data_rng);
    const SufficientStatistic sim = sufficient_stat(data, a);
    double dist_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      stat[j] = sim.values[j] + laplace_draw(noise_rng, scale);
      const double diff = stat[j] - released_partition2.values[j];
      dist_sq += diff * diff;
    }
    distance[k] = std::sqrt(dist_sq);
    std::copy(alpha.begin(), alpha.end(), candidates.row(k).begin());
  }

  const std::size_t accept_count = std::min<std::size_t>(
      total_simulations,
      std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(
                 accept_rate * static_cast<double>(total_simulations)))));
  std::vector<std::size_t> order(total_simulations);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + (accept_count - 1),
                   order.end(), [&](std::size_t x, std::size_t y) {
                     return distance[x] < distance[y];
                   });
  const double delta = distance[order[accept_count - 1]];
  std::vector<std::size_t> accepted(order.begin(),
                                    order.begin() + accept_count);
  std::sort(accepted.begin(), accepted.end());  // simulation-index order

  PosteriorSample out;
  out.method = "dpabc_" + prior_sampler.label();
  out.draws = Matrix(accept_count, d);
  out.chain_ids.assign(accept_count, 0);
  for (std::size_t i = 0; i < accept_count; ++i) {
    const auto src = candidates.row(accepted[i]);
    std::copy(src.begin(), src.end(), out.draws.row(i).begin());
  }
  out.diagnostics.seed = rng.seed();
  out.diagnostics.retained_per_chain = accept_count;
  out.diagnostics.abc_delta = delta;
  out.diagnostics.abc_realized_rate =
      static_cast<double>(accept_count) /
      static_cast<double>(total_simulations);
  // Accepted draws are exchangeable; pseudo-chains over the accepted order
  // give a convergence column comparable with the MCMC methods.
  if (accept_count >= 16) {
    const std::size_t pseudo = 4;
    const std::size_t len = accept_count / pseudo;
    std::vector<Matrix> pseudo_chains(pseudo, Matrix(len, d));
    for (std::size_t c = 0; c < pseudo; ++c) {
      for (std::size_t t = 0; t < len; ++t) {
        const auto src = out.draws.row(c * len + t);
        std::copy(src.begin(), src.end(), pseudo_chains[c].row(t).begin());
      }
    }
    out.diagnostics.split_rhat = split_rhat(pseudo_chains);
    out.diagnostics.rhat_max = *std::max_element(
        out.diagnostics.split_rhat.begin(), out.diagnostics.split_rhat.end());
  }
  return out;
}

std::vector<double> stat_asymptotic_mean(const DirichletParams& params) {
  return expected_sufficient_stat(params);
}

std::vector<double> stat_asymptotic_cov(const DirichletParams& params) {
  const std::size_t d = params.dimension();
  const double tri_sum = trigamma(params.sum());
  std::vector<double> cov(d * d, -tri_sum);
  for (std::size_t j = 0; j < d; ++j) {
    cov[j * d + j] = trigamma(params.alpha[j]) - tri_sum;
  }
  return cov;
}

namespace {

// Gibbs state for the asymptotic-normal model with the noise written as a
// normal scale mixture (noise_j | tau_j ~ N(0, tau_j), tau_j exponential).
class ApproxChain {
 public:
  ApproxChain(std::span<const double> released, double noise_scale,
              std::size_t n, const Prior& prior)
      : released_(released.begin(), released.end()),
        m_(noise_scale),
        n_(static_cast<double>(n)),
        d_(released.size()),
        prior_(&prior),
        tau_(released.size(), 2.0 * noise_scale * noise_scale),
        stat_(released.begin(), released.end()) {
    // Start the latent statistic inside the feasible region.
    for (double& v : stat_) v = std::min(v, -1e-6);
    double sum_exp = 0.0;
    for (double v : stat_) sum_exp += std::exp(v);
    if (sum_exp > 1.0) {
      const double shift = std::log(sum_exp) + 0.01;
      for (double& v : stat_) v -= shift;
    }
  }

  void set_alpha(std::vector<double> alpha) { alpha_ = std::move(alpha); }
  const std::vector<double>& alpha() const { return alpha_; }

  void sweep(Rng& rng) {
    update_stat(rng);
    update_tau(rng);
    update_alpha(rng);
  }

 private:
  std::vector<double> model_cov() const {
    return stat_asymptotic_cov(DirichletParams(alpha_));
  }

  void update_stat(Rng& rng) {
    std::vector<double> sigma = model_cov();
    std::vector<double> chol;
    try {
      chol = cholesky_lower(sigma, d_);
    } catch (const std::runtime_error&) {
      std::ostringstream os;
      os << "dpapprox: model covariance numerically singular at alpha = [";
      for (std::size_t j = 0; j < d_; ++j) os << (j ? ", " : "") << alpha_[j];
      os << "]";
      throw std::runtime_error(os.str());
    }
    const std::vector<double> mu =
        stat_asymptotic_mean(DirichletParams(alpha_));
    // Precision of stat | rest: n Sigma^{-1} + diag(1/tau); mean solves
    // P mean = n Sigma^{-1} mu + released / tau.
    std::vector<double> inv_sigma(d_ * d_);
    std::vector<double> unit(d_, 0.0);
    for (std::size_t k = 0; k < d_; ++k) {
      unit[k] = 1.0;
      const std::vector<double> col = cholesky_solve(chol, unit, d_);
      for (std::size_t i = 0; i < d_; ++i) inv_sigma[i * d_ + k] = col[i];
      unit[k] = 0.0;
    }
    std::vector<double> precision(d_ * d_);
    std::vector<double> rhs(d_, 0.0);
    for (std::size_t i = 0; i < d_; ++i) {
      for (std::size_t k = 0; k < d_; ++k) {
        precision[i * d_ + k] = n_ * inv_sigma[i * d_ + k];
        rhs[i] += n_ * inv_sigma[i * d_ + k] * mu[k];
      }
      precision[i * d_ + i] += 1.0 / tau_[i];
      rhs[i] += released_[i] / tau_[i];
    }
    const std::vector<double> chol_p = cholesky_lower(precision, d_);
    const std::vector<double> mean = cholesky_solve(chol_p, rhs, d_);
    // Draw with covariance P^{-1}: solve L^T x = z.
    std::vector<double> z(d_);
    for (double& v : z) v = rng.normal();
    std::vector<double> x(d_);
    for (std::size_t ii = d_; ii-- > 0;) {
      double sum = z[ii];
      for (std::size_t k = ii + 1; k < d_; ++k) {
        sum -= chol_p[k * d_ + ii] * x[k];
      }
      x[ii] = sum / chol_p[ii * d_ + ii];
    }
    for (std::size_t j = 0; j < d_; ++j) stat_[j] = mean[j] + x[j];
  }

  void update_tau(Rng& rng) {
    const double shape = 1.0 / (m_ * m_);
    for (std::size_t j = 0; j < d_; ++j) {
      const double gap = std::max(std::abs(released_[j] - stat_[j]), 1e-290);
      const double inv_tau =
          inverse_gaussian_draw(rng, 1.0 / (m_ * gap), shape);
      tau_[j] = std::clamp(1.0 / inv_tau, 1e-290, 1e290);
    }
  }

  double stat_log_density(std::span<const double> alpha) const {
    const DirichletParams params(std::vector<double>(alpha.begin(), alpha.end()));
    const std::vector<double> sigma = stat_asymptotic_cov(params);
    std::vector<double> chol;
    try {
      chol = cholesky_lower(sigma, d_);
    } catch (const std::runtime_error&) {
      return -std::numeric_limits<double>::infinity();
    }
    const std::vector<double> mu = stat_asymptotic_mean(params);
    std::vector<double> centered(d_);
    for (std::size_t j = 0; j < d_; ++j) centered[j] = stat_[j] - mu[j];
    const double quad = n_ * mahalanobis_sq(chol, centered, d_);
    const double log_det = cholesky_log_det(chol, d_) -
                           static_cast<double>(d_) * std::log(n_);
    return -0.5 * (log_det + quad);
  }

  void update_alpha(Rng& rng) {
    for (std::size_t j = 0; j < d_; ++j) {
      const double y0 = std::log(alpha_[j]);
      std::vector<double> trial(alpha_);
      const auto target = [&](double y) {
        if (y < -300.0 || y > 300.0) {
          return -std::numeric_limits<double>::infinity();
        }
        trial[j] = std::exp(y);
        const double ll = stat_log_density(trial);
        if (!std::isfinite(ll)) return ll;
        return ll + prior_->log_density(trial) + y;
      };
      const double y1 = slice_sample(y0, target, rng);
      alpha_[j] = std::exp(y1);
    }
  }

  std::vector<double> released_;
  double m_;
  double n_;
  std::size_t d_;
  const Prior* prior_;

  std::vector<double> alpha_;
  std::vector<double> tau_;
  std::vector<double> stat_;
};

}  // namespace

PosteriorSample dpapprox(const SufficientStatistic& released, double a,
                         double eps1, std::size_t n, const Prior& prior,
                         const SamplerSettings& settings, Rng& rng) {
  settings.validate();
  const std::size_t d = released.dimension();
  if (d < 2) throw std::invalid_argument("dpapprox: need d >= 2");
  if (!prior.has_log_density()) {
    throw std::invalid_argument("dpapprox: prior must have a density");
  }
  const double scale = laplace_scale(a, n, d, eps1);
  const RetentionPlan plan = retention_plan(settings);
  const std::vector<double> seed_alpha = initial_alpha(released, prior);

  std::vector<Matrix> kept(settings.chains, Matrix(plan.per_chain, d));
  run_per_chain(settings.chains, settings.threads, [&](std::size_t c) {
    Rng chain_rng = rng.derive(c);
    ApproxChain chain(released.values, scale, n, prior);
    chain.set_alpha(jitter_alpha(seed_alpha, chain_rng));
    std::size_t kept_count = 0;
    for (std::size_t t = 1; t <= settings.iterations; ++t) {
      chain.sweep(chain_rng);
      if (t > settings.burn_in && (t - settings.burn_in) % plan.thin == 0 &&
          kept_count < plan.per_chain) {
        std::copy(chain.alpha().begin(), chain.alpha().end(),
                  kept[c].row(kept_count).begin());
        ++kept_count;
      }
    }
  });
  return assemble_sample(std::move(kept), "dpapprox_" + prior.label(),
                         rng.seed());
}

Matrix posterior_predictive(const PosteriorSample& sample,
                            std::size_t draws_per_alpha, Rng& rng) {
  if (sample.draws.rows == 0) {
    throw std::invalid_argument("posterior_predictive: empty sample");
  }
  if (draws_per_alpha < 1) {
    throw std::invalid_argument("posterior_predictive: draws_per_alpha >= 1");
  }
  const std::size_t d = sample.draws.cols;
  Matrix out(sample.draws.rows * draws_per_alpha, d);
  for (std::size_t t = 0; t < sample.draws.rows; ++t) {
    Rng row_rng = rng.derive(t);
    const auto row = sample.draws.row(t);
    const DirichletParams params(std::vector<double>(row.begin(), row.end()));
    for (std::size_t r = 0; r < draws_per_alpha; ++r) {
      dirichlet_draw_row(params, row_rng, out.row(t * draws_per_alpha + r));
    }
  }
  return out;
}

Prior make_p5(const SufficientStatistic& released_partition1, double eps1,
              double a, std::size_t n1, const Prior& inner_prior,
              const SamplerSettings& settings, Rng& rng) {
  SamplerSettings s = settings;
  s.total_draws = std::max<std::size_t>(s.total_draws, 1000);
  for (int attempt = 0; attempt < 4; ++attempt) {
    Rng attempt_rng = rng.derive(attempt);
    const PosteriorSample sample = dpmcmc(released_partition1, a, eps1, n1,
                                          inner_prior, s, attempt_rng);
    if (sample.diagnostics.split_rhat.empty() ||
        sample.diagnostics.rhat_max <= 1.1) {
      return Prior::pool(sample.draws, "p5");
    }
    // Retry with a longer run before giving up.
    s.iterations *= 2;
    s.burn_in *= 2;
  }
  throw std::runtime_error(
      "make_p5: pool chains failed the split-Rhat <= 1.1 gate");
}

std::vector<double> dpmcmc_kernel_sweeps(const SufficientStatistic& released,
                                         double a, double eps1,
                                         const CompositionalDataset& data0,
                                         std::span<const double> alpha0,
                                         const Prior& prior,
                                         std::size_t sweeps, Rng& rng) {
  const std::size_t n = data0.record_count();
  const double scale = laplace_scale(a, n, released.dimension(), eps1);
  AugmentedChain chain(released.values, a, scale, static_cast<double>(n), n,
                       prior);
  chain.init_from_data(data0, alpha0);
  for (std::size_t t = 0; t < sweeps; ++t) chain.sweep(rng);
  return chain.alpha();
}

}  // namespace dpdir
