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

#include "dpdir/censoring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "dpdir/special_math.hpp"

namespace dpdir {

namespace {

void check_threshold(double a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw std::invalid_argument("censoring: threshold must lie in (0, 1)");
  }
}

// 15-point Gauss-Kronrod nodes/weights on [-1, 1] (7-point Gauss embedded).
constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct GkResult {
  double value;
  double error;
};

template <typename F>
GkResult gk15(const F& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double acc_k = 0.0;
  double acc_g = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double v = f(mid + half * kKronrodNodes[i]);
    acc_k += kKronrodWeights[i] * v;
    if (i % 2 == 1) acc_g += kGaussWeights[i / 2] * v;
  }
  return {acc_k * half, std::abs(acc_k - acc_g) * half};
}

template <typename F>
double integrate_adaptive(const F& f, double lo, double hi, double tol,
                          int depth = 0) {
  const GkResult r = gk15(f, lo, hi);
  if (r.error <= tol || depth >= 30) return r.value;
  const double mid = 0.5 * (lo + hi);
  return integrate_adaptive(f, lo, mid, 0.5 * tol, depth + 1) +
         integrate_adaptive(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace

std::vector<double> prob_censored(const DirichletParams& params, double a) {
  check_threshold(a);
  const double total = params.sum();
  std::vector<double> out(params.dimension());
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    out[j] = reg_inc_beta(params.alpha[j], total - params.alpha[j], a);
  }
  return out;
}

double expected_censored_proportion(const DirichletParams& params, double a) {
  const std::vector<double> probs = prob_censored(params, a);
  double acc = 0.0;
  for (double p : probs) acc += p;
  return acc / static_cast<double>(probs.size());
}

BernsteinBound bernstein_bound(const DirichletParams& params,
                               std::size_t component, double a) {
  check_threshold(a);
  const double total = params.sum();
  const double aj = params.alpha[component];
  const double bj = total - aj;
  const double m = aj / total;
  if (a >= m) return BernsteinBound{1.0, true};
  const double v = aj * bj / (total * total * (total + 1.0));
  const double gap = m - a;
  double expo;
  if (aj >= total / 2.0) {
    // Dominant component: the lower tail is the long (left-skewed) one and
    // needs the sub-gamma scale term. The scale enters with magnitude
    // |c| = 2(2 alpha_j - total)/(total (total + 2)); with the sign as
    // displayed in the source derivation the expression is not an upper
    // bound (it undercuts the exact tail for strongly dominant components).
    const double c = 2.0 * (2.0 * aj - total) / (total * (total + 2.0));
    expo = -gap * gap / (2.0 * (v + c * gap / 3.0));
  } else {
    expo = -gap * gap / (2.0 * v);
  }
  return BernsteinBound{std::clamp(std::exp(expo), 0.0, 1.0), false};
}

std::vector<double> censoring_bias(const DirichletParams& params, double a) {
  check_threshold(a);
  const double total = params.sum();
  std::vector<double> out(params.dimension());
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    const double aj = params.alpha[j];
    const double bj = total - aj;
    // Substituting x = a e^{-t} turns the (0, a) integral with its log
    // singularity into a smooth exponentially decaying one on (0, inf):
    // bias = a^aj / B(aj, bj) * int_0^inf t e^{-aj t} (1 - a e^{-t})^{bj-1} dt
    const double ln_front = aj * std::log(a) - log_beta(aj, bj);
    const auto integrand = [aj, bj, a](double t) {
      return t * std::exp(-aj * t + (bj - 1.0) * std::log1p(-a * std::exp(-t)));
    };
    const double t_max = std::max(60.0 / aj, 60.0);
    const double integral = integrate_adaptive(integrand, 0.0, t_max, 1e-12);
    out[j] = std::exp(ln_front) * integral;
  }
  return out;
}

std::optional<double> bias_upper_bound(const DirichletParams& params,
                                       std::size_t component, double a) {
  check_threshold(a);
  const double aj = params.alpha[component];
  if (aj <= 1.0) return std::nullopt;
  const double bj = params.sum() - aj;
  const double log_ratio = log_beta(aj - 1.0, bj) - log_beta(aj, bj);
  return std::exp(log_ratio) * reg_inc_beta(aj - 1.0, bj, a);
}

CensoringReport build_censoring_report(const DirichletParams& params,
                                       double a) {
  CensoringReport report;
  report.threshold = a;
  report.per_component_prob = prob_censored(params, a);
  report.expected_proportion = expected_censored_proportion(params, a);
  report.per_component_bias = censoring_bias(params, a);
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    report.bernstein_bounds.push_back(bernstein_bound(params, j, a));
    report.bias_upper_bounds.push_back(bias_upper_bound(params, j, a));
  }
  return report;
}

}  // namespace dpdir
