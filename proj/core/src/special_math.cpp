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

#include "dpdir/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dpdir {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008;

void require_positive(double x, const char* who) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error(std::string(who) +
                            ": argument must be positive and finite (got " +
                            std::to_string(x) + ")");
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  return std::lgamma(x);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double acc = 0.0;
  while (x < 6.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double s = std::log(x) - 0.5 * inv;
  double p = inv2;
  s -= p * (1.0 / 12.0);
  p *= inv2;
  s += p * (1.0 / 120.0);
  p *= inv2;
  s -= p * (1.0 / 252.0);
  p *= inv2;
  s += p * (1.0 / 240.0);
  p *= inv2;
  s -= p * (1.0 / 132.0);
  p *= inv2;
  s += p * (691.0 / 32760.0);
  p *= inv2;
  s -= p * (1.0 / 12.0);
  return acc + s;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double acc = 0.0;
  while (x < 6.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double s = inv + 0.5 * inv2;
  double p = inv * inv2;
  s += p * (1.0 / 6.0);
  p *= inv2;
  s -= p * (1.0 / 30.0);
  p *= inv2;
  s += p * (1.0 / 42.0);
  p *= inv2;
  s -= p * (1.0 / 30.0);
  p *= inv2;
  s += p * (5.0 / 66.0);
  p *= inv2;
  s -= p * (691.0 / 2730.0);
  p *= inv2;
  s += p * (7.0 / 6.0);
  return acc + s;
}

double digamma_inverse(double y) {
  // Starting point from Minka: exp(y) + 1/2 on the right branch,
  // -1/(y + gamma) near the pole.
  double x = (y >= -2.22) ? std::exp(y) + 0.5 : -1.0 / (y + kEulerGamma);
  for (int it = 0; it < 60; ++it) {
    const double f = digamma(x) - y;
    const double step = f / trigamma(x);
    double next = x - step;
    if (next <= 0.0) next = x * 0.5;
    if (std::abs(next - x) <= 1e-14 * (1.0 + std::abs(next))) return next;
    x = next;
  }
  return x;
}

double log_beta(double p, double q) {
  require_positive(p, "log_beta");
  require_positive(q, "log_beta");
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double p, double q, double x) {
  require_positive(p, "reg_inc_beta");
  require_positive(q, "reg_inc_beta");
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("reg_inc_beta: x must lie in [0, 1] (got " +
                            std::to_string(x) + ")");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front =
      p * std::log(x) + q * std::log1p(-x) - log_beta(p, q);
  if (x < (p + 1.0) / (p + q + 2.0)) {
    return std::exp(ln_front) * beta_cont_frac(p, q, x) / p;
  }
  return 1.0 - std::exp(ln_front) * beta_cont_frac(q, p, 1.0 - x) / q;
}

double reg_inc_gamma_lower(double a, double x) {
  require_positive(a, "reg_inc_gamma");
  if (x < 0.0) {
    throw std::domain_error("reg_inc_gamma: x must be non-negative");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series representation.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 1; n <= 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 3e-16) {
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
      }
    }
    throw std::runtime_error("reg_inc_gamma: series did not converge");
  }
  return 1.0 - reg_inc_gamma_upper(a, x);
}

double reg_inc_gamma_upper(double a, double x) {
  require_positive(a, "reg_inc_gamma");
  if (x < 0.0) {
    throw std::domain_error("reg_inc_gamma: x must be non-negative");
  }
  if (x < a + 1.0) return 1.0 - reg_inc_gamma_lower(a, x);
  // Lentz continued fraction for Q(a, x).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw std::runtime_error("reg_inc_gamma: continued fraction did not converge");
}

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("norm_quantile: p must lie in (0, 1) (got " +
                            std::to_string(p) + ")");
  }
  // Wichura's AS 241 (PPND16), good to ~1e-15.
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) *
                 r +
             4.5921953931549871457e+4) *
                r +
            1.3731693765509461125e+4) *
               r +
           1.9715909503065514427e+3) *
              r +
          1.3314166789178437745e+2) *
             r +
         3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) *
                 r +
             2.1213794301586595867e+4) *
                r +
            5.3941960214247511077e+3) *
               r +
           6.8718700749205790830e+2) *
              r +
          4.2313330701600911252e+1) *
             r +
         1.0);
    return q * num / den;
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) *
                 r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) *
                 r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) *
                 r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) *
                 r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double gamma_log_pdf(double x, double shape, double rate) {
  require_positive(shape, "gamma_log_pdf");
  require_positive(rate, "gamma_log_pdf");
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

double gamma_cdf(double x, double shape, double rate) {
  require_positive(shape, "gamma_cdf");
  require_positive(rate, "gamma_cdf");
  if (x <= 0.0) return 0.0;
  return reg_inc_gamma_lower(shape, rate * x);
}

double gamma_quantile(double p, double shape, double rate) {
  require_positive(shape, "gamma_quantile");
  require_positive(rate, "gamma_quantile");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("gamma_quantile: p must lie in (0, 1)");
  }
  // Wilson-Hilferty start, then safeguarded Newton on the CDF.
  const double z = norm_quantile(p);
  const double c = 1.0 / (9.0 * shape);
  double x = shape * std::pow(std::max(1.0 - c + z * std::sqrt(c), 0.05), 3.0);
  if (x <= 0.0 || !std::isfinite(x)) x = shape;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = reg_inc_gamma_lower(shape, x) - p;
    if (f > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    const double log_pdf = (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
    const double step = f / std::exp(log_pdf);
    double next = x - step;
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
    }
    if (std::abs(next - x) <= 1e-13 * (1.0 + std::abs(next))) {
      return next / rate;
    }
    x = next;
  }
  return x / rate;
}

double gamma_draw(Rng& rng, double shape, double rate) {
  require_positive(shape, "gamma_draw");
  require_positive(rate, "gamma_draw");
  if (shape < 1.0) {
    const double g = gamma_draw(rng, shape + 1.0, 1.0);
    const double u = rng.uniform01();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v / rate;
    }
  }
}

GammaFit gamma_mle(std::span<const double> sample) {
  if (sample.size() < 2) {
    throw std::invalid_argument("gamma_mle: need at least 2 values");
  }
  double mean = 0.0;
  double mean_log = 0.0;
  for (double v : sample) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::domain_error("gamma_mle: sample values must be positive");
    }
    mean += v;
    mean_log += std::log(v);
  }
  mean /= static_cast<double>(sample.size());
  mean_log /= static_cast<double>(sample.size());
  const double s = std::log(mean) - mean_log;  // > 0 unless degenerate
  if (!(s > 1e-13)) {
    throw std::runtime_error(
        "gamma_mle: degenerate sample (no spread in log values)");
  }
  double a = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) /
             (12.0 * s);
  for (int it = 0; it < 200; ++it) {
    const double f = std::log(a) - digamma(a) - s;
    const double fp = 1.0 / a - trigamma(a);
    double next = a - f / fp;
    if (next <= 0.0) next = a * 0.5;
    if (std::abs(next - a) <= 1e-12 * (1.0 + std::abs(next))) {
      return GammaFit{next, next / mean};
    }
    a = next;
  }
  throw std::runtime_error("gamma_mle: Newton iteration did not converge");
}

std::vector<double> mvn_draw(Rng& rng, const std::vector<double>& chol_lower,
                             std::size_t d) {
  std::vector<double> z(d);
  for (std::size_t j = 0; j < d; ++j) z[j] = rng.normal();
  std::vector<double> out(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += chol_lower[i * d + j] * z[j];
    out[i] = acc;
  }
  return out;
}

double inverse_gaussian_draw(Rng& rng, double mean, double shape) {
  require_positive(mean, "inverse_gaussian_draw");
  require_positive(shape, "inverse_gaussian_draw");
  mean = std::min(mean, 1e12);  // guards the quadratic against overflow
  const double z = rng.normal();
  const double y = z * z;
  double x = mean + mean * mean * y / (2.0 * shape) -
             (mean / (2.0 * shape)) *
                 std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  if (!(x > 0.0)) x = 1e-300;
  if (rng.uniform01() <= mean / (mean + x)) return x;
  return mean * mean / x;
}

}  // namespace dpdir
