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

#include "dpdir/linalg.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dpdir {

namespace {

std::string format_matrix(const std::vector<double>& a, std::size_t d) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < d; ++i) {
    os << (i ? "; " : "");
    for (std::size_t j = 0; j < d; ++j) os << (j ? ", " : "") << a[i * d + j];
  }
  os << "]";
  return os.str();
}

}  // namespace

std::vector<double> cholesky_lower(const std::vector<double>& a,
                                   std::size_t d) {
  std::vector<double> L(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) sum -= L[i * d + k] * L[j * d + k];
      if (i == j) {
        if (!(sum > 0.0)) {
          throw std::runtime_error(
              "cholesky_lower: matrix not positive definite: " +
              format_matrix(a, d));
        }
        L[i * d + j] = std::sqrt(sum);
      } else {
        L[i * d + j] = sum / L[j * d + j];
      }
    }
  }
  return L;
}

std::vector<double> cholesky_solve(const std::vector<double>& L,
                                   std::span<const double> b, std::size_t d) {
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= L[i * d + k] * y[k];
    y[i] = sum / L[i * d + i];
  }
  std::vector<double> x(d);
  for (std::size_t ii = d; ii-- > 0;) {
    double sum = y[ii];
    for (std::size_t k = ii + 1; k < d; ++k) sum -= L[k * d + ii] * x[k];
    x[ii] = sum / L[ii * d + ii];
  }
  return x;
}

double cholesky_log_det(const std::vector<double>& L, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) acc += std::log(L[i * d + i]);
  return 2.0 * acc;
}

double mahalanobis_sq(const std::vector<double>& L, std::span<const double> x,
                      std::size_t d) {
  // Forward-solve L y = x, then |y|^2.
  double acc = 0.0;
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    double sum = x[i];
    for (std::size_t k = 0; k < i; ++k) sum -= L[i * d + k] * y[k];
    y[i] = sum / L[i * d + i];
    acc += y[i] * y[i];
  }
  return acc;
}

std::vector<double> symmetric_eigen(const std::vector<double>& a,
                                    std::size_t d,
                                    std::vector<double>* vectors) {
  std::vector<double> m = a;
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) off += m[i * d + j] * m[i * d + j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = m[p * d + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (m[q * d + q] - m[p * d + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double mkp = m[k * d + p];
          const double mkq = m[k * d + q];
          m[k * d + p] = c * mkp - s * mkq;
          m[k * d + q] = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double mpk = m[p * d + k];
          const double mqk = m[q * d + k];
          m[p * d + k] = c * mpk - s * mqk;
          m[q * d + k] = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p];
          const double vkq = v[k * d + q];
          v[k * d + p] = c * vkp - s * vkq;
          v[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> eig(d);
  for (std::size_t i = 0; i < d; ++i) eig[i] = m[i * d + i];
  if (vectors != nullptr) *vectors = v;
  return eig;
}

std::vector<double> repair_correlation(const std::vector<double>& a,
                                       std::size_t d, double floor,
                                       bool* repaired) {
  std::vector<double> vecs;
  std::vector<double> eig = symmetric_eigen(a, d, &vecs);
  bool fixed = false;
  for (double& e : eig) {
    if (e < floor) {
      e = floor;
      fixed = true;
    }
  }
  if (repaired != nullptr) *repaired = fixed;
  if (!fixed) return a;
  std::vector<double> out(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        acc += vecs[i * d + k] * eig[k] * vecs[j * d + k];
      }
      out[i * d + j] = acc;
    }
  }
  // Rescale back to unit diagonal.
  std::vector<double> scale(d);
  for (std::size_t i = 0; i < d; ++i) scale[i] = std::sqrt(out[i * d + i]);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      out[i * d + j] /= scale[i] * scale[j];
    }
  }
  return out;
}

}  // namespace dpdir
