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

#ifndef DPDIR_LINALG_HPP_
#define DPDIR_LINALG_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace dpdir {

// Dense symmetric kernels for the small matrices used here (d <= ~10).
// Matrices are row-major length d*d vectors.

// Lower Cholesky factor; throws std::runtime_error with the offending matrix
// printed when the input is not positive definite.
std::vector<double> cholesky_lower(const std::vector<double>& a, std::size_t d);

// Solves A x = b given the lower Cholesky factor of A.
std::vector<double> cholesky_solve(const std::vector<double>& chol_lower,
                                   std::span<const double> b, std::size_t d);

// log det(A) from its lower Cholesky factor.
double cholesky_log_det(const std::vector<double>& chol_lower, std::size_t d);

// x' A^{-1} x given the lower Cholesky factor of A.
double mahalanobis_sq(const std::vector<double>& chol_lower,
                      std::span<const double> x, std::size_t d);

// Symmetric eigendecomposition by cyclic Jacobi. Returns eigenvalues;
// eigenvectors (columns) are written to `vectors` when non-null.
std::vector<double> symmetric_eigen(const std::vector<double>& a, std::size_t d,
                                    std::vector<double>* vectors);

// Clips eigenvalues below `floor`, reassembles, and rescales to unit
// diagonal. Used to repair estimated correlation matrices.
std::vector<double> repair_correlation(const std::vector<double>& a,
                                       std::size_t d, double floor,
                                       bool* repaired);

}  // namespace dpdir

#endif  // DPDIR_LINALG_HPP_
