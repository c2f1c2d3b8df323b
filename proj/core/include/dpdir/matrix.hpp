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

#ifndef DPDIR_MATRIX_HPP_
#define DPDIR_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace dpdir {

// Dense row-major matrix of doubles. Small dimensional throughout this
// library (columns are the number of composition components).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  std::span<double> row(std::size_t i) {
    return std::span<double>(data.data() + i * cols, cols);
  }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data.data() + i * cols, cols);
  }
};

}  // namespace dpdir

#endif  // DPDIR_MATRIX_HPP_
