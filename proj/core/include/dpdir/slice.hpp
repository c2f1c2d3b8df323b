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

#ifndef DPDIR_SLICE_HPP_
#define DPDIR_SLICE_HPP_

#include <cmath>

#include "dpdir/rng.hpp"

namespace dpdir {

// Univariate slice sampler with stepping out and shrinkage, randomized
// step-out budget split between the two directions.
template <typename LogDensity>
double slice_sample(double x0, LogDensity&& log_f, Rng& rng,
                    double width = 1.0, int max_step_out = 50) {
  const double g0 = log_f(x0);
  if (!std::isfinite(g0)) return x0;
  const double log_y = g0 - rng.exponential(1.0);

  const double u = rng.uniform01() * width;
  double lo = x0 - u;
  double hi = x0 + (width - u);
  int j = static_cast<int>(std::floor(rng.uniform01() * max_step_out));
  int k = max_step_out - 1 - j;
  while (j-- > 0 && log_f(lo) > log_y) lo -= width;
  while (k-- > 0 && log_f(hi) > log_y) hi += width;

  for (int it = 0; it < 1000; ++it) {
    const double x1 = lo + rng.uniform01() * (hi - lo);
    if (log_f(x1) >= log_y) return x1;
    if (x1 > x0) {
      hi = x1;
    } else {
      lo = x1;
    }
  }
  return x0;  // pathologically narrow slice; keep the current point
}

}  // namespace dpdir

#endif  // DPDIR_SLICE_HPP_
