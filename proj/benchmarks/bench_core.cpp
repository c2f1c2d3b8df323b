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

#include <benchmark/benchmark.h>

#include "dpdir/bootstrap.hpp"
#include "dpdir/dirichlet.hpp"
#include "dpdir/mechanisms.hpp"
#include "dpdir/samplers.hpp"
#include "dpdir/special_math.hpp"

namespace {

using namespace dpdir;

void BM_Digamma(benchmark::State& state) {
  double x = 0.37;
  for (auto _ : state) {
    benchmark::DoNotOptimize(digamma(x));
    x += 1e-6;
  }
}
BENCHMARK(BM_Digamma);

void BM_RegIncBeta(benchmark::State& state) {
  double x = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(reg_inc_beta(2.2, 7.7, x));
    x = (x < 0.99) ? x + 1e-5 : 0.001;
  }
}
BENCHMARK(BM_RegIncBeta);

void BM_DirichletSampleRow(benchmark::State& state) {
  Rng rng(1);
  const DirichletParams alpha({2.2, 3.3, 4.4});
  std::vector<double> row(3);
  for (auto _ : state) {
    dirichlet_draw_row(alpha, rng, row);
    benchmark::DoNotOptimize(row.data());
  }
}
BENCHMARK(BM_DirichletSampleRow);

void BM_DirichletMle(benchmark::State& state) {
  const DirichletParams truth({2.2, 3.3, 4.4});
  SufficientStatistic stat;
  stat.values = expected_sufficient_stat(truth);
  stat.basis_count = 1000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dirichlet_mle(stat));
  }
}
BENCHMARK(BM_DirichletMle);

void BM_Release(benchmark::State& state) {
  Rng data_rng(2);
  const auto data =
      dirichlet_sample(DirichletParams({2.2, 3.3, 4.4}),
                       static_cast<std::size_t>(state.range(0)), data_rng);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(++seed);
    benchmark::DoNotOptimize(
        release(data, default_candidates(), 0.375, 1.125, 0, 0, rng));
  }
}
BENCHMARK(BM_Release)->Arg(1000)->Arg(5000);

void BM_BootstrapIteration(benchmark::State& state) {
  const DirichletParams truth({3.3, 4.4});
  SufficientStatistic stat;
  stat.values = expected_sufficient_stat(truth);
  stat.threshold = 0.01;
  stat.basis_count = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(++seed);
    benchmark::DoNotOptimize(
        dp_bootstrap(stat, 0.375, 0.01, stat.basis_count, 1, rng));
  }
}
BENCHMARK(BM_BootstrapIteration)->Arg(1000)->Arg(5000);

void BM_DpMcmcSweep(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const DirichletParams truth({2.2, 3.3, 4.4});
  Rng data_rng(3);
  const auto data = dirichlet_sample(truth, n, data_rng);
  const SufficientStatistic released = sufficient_stat(data, 0.01);
  const Prior p1 = make_p1(3);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(++seed);
    benchmark::DoNotOptimize(dpmcmc_kernel_sweeps(
        released, 0.01, 0.375, data, truth.alpha, p1, 1, rng));
  }
}
BENCHMARK(BM_DpMcmcSweep)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
