/*
 * Copyright 2026 The bas-eval Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference vs OpenMP kernels.

#include <vector>

#include <benchmark/benchmark.h>

#include "bas/kernels.hpp"
#include "bas/synthetic.hpp"

namespace {

std::vector<bas::Prediction> population(std::size_t n) {
  return bas::synthetic::overconfident_population(n, 1);
}

template <auto Fn>
void weighted_utilities(benchmark::State& state) {
  const auto data = population(static_cast<std::size_t>(state.range(0)));
  const auto prior = bas::RiskPrior::quadratic();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(data, prior, bas::ClipEpsilon{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Fn>
void bootstrap_replicates(benchmark::State& state) {
  const auto data = population(static_cast<std::size_t>(state.range(0)));
  std::vector<double> hits;
  for (const auto& p : data) hits.push_back(p.correct ? 1.0 : 0.0);
  const bas::kernels::IndexStatistic mean = [&](std::span<const std::size_t> idx) {
    double sum = 0.0;
    for (std::size_t i : idx) sum += hits[i];
    return sum / static_cast<double>(idx.size());
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(hits.size(), mean, 200, 7));
  }
}

}  // namespace

BENCHMARK(weighted_utilities<bas::kernels::serial::weighted_utilities>)
    ->Name("weighted_utilities/serial")->Arg(1000)->Arg(10000);
BENCHMARK(weighted_utilities<bas::kernels::omp::weighted_utilities>)
    ->Name("weighted_utilities/omp")->Arg(1000)->Arg(10000);
BENCHMARK(bootstrap_replicates<bas::kernels::serial::bootstrap_replicates>)
    ->Name("bootstrap_replicates/serial")->Arg(1000)->Arg(10000);
BENCHMARK(bootstrap_replicates<bas::kernels::omp::bootstrap_replicates>)
    ->Name("bootstrap_replicates/omp")->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
