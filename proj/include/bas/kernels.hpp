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

#ifndef BAS_KERNELS_HPP_
#define BAS_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bas/metrics_core.hpp"
#include "bas/types.hpp"

// Data-parallel inner loops. `serial` is the reference implementation and
// `omp` the OpenMP one; for identical inputs the two return bitwise-identical
// results regardless of thread count. Without BAS_HAVE_OPENMP the omp
// variants run single-threaded.
namespace bas::kernels {

// Statistic evaluated on a resample, given as indices into the original
// data. Must be safe to call concurrently.
using IndexStatistic = std::function<double(std::span<const std::size_t>)>;

// Indices of the `resample`-th bootstrap draw: n draws with replacement from
// [0, n). Depends only on (n, seed, resample).
std::vector<std::size_t> resample_indices(std::size_t n, std::uint64_t seed,
                                          std::size_t resample);

namespace serial {

// Per-record weighted_bas_utility of the clipped confidences.
std::vector<double> weighted_utilities(std::span<const Prediction> records,
                                       const RiskPrior& prior, ClipEpsilon eps);

// statistic(resample_indices(n, seed, b)) for b = 0 .. n_resamples - 1.
std::vector<double> bootstrap_replicates(std::size_t n,
                                         const IndexStatistic& statistic,
                                         std::size_t n_resamples,
                                         std::uint64_t seed);

}  // namespace serial

namespace omp {

std::vector<double> weighted_utilities(std::span<const Prediction> records,
                                       const RiskPrior& prior, ClipEpsilon eps);

std::vector<double> bootstrap_replicates(std::size_t n,
                                         const IndexStatistic& statistic,
                                         std::size_t n_resamples,
                                         std::uint64_t seed);

}  // namespace omp

int max_threads();

}  // namespace bas::kernels

#endif  // BAS_KERNELS_HPP_
