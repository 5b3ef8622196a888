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

#ifndef BAS_SYNTHETIC_HPP_
#define BAS_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bas/types.hpp"

namespace bas::synthetic {

// Latent accuracy p ~ U(p_low, p_high), stated confidence s = p^gamma
// (gamma < 1 inflates it), label Z ~ Bernoulli(p).
struct OverconfidentConfig {
  double gamma = 0.25;
  double p_low = 0.05;
  double p_high = 0.95;
};

std::vector<Prediction> overconfident_population(std::size_t n, std::uint64_t seed,
                                                 const OverconfidentConfig& config = {});

// n records with the same stated confidence and Z ~ Bernoulli(p).
std::vector<Prediction> bernoulli_population(std::size_t n, double p, double confidence,
                                             std::uint64_t seed);

}  // namespace bas::synthetic

#endif  // BAS_SYNTHETIC_HPP_
