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

#include "bas/synthetic.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "bas/error.hpp"

namespace bas::synthetic {
namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<Prediction> overconfident_population(std::size_t n, std::uint64_t seed,
                                                 const OverconfidentConfig& config) {
  if (!(config.p_low >= 0.0 && config.p_low < config.p_high && config.p_high <= 1.0)) {
    throw ConfigError(fmt::format("latent accuracy range [{}, {}] is invalid", config.p_low,
                                  config.p_high));
  }
  if (!(config.gamma > 0.0)) throw ConfigError("gamma must be positive");
  std::mt19937_64 engine = make_engine(seed, 1);
  std::uniform_real_distribution<double> latent(config.p_low, config.p_high);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Prediction> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = latent(engine);
    const bool correct = unit(engine) < p;
    out.emplace_back(std::pow(p, config.gamma), correct);
  }
  return out;
}

std::vector<Prediction> bernoulli_population(std::size_t n, double p, double confidence,
                                             std::uint64_t seed) {
  const Probability prob(p);
  const Confidence s(confidence);
  std::mt19937_64 engine = make_engine(seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Prediction> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(s, unit(engine) < prob.value());
  return out;
}

}  // namespace bas::synthetic
