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

#ifndef BAS_METRICS_CORE_HPP_
#define BAS_METRICS_CORE_HPP_

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bas/types.hpp"

namespace bas {

// min(s, 1 - eps). Idempotent; values below 1 - eps pass through unchanged.
Confidence clip_confidence(Confidence s, ClipEpsilon eps = ClipEpsilon{});

// Selective utility S_t: +1 for a correct answer, -t/(1-t) for a wrong one,
// 0 for abstaining.
double selective_utility(RiskThreshold t, bool correct, Action action);

// Answer iff s >= t.
Action decision_policy(Confidence s, RiskThreshold t);

// Realized utility integrated over thresholds t in [0, s] under a uniform
// prior: s when correct, s + ln(1 - s) otherwise. Throws DataError for s = 1,
// where the incorrect branch diverges; callers clip first.
double bas_utility(Confidence s, bool correct);

// Dataset mean of bas_utility after clipping every confidence. The mean is a
// function of the multiset of records only (summation order is canonical).
double bas_score(std::span<const Prediction> records,
                 ClipEpsilon eps = ClipEpsilon{});

// Expected utility s + (1 - p) ln(1 - s) of reporting s when the true
// probability of correctness is p.
double expected_bas_utility(Confidence s, Probability p);

// Weighting over risk thresholds. Non-negative on [0, 1) and integrates to 1.
class RiskPrior {
 public:
  enum class Kind { kUniform, kLinear, kQuadratic, kTabulated };

  static RiskPrior uniform();
  // w(t) = 2t
  static RiskPrior linear();
  // w(t) = 3t^2
  static RiskPrior quadratic();
  // Piecewise-linear interpolation of (threshold, weight) points. Thresholds
  // must start at 0, end at 1 and strictly increase; weights must be
  // non-negative. A table whose integral is within 1e-6 of 1 is rescaled to
  // integrate to exactly 1; a larger deviation throws ConfigError.
  static RiskPrior tabulated(std::vector<std::pair<double, double>> table);
  // "uniform", "linear" or "quadratic".
  static RiskPrior from_name(std::string_view name);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  double weight(double t) const;
  // Points in (0, 1) where w is not smooth. Quadrature splits there.
  std::vector<double> breakpoints() const;
  const std::vector<std::pair<double, double>>& table() const noexcept {
    return table_;
  }

 private:
  explicit RiskPrior(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::vector<std::pair<double, double>> table_;
};

// Integral over [0, s] of [z - (1 - z) t/(1 - t)] w(t). The uniform prior
// takes the closed form of bas_utility; every other prior is integrated
// numerically. Requires s < 1.
double weighted_bas_utility(Confidence s, bool correct, const RiskPrior& prior);

// Mean of weighted_bas_utility over clipped records. Equals bas_score for the
// uniform prior.
double weighted_bas_score(std::span<const Prediction> records,
                          const RiskPrior& prior,
                          ClipEpsilon eps = ClipEpsilon{});

// Expected weighted utility of reporting s under true probability p:
// integral over [0, s] of (p - (1 - p) t/(1 - t)) w(t), by quadrature for
// every prior including the uniform one.
double expected_weighted_bas_utility(Confidence s, Probability p,
                                     const RiskPrior& prior,
                                     double abs_tolerance = 1e-10);

// Mean of `values` summed in ascending order, so the result does not depend
// on the order the values arrive in. Throws DataError when empty.
double canonical_mean(std::vector<double> values);

}  // namespace bas

#endif  // BAS_METRICS_CORE_HPP_
