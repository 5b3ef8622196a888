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

#ifndef BAS_BASELINE_METRICS_HPP_
#define BAS_BASELINE_METRICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "bas/types.hpp"

namespace bas {

enum class BinningScheme { kEqualWidth, kEqualMass };

struct BinningConfig {
  std::size_t n_bins = 10;
  BinningScheme scheme = BinningScheme::kEqualWidth;
};

// One reliability-diagram bin. Empty equal-width bins are reported with
// count 0 and NaN confidence/accuracy.
struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

struct RiskCoveragePoint {
  double coverage = 0.0;
  double risk = 0.0;
};

// Fraction of correct records.
double accuracy(std::span<const Prediction> records);

// Mean |s - z|.
double ece_unbinned(std::span<const Prediction> records);

// Per-bin (confidence, accuracy, count) triples. Equal-width bins split
// [0, 1] into n_bins intervals, the last closed; equal-mass bins split the
// (confidence, label)-sorted records into n_bins contiguous groups whose
// sizes differ by at most one.
std::vector<ReliabilityBin> reliability_bins(std::span<const Prediction> records,
                                             const BinningConfig& config = {});

// sum_b (n_b / N) |acc_b - conf_b| over non-empty bins, as a fraction.
double ece_binned(std::span<const Prediction> records,
                  const BinningConfig& config = {});

// Risk at coverage i/N for i = 1..N, answering the i most confident records.
// Records sharing a confidence value enter as one group; inside a group the
// error count at each step is its expectation over the group's orderings.
std::vector<RiskCoveragePoint> risk_coverage_curve(
    std::span<const Prediction> records);

// Mean risk over the N coverage steps.
double aurc(std::span<const Prediction> records);

// Mean (s - z)^2.
double brier(std::span<const Prediction> records);

// Mean -[z ln s + (1 - z) ln(1 - s)] with s clipped to [eps, 1 - eps].
double log_loss(std::span<const Prediction> records,
                ClipEpsilon eps = ClipEpsilon{});

}  // namespace bas

#endif  // BAS_BASELINE_METRICS_HPP_
