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

#include "bas/baseline_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bas/error.hpp"
#include "bas/metrics_core.hpp"

namespace bas {
namespace {

void require_nonempty(std::span<const Prediction> records, const char* metric) {
  if (records.empty()) throw DataError(fmt::format("{}: no records", metric));
}

std::vector<Prediction> sorted_ascending(std::span<const Prediction> records) {
  std::vector<Prediction> sorted(records.begin(), records.end());
  std::sort(sorted.begin(), sorted.end(), [](const Prediction& a, const Prediction& b) {
    if (a.confidence.value() != b.confidence.value()) {
      return a.confidence.value() < b.confidence.value();
    }
    return a.correct < b.correct;
  });
  return sorted;
}

ReliabilityBin summarize(std::span<const Prediction> members, double lower,
                         double upper) {
  ReliabilityBin bin;
  bin.lower = lower;
  bin.upper = upper;
  bin.count = members.size();
  if (members.empty()) {
    bin.mean_confidence = std::numeric_limits<double>::quiet_NaN();
    bin.accuracy = std::numeric_limits<double>::quiet_NaN();
    return bin;
  }
  std::vector<double> confidences;
  std::vector<double> labels;
  for (const Prediction& p : members) {
    confidences.push_back(p.confidence.value());
    labels.push_back(p.correct ? 1.0 : 0.0);
  }
  bin.mean_confidence = canonical_mean(std::move(confidences));
  bin.accuracy = canonical_mean(std::move(labels));
  return bin;
}

}  // namespace

double accuracy(std::span<const Prediction> records) {
  require_nonempty(records, "accuracy");
  std::size_t correct = 0;
  for (const Prediction& r : records) correct += r.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double ece_unbinned(std::span<const Prediction> records) {
  require_nonempty(records, "ece_unbinned");
  std::vector<double> gaps;
  gaps.reserve(records.size());
  for (const Prediction& r : records) {
    gaps.push_back(std::abs(r.confidence.value() - (r.correct ? 1.0 : 0.0)));
  }
  return canonical_mean(std::move(gaps));
}

std::vector<ReliabilityBin> reliability_bins(std::span<const Prediction> records,
                                             const BinningConfig& config) {
  require_nonempty(records, "reliability_bins");
  if (config.n_bins < 1) throw ConfigError("n_bins must be at least 1");
  const std::vector<Prediction> sorted = sorted_ascending(records);
  const std::size_t n_bins = config.n_bins;
  std::vector<ReliabilityBin> bins;
  bins.reserve(n_bins);

  if (config.scheme == BinningScheme::kEqualWidth) {
    std::vector<std::vector<Prediction>> members(n_bins);
    for (const Prediction& p : sorted) {
      const auto raw = static_cast<std::size_t>(
          std::floor(p.confidence.value() * static_cast<double>(n_bins)));
      members[std::min(raw, n_bins - 1)].push_back(p);
    }
    for (std::size_t b = 0; b < n_bins; ++b) {
      bins.push_back(summarize(members[b],
                               static_cast<double>(b) / static_cast<double>(n_bins),
                               static_cast<double>(b + 1) / static_cast<double>(n_bins)));
    }
    return bins;
  }

  const std::size_t n = sorted.size();
  const std::size_t base = n / n_bins;
  const std::size_t extra = n % n_bins;
  std::size_t begin = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    if (size == 0) continue;
    std::span<const Prediction> group(sorted.data() + begin, size);
    bins.push_back(summarize(group, group.front().confidence.value(),
                             group.back().confidence.value()));
    begin += size;
  }
  return bins;
}

double ece_binned(std::span<const Prediction> records, const BinningConfig& config) {
  const std::vector<ReliabilityBin> bins = reliability_bins(records, config);
  std::vector<double> terms;
  for (const ReliabilityBin& bin : bins) {
    if (bin.count == 0) continue;
    terms.push_back(static_cast<double>(bin.count) *
                    std::abs(bin.accuracy - bin.mean_confidence));
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum / static_cast<double>(records.size());
}

std::vector<RiskCoveragePoint> risk_coverage_curve(
    std::span<const Prediction> records) {
  require_nonempty(records, "risk_coverage_curve");
  std::vector<Prediction> sorted = sorted_ascending(records);
  std::reverse(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  std::vector<RiskCoveragePoint> curve;
  curve.reserve(sorted.size());
  std::size_t covered = 0;
  std::size_t errors_before = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    std::size_t group_errors = 0;
    while (j < sorted.size() &&
           sorted[j].confidence.value() == sorted[i].confidence.value()) {
      group_errors += sorted[j].correct ? 0 : 1;
      ++j;
    }
    const std::size_t group_size = j - i;
    for (std::size_t step = 1; step <= group_size; ++step) {
      // Expected errors among the first `step` members of a random ordering.
      const double expected_errors =
          static_cast<double>(errors_before) +
          static_cast<double>(step) * static_cast<double>(group_errors) /
              static_cast<double>(group_size);
      const double count = static_cast<double>(covered + step);
      curve.push_back({count / n, expected_errors / count});
    }
    covered += group_size;
    errors_before += group_errors;
    i = j;
  }
  return curve;
}

double aurc(std::span<const Prediction> records) {
  const std::vector<RiskCoveragePoint> curve = risk_coverage_curve(records);
  std::vector<double> risks;
  risks.reserve(curve.size());
  for (const RiskCoveragePoint& point : curve) risks.push_back(point.risk);
  return canonical_mean(std::move(risks));
}

double brier(std::span<const Prediction> records) {
  require_nonempty(records, "brier");
  std::vector<double> terms;
  terms.reserve(records.size());
  for (const Prediction& r : records) {
    const double gap = r.confidence.value() - (r.correct ? 1.0 : 0.0);
    terms.push_back(gap * gap);
  }
  return canonical_mean(std::move(terms));
}

double log_loss(std::span<const Prediction> records, ClipEpsilon eps) {
  require_nonempty(records, "log_loss");
  const double lo = eps.value();
  const double hi = 1.0 - eps.value();
  std::vector<double> terms;
  terms.reserve(records.size());
  for (const Prediction& r : records) {
    const double s = std::clamp(r.confidence.value(), lo, hi);
    terms.push_back(r.correct ? -std::log(s) : -std::log1p(-s));
  }
  return canonical_mean(std::move(terms));
}

}  // namespace bas
