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

#ifndef BAS_STATISTICS_HPP_
#define BAS_STATISTICS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bas/baseline_metrics.hpp"
#include "bas/kernels.hpp"
#include "bas/metrics_core.hpp"
#include "bas/types.hpp"

namespace bas {

struct BootstrapConfig {
  std::size_t n_resamples = 1000;
  std::uint64_t seed = 0;
};

struct Estimate {
  double point = 0.0;
  // Standard deviation of the statistic over bootstrap resamples.
  double uncertainty = 0.0;
};

using MetricFn = std::function<double(std::span<const Prediction>)>;

// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double standard_deviation(std::span<const double> values);

// point = metric(records); uncertainty = SD of metric over n_resamples
// record-level resamples with replacement. Deterministic in cfg.seed and
// independent of the OpenMP schedule. A metric failure on any resample
// throws DataError naming the resample.
Estimate bootstrap(std::span<const Prediction> records, const MetricFn& metric,
                   const BootstrapConfig& cfg);

// Same, for a statistic over indices into data the caller owns.
Estimate bootstrap_indexed(std::size_t n, double point,
                           const kernels::IndexStatistic& statistic,
                           const BootstrapConfig& cfg);

// Bootstrap of a mean of per-record values (accuracy, BAS, Brier, ...), with
// the canonical summation order used by the point metrics.
Estimate bootstrap_mean(std::span<const double> per_record,
                        const BootstrapConfig& cfg);

struct ReportConfig {
  BinningConfig bins;
  std::vector<RiskPrior> priors = {RiskPrior::uniform(), RiskPrior::linear(),
                                   RiskPrior::quadratic()};
  BootstrapConfig bootstrap;
  ClipEpsilon eps = ClipEpsilon{};
  // Metric names to compute; empty means all.
  std::vector<std::string> metrics;
};

struct MetricEntry {
  std::string metric;
  double value = 0.0;
  double uncertainty = 0.0;
  std::size_t n = 0;
  std::string fingerprint;
  std::string dataset_hash;
};

struct MetricReport {
  std::string model;
  std::string task;
  std::string dataset_hash;
  std::string fingerprint;
  std::size_t n_records = 0;
  std::size_t n_parse_failures = 0;
  std::vector<MetricEntry> entries;

  const MetricEntry* find(std::string_view metric) const;
  // Throws DataError when the metric is absent.
  const MetricEntry& at(std::string_view metric) const;
};

// Metric name for a weighted-BAS prior: "bas" for uniform, "bas_<prior>"
// otherwise.
std::string weighted_metric_name(const RiskPrior& prior);

// Every metric name the config would produce, in report order.
std::vector<std::string> report_metric_names(const ReportConfig& config);

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// 16-hex-digit digest of the (confidence, label) sequence.
std::string dataset_hash(std::span<const Prediction> records);

// 16-hex-digit digest of every config field plus the dataset hash.
std::string config_fingerprint(const ReportConfig& config,
                               std::string_view dataset_hash);

// Computes every requested metric with its bootstrap uncertainty.
// n_parse_failures feeds the parse_failure_rate entry; those records are not
// part of `records`.
MetricReport compute_metric_report(std::span<const Prediction> records,
                                   const ReportConfig& config,
                                   std::size_t n_parse_failures = 0);

}  // namespace bas

#endif  // BAS_STATISTICS_HPP_
