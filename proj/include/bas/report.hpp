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

#ifndef BAS_REPORT_HPP_
#define BAS_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bas/baseline_metrics.hpp"
#include "bas/statistics.hpp"
#include "bas/types.hpp"

namespace bas::report {

enum class OutputFormat { kTable, kMachine };

OutputFormat format_from_string(std::string_view text);

// Confidence counts in equal-width bins, split by correctness.
struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t correct = 0;
  std::size_t incorrect = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

std::vector<HistogramBin> confidence_histogram(std::span<const Prediction> records,
                                               std::size_t n_bins = 10);

// Everything one `eval` produces for a (model, task) record set.
struct ReportDocument {
  MetricReport metrics;
  std::vector<ReliabilityBin> reliability;
  std::vector<HistogramBin> histogram;
  std::vector<RiskCoveragePoint> risk_coverage;
};

ReportDocument build_document(std::span<const Prediction> records, const ReportConfig& config,
                              std::string model = {}, std::string task = {},
                              std::size_t n_parse_failures = 0);

// Percent / decimal rendering used by the tables: BAS and AURC to two
// decimals, Acc and ECE as percent to one.
std::string format_metric(std::string_view metric, double value);
std::string format_estimate(const MetricEntry& entry);

// Main Acc / BAS / ECE / AURC table, secondary metrics, and the weighted-BAS
// profile table (one column per prior in the report).
void write_table(std::ostream& out, std::span<const MetricReport> reports);

// One JSON object per line. `metric` lines carry {metric, value,
// uncertainty, n, fingerprint, dataset_hash, model, task}; series lines
// (reliability, histogram, risk_coverage) follow. Byte-identical for
// identical documents.
void write_machine(std::ostream& out, std::span<const ReportDocument> documents);
std::vector<ReportDocument> read_machine(std::istream& in);
std::vector<ReportDocument> read_machine(const std::filesystem::path& path);

struct CompareConfig {
  // Pairs whose ECE (binned or unbinned) differs by at most this much ...
  double ece_tolerance = 0.01;
  // ... while BAS differs by at least this much are flagged.
  double bas_gap = 0.1;
};

struct Divergence {
  std::size_t first = 0;
  std::size_t second = 0;
  double ece_delta = 0.0;  // the smaller of the binned / unbinned gaps
  double bas_delta = 0.0;
};

std::vector<Divergence> find_divergences(std::span<const MetricReport> reports,
                                         const CompareConfig& config = {});
void write_comparison(std::ostream& out, std::span<const MetricReport> reports,
                      const CompareConfig& config = {});

// Writes reliability.csv, confidence_histogram.csv, risk_coverage.csv,
// metrics.csv and bas_vs_metric.csv into `dir`, plus plots.gp when
// `gnuplot_script` is set. Returns the written paths.
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   std::span<const ReportDocument> documents,
                                                   bool gnuplot_script = false);

// Column-pair entry point: zips labels and confidences into predictions.
// Throws DataError on a length mismatch or an out-of-range confidence.
std::vector<Prediction> make_predictions(const std::vector<bool>& is_correct,
                                         const std::vector<double>& confidence);

// Immutable handle over a record set and its metric report.
class BasReport {
 public:
  BasReport(std::vector<Prediction> records, ReportConfig config = {});
  BasReport(const std::vector<bool>& is_correct, const std::vector<double>& confidence,
            ReportConfig config = {});

  const MetricReport& metrics() const noexcept { return metrics_; }
  const std::vector<Prediction>& records() const noexcept { return records_; }
  double score() const;
  // weighted_bas_score under the named prior (uniform, linear, quadratic).
  double weighted_score(std::string_view prior) const;
  // Table of the report metrics and the uniform / linear / quadratic profile.
  std::string summary() const;

 private:
  std::vector<Prediction> records_;
  ReportConfig config_;
  MetricReport metrics_;
};

}  // namespace bas::report

#endif  // BAS_REPORT_HPP_
