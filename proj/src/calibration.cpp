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

#include "bas/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "bas/error.hpp"
#include "bas/metrics_core.hpp"

namespace bas {
namespace {

constexpr std::string_view kMapMagic = "# bas calibration map v1";

struct Block {
  double sum = 0.0;
  double weight = 0.0;
  std::size_t count = 0;

  double mean() const { return sum / weight; }
};

double parse_number(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(fmt::format("calibration map line {}: '{}' is not a number", line, text));
  }
  return value;
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

}  // namespace

std::vector<double> pool_adjacent_violators(std::span<const double> values,
                                            std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw DataError("pool_adjacent_violators: values and weights differ in length");
  }
  std::vector<Block> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(weights[i] > 0.0)) throw DataError("pool_adjacent_violators: weights must be positive");
    stack.push_back({values[i] * weights[i], weights[i], 1});
    while (stack.size() >= 2 &&
           stack[stack.size() - 2].mean() >= stack.back().mean()) {
      Block top = stack.back();
      stack.pop_back();
      stack.back().sum += top.sum;
      stack.back().weight += top.weight;
      stack.back().count += top.count;
    }
  }
  std::vector<double> fitted;
  fitted.reserve(values.size());
  for (const Block& block : stack) fitted.insert(fitted.end(), block.count, block.mean());
  return fitted;
}

CalibrationMap::CalibrationMap(std::vector<CalibrationKnot> knots,
                               std::size_t training_size, std::string created_from)
    : knots_(std::move(knots)),
      training_size_(training_size),
      created_from_(std::move(created_from)) {
  if (knots_.empty()) throw DataError("calibration map has no knots");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const CalibrationKnot& k = knots_[i];
    if (!(k.input >= 0.0 && k.input <= 1.0) || !(k.value >= 0.0 && k.value <= 1.0)) {
      throw DataError(fmt::format("calibration knot {} ({}, {}) is outside [0, 1]", i,
                                  k.input, k.value));
    }
    if (i > 0 && k.input <= knots_[i - 1].input) {
      throw DataError("calibration knot inputs must strictly increase");
    }
    if (i > 0 && k.value < knots_[i - 1].value) {
      throw DataError("calibration knot values must be non-decreasing");
    }
  }
}

double CalibrationMap::evaluate(double s) const {
  auto upper = std::upper_bound(
      knots_.begin(), knots_.end(), s,
      [](double value, const CalibrationKnot& knot) { return value < knot.input; });
  if (upper == knots_.begin()) return knots_.front().value;
  return (upper - 1)->value;
}

Confidence CalibrationMap::apply(Confidence s, ClipEpsilon eps) const {
  return Confidence(std::clamp(evaluate(s.value()), 0.0, 1.0 - eps.value()));
}

std::vector<Prediction> CalibrationMap::apply(std::span<const Prediction> records,
                                              ClipEpsilon eps) const {
  std::vector<Prediction> out;
  out.reserve(records.size());
  for (const Prediction& r : records) out.emplace_back(apply(r.confidence, eps), r.correct);
  return out;
}

void CalibrationMap::write(std::ostream& out) const {
  out << kMapMagic << '\n';
  out << "# training_size: " << training_size_ << '\n';
  out << "# created_from: " << created_from_ << '\n';
  out << "# knots: " << knots_.size() << '\n';
  out << "input\toutput\n";
  for (const CalibrationKnot& knot : knots_) {
    out << fmt::format("{}\t{}\n", knot.input, knot.value);
  }
}

CalibrationMap CalibrationMap::read(std::istream& in) {
  std::string line;
  std::size_t line_number = 0;
  std::map<std::string, std::string> header;
  bool saw_magic = false;
  bool saw_columns = false;
  std::vector<CalibrationKnot> knots;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_columns) {
      if (line == kMapMagic) {
        saw_magic = true;
      } else if (line.starts_with("#")) {
        const auto colon = line.find(':');
        if (colon != std::string::npos) {
          header[trim(std::string_view(line).substr(1, colon - 1))] =
              trim(std::string_view(line).substr(colon + 1));
        }
      } else if (line == "input\toutput") {
        saw_columns = true;
      } else {
        throw DataError(fmt::format("calibration map line {}: unexpected header '{}'",
                                    line_number, line));
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(fmt::format("calibration map line {}: expected input<TAB>output",
                                  line_number));
    }
    knots.push_back({parse_number(std::string_view(line).substr(0, tab), line_number),
                     parse_number(std::string_view(line).substr(tab + 1), line_number)});
  }
  if (!saw_magic || !saw_columns) throw DataError("not a calibration map file");
  std::size_t training_size = 0;
  if (auto it = header.find("training_size"); it != header.end()) {
    training_size = static_cast<std::size_t>(parse_number(it->second, 0));
  }
  if (auto it = header.find("knots"); it != header.end() &&
                                      parse_number(it->second, 0) != knots.size()) {
    throw DataError("calibration map knot count does not match its header");
  }
  return CalibrationMap(std::move(knots), training_size, header["created_from"]);
}

CalibrationMap fit_isotonic(std::span<const Prediction> pairs, std::string created_from) {
  if (pairs.size() < 2) throw DataError("isotonic fit needs at least two pairs");
  // confidence -> (label sum, multiplicity)
  std::map<double, std::pair<double, double>> pooled;
  for (const Prediction& p : pairs) {
    auto& [sum, count] = pooled[p.confidence.value()];
    sum += p.correct ? 1.0 : 0.0;
    count += 1.0;
  }
  std::vector<double> inputs;
  std::vector<double> means;
  std::vector<double> weights;
  for (const auto& [s, stats] : pooled) {
    inputs.push_back(s);
    means.push_back(stats.first / stats.second);
    weights.push_back(stats.second);
  }
  const std::vector<double> fitted = pool_adjacent_violators(means, weights);
  std::vector<CalibrationKnot> knots;
  knots.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) knots.push_back({inputs[i], fitted[i]});
  return CalibrationMap(std::move(knots), pairs.size(), std::move(created_from));
}

void SplitSpec::validate() const {
  for (const std::string& id : calibration_ids) {
    if (evaluation_ids.contains(id)) {
      throw ConfigError(fmt::format(
          "record id '{}' appears in both the calibration and evaluation splits", id));
    }
  }
}

SplitSpec auto_split(std::span<const std::string> ids, std::uint64_t seed,
                     std::optional<std::size_t> calibration_size) {
  const std::size_t n_cal = calibration_size.value_or(ids.size() / 2);
  if (n_cal == 0 || n_cal >= ids.size()) {
    throw ConfigError(fmt::format("cannot split {} records with {} for calibration",
                                  ids.size(), n_cal));
  }
  std::vector<std::string> shuffled(ids.begin(), ids.end());
  std::sort(shuffled.begin(), shuffled.end());
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 engine(seq);
  std::shuffle(shuffled.begin(), shuffled.end(), engine);
  SplitSpec split;
  split.calibration_ids.insert(shuffled.begin(), shuffled.begin() + n_cal);
  split.evaluation_ids.insert(shuffled.begin() + n_cal, shuffled.end());
  if (split.calibration_ids.size() + split.evaluation_ids.size() != ids.size()) {
    throw DataError("auto split: record ids are not unique");
  }
  return split;
}

CalibrationOutcome calibrate_and_score(std::span<const Prediction> train,
                                       std::span<const Prediction> test,
                                       const ReportConfig& config,
                                       std::string created_from) {
  CalibrationMap map = fit_isotonic(train, std::move(created_from));
  std::vector<Prediction> calibrated = map.apply(test, config.eps);
  MetricReport before = compute_metric_report(test, config);
  MetricReport after = compute_metric_report(calibrated, config);
  return {std::move(map), std::move(calibrated), std::move(before), std::move(after)};
}

CalibrationOutcome calibrate_and_score(std::span<const EvalRecord> train,
                                       std::span<const EvalRecord> test,
                                       const ReportConfig& config,
                                       std::string created_from) {
  SplitSpec split;
  for (const EvalRecord& r : train) split.calibration_ids.insert(r.id);
  for (const EvalRecord& r : test) split.evaluation_ids.insert(r.id);
  split.validate();
  const std::vector<Prediction> train_pairs = to_predictions(train);
  const std::vector<Prediction> test_pairs = to_predictions(test);
  return calibrate_and_score(train_pairs, test_pairs, config, std::move(created_from));
}

std::vector<AblationRow> calibration_ablation(std::span<const Prediction> pool,
                                              std::span<const Prediction> test,
                                              std::span<const std::size_t> sizes,
                                              std::size_t repeats, std::uint64_t seed,
                                              const BinningConfig& bins,
                                              ClipEpsilon eps) {
  if (repeats < 1) throw ConfigError("ablation needs at least one repeat");
  if (test.empty()) throw DataError("ablation: empty test set");
  std::vector<AblationRow> rows;
  for (std::size_t size : sizes) {
    if (size < 2 || size > pool.size()) {
      throw ConfigError(fmt::format("ablation size {} is outside [2, {}]", size, pool.size()));
    }
    std::vector<double> eces;
    std::vector<double> scores;
    for (std::size_t r = 0; r < repeats; ++r) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(size), static_cast<std::uint32_t>(r)};
      std::mt19937_64 engine(seq);
      std::vector<Prediction> shuffled(pool.begin(), pool.end());
      std::shuffle(shuffled.begin(), shuffled.end(), engine);
      shuffled.erase(shuffled.begin() + static_cast<std::ptrdiff_t>(size), shuffled.end());
      const CalibrationMap map = fit_isotonic(shuffled);
      const std::vector<Prediction> calibrated = map.apply(test, eps);
      eces.push_back(ece_binned(calibrated, bins));
      scores.push_back(bas_score(calibrated, eps));
    }
    rows.push_back({size, canonical_mean(eces), standard_deviation(eces),
                    canonical_mean(scores), standard_deviation(scores)});
  }
  return rows;
}

}  // namespace bas
