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

#ifndef BAS_CALIBRATION_HPP_
#define BAS_CALIBRATION_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bas/baseline_metrics.hpp"
#include "bas/records.hpp"
#include "bas/statistics.hpp"
#include "bas/types.hpp"

namespace bas {

// Weighted pool-adjacent-violators: the non-decreasing sequence minimizing
// sum_i w_i (f_i - y_i)^2. Adjacent blocks with equal means are pooled, so the
// distinct fitted values are strictly increasing.
std::vector<double> pool_adjacent_violators(std::span<const double> values,
                                            std::span<const double> weights);

struct CalibrationKnot {
  double input = 0.0;
  double value = 0.0;

  friend bool operator==(const CalibrationKnot&, const CalibrationKnot&) = default;
};

// Monotone confidence remapping. Immutable after construction.
class CalibrationMap {
 public:
  // Throws DataError unless inputs strictly increase, values are
  // non-decreasing and everything lies in [0, 1].
  CalibrationMap(std::vector<CalibrationKnot> knots, std::size_t training_size,
                 std::string created_from);

  const std::vector<CalibrationKnot>& knots() const noexcept { return knots_; }
  std::size_t training_size() const noexcept { return training_size_; }
  const std::string& created_from() const noexcept { return created_from_; }

  // Right-continuous step lookup: the value of the last knot at or below s,
  // or the first knot's value below the smallest knot. Not clipped.
  double evaluate(double s) const;

  // evaluate(s) clipped to [0, 1 - eps].
  Confidence apply(Confidence s, ClipEpsilon eps = ClipEpsilon{}) const;
  std::vector<Prediction> apply(std::span<const Prediction> records,
                                ClipEpsilon eps = ClipEpsilon{}) const;

  // Text artifact: a `#`-prefixed header block, an `input<TAB>output` column
  // line, then one knot per line with shortest round-trip decimals.
  void write(std::ostream& out) const;
  static CalibrationMap read(std::istream& in);

 private:
  std::vector<CalibrationKnot> knots_;
  std::size_t training_size_;
  std::string created_from_;
};

// Isotonic least-squares fit of labels on confidences. Identical confidences
// are pooled into one knot with multiplicity weight first, so the map does not
// depend on input order. Requires at least two pairs.
CalibrationMap fit_isotonic(std::span<const Prediction> pairs,
                            std::string created_from = {});

// Disjoint record-id sets for fitting and evaluation.
struct SplitSpec {
  std::set<std::string> calibration_ids;
  std::set<std::string> evaluation_ids;

  // Throws ConfigError naming an id present in both sets.
  void validate() const;
};

// Seeded shuffle of `ids` into calibration / evaluation halves. The
// calibration side gets `calibration_size` ids, or floor(n / 2) by default.
SplitSpec auto_split(std::span<const std::string> ids, std::uint64_t seed,
                     std::optional<std::size_t> calibration_size = std::nullopt);

struct CalibrationOutcome {
  CalibrationMap map;
  std::vector<Prediction> calibrated;
  MetricReport before;
  MetricReport after;
};

// Fits on `train`, applies the map to `test` and scores test confidences
// before and after.
CalibrationOutcome calibrate_and_score(std::span<const Prediction> train,
                                       std::span<const Prediction> test,
                                       const ReportConfig& config,
                                       std::string created_from = {});

// Record-level variant: rejects id overlap between train and test with
// ConfigError and requires labels on both sides.
CalibrationOutcome calibrate_and_score(std::span<const EvalRecord> train,
                                       std::span<const EvalRecord> test,
                                       const ReportConfig& config,
                                       std::string created_from = {});

struct AblationRow {
  std::size_t size = 0;
  double ece_mean = 0.0;
  double ece_sd = 0.0;
  double bas_mean = 0.0;
  double bas_sd = 0.0;
};

// Validation-size ablation: for each size, `repeats` seeded subsamples of the
// pool (without replacement) are fitted and scored on the whole test set.
std::vector<AblationRow> calibration_ablation(std::span<const Prediction> pool,
                                              std::span<const Prediction> test,
                                              std::span<const std::size_t> sizes,
                                              std::size_t repeats,
                                              std::uint64_t seed,
                                              const BinningConfig& bins = {},
                                              ClipEpsilon eps = ClipEpsilon{});

}  // namespace bas

#endif  // BAS_CALIBRATION_HPP_
