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

#include "bas/metrics_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "bas/error.hpp"
#include "bas/kernels.hpp"
#include "bas/quadrature.hpp"

namespace bas {
namespace {

// Renormalization window for user tables.
constexpr double kTableNormalizationSlack = 1e-6;

double penalty(double t) { return -t / (1.0 - t); }

// Integrates f over [0, s], splitting at the prior's breakpoints.
template <typename F>
double integrate_prior_segments(const RiskPrior& prior, double s, F&& f,
                                double abs_tolerance) {
  quadrature::Options options;
  options.abs_tolerance = abs_tolerance;
  double lower = 0.0;
  double total = 0.0;
  for (double point : prior.breakpoints()) {
    if (point >= s) break;
    total += quadrature::integrate(f, lower, point, options);
    lower = point;
  }
  total += quadrature::integrate(f, lower, s, options);
  return total;
}

void require_below_one(double s) {
  if (s >= 1.0) {
    throw DataError(
        "confidence 1 is not scorable: clip to 1 - eps before computing "
        "utility");
  }
}

}  // namespace

Confidence clip_confidence(Confidence s, ClipEpsilon eps) {
  return Confidence(std::min(s.value(), 1.0 - eps.value()));
}

double selective_utility(RiskThreshold t, bool correct, Action action) {
  if (action == Action::kAbstain) return 0.0;
  return correct ? 1.0 : penalty(t.value());
}

Action decision_policy(Confidence s, RiskThreshold t) {
  return s.value() >= t.value() ? Action::kAnswer : Action::kAbstain;
}

double bas_utility(Confidence s, bool correct) {
  const double v = s.value();
  require_below_one(v);
  if (correct) return v;
  return v + std::log1p(-v);
}

double bas_score(std::span<const Prediction> records, ClipEpsilon eps) {
  if (records.empty()) throw DataError("bas_score: no records");
  std::vector<double> utilities;
  utilities.reserve(records.size());
  for (const Prediction& r : records) {
    utilities.push_back(bas_utility(clip_confidence(r.confidence, eps), r.correct));
  }
  return canonical_mean(std::move(utilities));
}

double expected_bas_utility(Confidence s, Probability p) {
  const double v = s.value();
  require_below_one(v);
  if (p.value() == 1.0) return v;
  return v + (1.0 - p.value()) * std::log1p(-v);
}

RiskPrior RiskPrior::uniform() { return RiskPrior(Kind::kUniform); }
RiskPrior RiskPrior::linear() { return RiskPrior(Kind::kLinear); }
RiskPrior RiskPrior::quadratic() { return RiskPrior(Kind::kQuadratic); }

RiskPrior RiskPrior::tabulated(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) {
    throw ConfigError("tabulated prior needs at least two points");
  }
  if (table.front().first != 0.0 || table.back().first != 1.0) {
    throw ConfigError("tabulated prior must span thresholds 0 to 1");
  }
  double integral = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [t, w] = table[i];
    if (!std::isfinite(t) || !std::isfinite(w)) {
      throw ConfigError("tabulated prior contains a non-finite value");
    }
    if (w < 0.0) {
      throw ConfigError(fmt::format("tabulated prior weight {} at t={} is negative", w, t));
    }
    if (i > 0) {
      const auto [t0, w0] = table[i - 1];
      if (t <= t0) {
        throw ConfigError("tabulated prior thresholds must strictly increase");
      }
      integral += 0.5 * (w0 + w) * (t - t0);
    }
  }
  if (std::abs(integral - 1.0) > kTableNormalizationSlack) {
    throw ConfigError(fmt::format(
        "tabulated prior integrates to {:.9g}, expected 1 (tolerance {:g})",
        integral, kTableNormalizationSlack));
  }
  for (auto& point : table) point.second /= integral;
  RiskPrior prior(Kind::kTabulated);
  prior.table_ = std::move(table);
  return prior;
}

RiskPrior RiskPrior::from_name(std::string_view name) {
  if (name == "uniform") return uniform();
  if (name == "linear") return linear();
  if (name == "quadratic") return quadratic();
  throw ConfigError(fmt::format(
      "unknown risk prior '{}' (expected uniform, linear or quadratic)", name));
}

std::string RiskPrior::name() const {
  switch (kind_) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kLinear:
      return "linear";
    case Kind::kQuadratic:
      return "quadratic";
    case Kind::kTabulated:
      return "tabulated";
  }
  return "unknown";
}

double RiskPrior::weight(double t) const {
  switch (kind_) {
    case Kind::kUniform:
      return 1.0;
    case Kind::kLinear:
      return 2.0 * t;
    case Kind::kQuadratic:
      return 3.0 * t * t;
    case Kind::kTabulated: {
      if (t <= 0.0) return table_.front().second;
      if (t >= 1.0) return table_.back().second;
      auto upper = std::upper_bound(
          table_.begin(), table_.end(), t,
          [](double value, const auto& point) { return value < point.first; });
      const auto& [t1, w1] = *upper;
      const auto& [t0, w0] = *(upper - 1);
      return w0 + (w1 - w0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

std::vector<double> RiskPrior::breakpoints() const {
  std::vector<double> points;
  if (kind_ == Kind::kTabulated) {
    for (std::size_t i = 1; i + 1 < table_.size(); ++i) {
      points.push_back(table_[i].first);
    }
  }
  return points;
}

double weighted_bas_utility(Confidence s, bool correct, const RiskPrior& prior) {
  const double v = s.value();
  require_below_one(v);
  if (prior.kind() == RiskPrior::Kind::kUniform) return bas_utility(s, correct);
  if (correct) {
    return integrate_prior_segments(
        prior, v, [&prior](double t) { return prior.weight(t); }, 1e-10);
  }
  return integrate_prior_segments(
      prior, v, [&prior](double t) { return penalty(t) * prior.weight(t); },
      1e-10);
}

double weighted_bas_score(std::span<const Prediction> records,
                          const RiskPrior& prior, ClipEpsilon eps) {
  if (records.empty()) throw DataError("weighted_bas_score: no records");
  return canonical_mean(kernels::omp::weighted_utilities(records, prior, eps));
}

double expected_weighted_bas_utility(Confidence s, Probability p,
                                     const RiskPrior& prior,
                                     double abs_tolerance) {
  const double v = s.value();
  require_below_one(v);
  const double q = p.value();
  return integrate_prior_segments(
      prior, v,
      [&prior, q](double t) {
        return (q + (1.0 - q) * penalty(t)) * prior.weight(t);
      },
      abs_tolerance);
}

double canonical_mean(std::vector<double> values) {
  if (values.empty()) throw DataError("mean of an empty set is undefined");
  std::sort(values.begin(), values.end());
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return sum / static_cast<double>(values.size());
}

}  // namespace bas
