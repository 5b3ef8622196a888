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

#ifndef BAS_QUADRATURE_HPP_
#define BAS_QUADRATURE_HPP_

#include <cfloat>
#include <cmath>
#include <vector>

namespace bas::quadrature {

// n-point Gauss-Legendre rule on [-1, 1]. Exact for polynomials of degree
// up to 2n - 1. Nodes come from Newton iteration on the three-term Legendre
// recurrence.
class GaussLegendreRule {
 public:
  explicit GaussLegendreRule(int order);

  int order() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  // Single-panel estimate of the integral of f over [a, b].
  template <typename F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      sum += weights_[i] * f(mid + half * nodes_[i]);
    }
    return half * sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

// The 10-point rule shared by every adaptive integration in the library.
const GaussLegendreRule& default_rule();

struct Options {
  // Panels are split until the two-half estimate differs from the parent
  // estimate by less than this (absolute, distributed over the panels).
  double abs_tolerance = 1e-10;
  int max_depth = 48;
};

namespace internal {

template <typename F>
double refine(const GaussLegendreRule& rule, F& f, double a, double b,
              double whole, double tolerance, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = rule.integrate(f, a, mid);
  const double right = rule.integrate(f, mid, b);
  const double fine = left + right;
  const double roundoff = 64.0 * DBL_EPSILON * std::abs(fine);
  if (std::abs(fine - whole) <= std::max(tolerance, roundoff) ||
      depth >= max_depth) {
    return fine;
  }
  return refine(rule, f, a, mid, left, 0.5 * tolerance, depth + 1, max_depth) +
         refine(rule, f, mid, b, right, 0.5 * tolerance, depth + 1, max_depth);
}

}  // namespace internal

// Adaptive composite Gauss-Legendre integration of f over [a, b]. f must be
// finite on the closed interval.
template <typename F>
double integrate(F&& f, double a, double b, const Options& options = {}) {
  if (a == b) return 0.0;
  const GaussLegendreRule& rule = default_rule();
  const double whole = rule.integrate(f, a, b);
  return internal::refine(rule, f, a, b, whole, options.abs_tolerance, 0,
                          options.max_depth);
}

}  // namespace bas::quadrature

#endif  // BAS_QUADRATURE_HPP_
