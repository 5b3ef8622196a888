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

#include "bas/quadrature.hpp"

#include <numbers>

#include "bas/error.hpp"

namespace bas::quadrature {

GaussLegendreRule::GaussLegendreRule(int order) {
  if (order < 1) throw ConfigError("Gauss-Legendre order must be positive");
  const int n = order;
  nodes_.assign(n, 0.0);
  weights_.assign(n, 0.0);
  // Roots are symmetric; solve for the positive half.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) {
      derivative = 1.0;
    } else {
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double weight = 2.0 / ((1.0 - x * x) * derivative * derivative);
    nodes_[i] = -x;
    nodes_[n - 1 - i] = x;
    weights_[i] = weight;
    weights_[n - 1 - i] = weight;
  }
  if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussLegendreRule& default_rule() {
  static const GaussLegendreRule kRule(10);
  return kRule;
}

}  // namespace bas::quadrature
