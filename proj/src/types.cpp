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

#include "bas/types.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bas/error.hpp"

namespace bas {

Confidence::Confidence(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw DataError(fmt::format("confidence {} is outside [0, 1]", value));
  }
}

Probability::Probability(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw DataError(fmt::format("probability {} is outside [0, 1]", value));
  }
}

RiskThreshold::RiskThreshold(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0 || value >= 1.0) {
    throw DataError(fmt::format("risk threshold {} is outside [0, 1)", value));
  }
}

ClipEpsilon::ClipEpsilon(double value) : value_(value) {
  if (!std::isfinite(value) || value <= 0.0 || value >= 0.5) {
    throw ConfigError(fmt::format("clip epsilon {} is outside (0, 0.5)", value));
  }
}

}  // namespace bas
