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

#ifndef BAS_TYPES_HPP_
#define BAS_TYPES_HPP_

#include <compare>

namespace bas {

inline constexpr double kDefaultClipEpsilon = 1e-4;

// Reported confidence s in [0, 1]. Construction rejects non-finite or
// out-of-range values with DataError.
class Confidence {
 public:
  explicit Confidence(double value);

  double value() const noexcept { return value_; }

  friend auto operator<=>(const Confidence&, const Confidence&) = default;

 private:
  double value_;
};

// True probability of correctness p in [0, 1].
class Probability {
 public:
  explicit Probability(double value);

  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Risk tolerance t in [0, 1). A wrong answer at tolerance t costs t / (1 - t).
class RiskThreshold {
 public:
  explicit RiskThreshold(double value);

  double value() const noexcept { return value_; }

 private:
  double value_;
};

// Clipping margin: confidences are capped at 1 - eps. 0 < eps < 0.5.
class ClipEpsilon {
 public:
  explicit ClipEpsilon(double value = kDefaultClipEpsilon);

  double value() const noexcept { return value_; }

 private:
  double value_;
};

// One scored prediction: confidence and binary correctness label.
struct Prediction {
  Prediction(Confidence s, bool z) : confidence(s), correct(z) {}
  Prediction(double s, bool z) : confidence(s), correct(z) {}

  Confidence confidence;
  bool correct;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

enum class Action { kAnswer, kAbstain };

}  // namespace bas

#endif  // BAS_TYPES_HPP_
