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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bas/error.hpp"
#include "bas/metrics_core.hpp"
#include "oracles.hpp"

namespace bas {
namespace {

std::vector<Prediction> random_records(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(u(rng), u(rng) < 0.6);
  return out;
}

TEST(SelectiveUtilityTest, Values) {
  EXPECT_EQ(selective_utility(RiskThreshold(0.5), true, Action::kAnswer), 1.0);
  EXPECT_DOUBLE_EQ(selective_utility(RiskThreshold(0.75), false, Action::kAnswer), -3.0);
  EXPECT_EQ(selective_utility(RiskThreshold(0.75), false, Action::kAbstain), 0.0);
  EXPECT_EQ(selective_utility(RiskThreshold(0.2), true, Action::kAbstain), 0.0);
}

TEST(DecisionPolicyTest, AnswersAtOrAboveThreshold) {
  EXPECT_EQ(decision_policy(Confidence(0.6), RiskThreshold(0.6)), Action::kAnswer);
  EXPECT_EQ(decision_policy(Confidence(0.6), RiskThreshold(0.59)), Action::kAnswer);
  EXPECT_EQ(decision_policy(Confidence(0.6), RiskThreshold(0.61)), Action::kAbstain);
}

TEST(ClipTest, CapsAtOneMinusEpsilon) {
  EXPECT_EQ(clip_confidence(Confidence(1.0)).value(), 1.0 - 1e-4);
  EXPECT_EQ(clip_confidence(Confidence(0.3)).value(), 0.3);
  EXPECT_EQ(clip_confidence(Confidence(1.0), ClipEpsilon(0.01)).value(), 0.99);
}

TEST(BasUtilityTest, ClosedForm) {
  EXPECT_EQ(bas_utility(Confidence(0.9), true), 0.9);
  EXPECT_NEAR(bas_utility(Confidence(0.99), false), -3.61517, 1e-5);
  EXPECT_NEAR(bas_utility(Confidence(0.4), false), -0.1108256, 1e-7);
  EXPECT_EQ(bas_utility(Confidence(0.0), false), 0.0);
  EXPECT_THROW(bas_utility(Confidence(1.0), false), DataError);
}

TEST(BasUtilityTest, MatchesOracleAcrossGrid) {
  for (int i = 0; i < 1000; ++i) {
    const double s = i / 1000.0;
    EXPECT_NEAR(bas_utility(Confidence(s), false), oracle::bas_utility(s, false), 1e-13);
  }
}

TEST(BasScoreTest, ClipsCertainConfidence) {
  const std::vector<Prediction> one = {{1.0, false}};
  EXPECT_NEAR(bas_score(one), 1.0 - 1e-4 + std::log(1e-4), 1e-12);
  EXPECT_TRUE(std::isfinite(bas_score(one)));
}

TEST(BasScoreTest, EmptyThrows) {
  EXPECT_THROW(bas_score(std::vector<Prediction>{}), DataError);
}

TEST(BasScoreTest, MatchesOracle) {
  const auto records = random_records(500, 3);
  std::vector<oracle::Pair> pairs;
  for (const auto& r : records) pairs.push_back({r.confidence.value(), r.correct});
  EXPECT_NEAR(bas_score(records), oracle::bas_score(pairs), 1e-12);
}

TEST(BasScoreTest, OrderInvariantBitwise) {
  auto records = random_records(257, 11);
  const double reference = bas_score(records);
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    EXPECT_EQ(bas_score(records), reference);
  }
}

TEST(ExpectedUtilityTest, ClosedFormValue) {
  EXPECT_NEAR(expected_bas_utility(Confidence(0.5), Probability(0.5)), 0.153426, 1e-6);
  for (double p : {0.1, 0.4, 0.8}) {
    for (double s : {0.2, 0.5, 0.9}) {
      EXPECT_NEAR(expected_bas_utility(Confidence(s), Probability(p)),
                  oracle::expected_utility(s, p), 1e-13);
    }
  }
}

TEST(RiskPriorTest, Weights) {
  EXPECT_EQ(RiskPrior::uniform().weight(0.3), 1.0);
  EXPECT_DOUBLE_EQ(RiskPrior::linear().weight(0.3), 0.6);
  EXPECT_DOUBLE_EQ(RiskPrior::quadratic().weight(0.5), 0.75);
  EXPECT_EQ(RiskPrior::from_name("quadratic").kind(), RiskPrior::Kind::kQuadratic);
  EXPECT_THROW(RiskPrior::from_name("cubic"), ConfigError);
}

TEST(RiskPriorTest, TabulatedInterpolatesAndRenormalizes) {
  // integral 1 + 5e-7: accepted and rescaled
  const RiskPrior prior = RiskPrior::tabulated({{0.0, 0.0}, {0.5, 1.000001}, {1.0, 2.0}});
  const double scale = 1.0 / (0.25 * 1.000001 + 0.25 * 3.000001);
  EXPECT_NEAR(prior.weight(0.25), 0.5000005 * scale, 1e-12);
  EXPECT_NEAR(prior.weight(1.0), 2.0 * scale, 1e-12);
  ASSERT_EQ(prior.breakpoints().size(), 1u);
  EXPECT_EQ(prior.breakpoints()[0], 0.5);
}

TEST(RiskPriorTest, TabulatedRejectsBadTables) {
  EXPECT_THROW(RiskPrior::tabulated({{0.0, 1.0}, {1.0, 1.1}}), ConfigError);
  EXPECT_THROW(RiskPrior::tabulated({{0.0, 1.0}}), ConfigError);
  EXPECT_THROW(RiskPrior::tabulated({{0.1, 1.0}, {1.0, 1.0}}), ConfigError);
  EXPECT_THROW(RiskPrior::tabulated({{0.0, 2.0}, {0.5, -1.0}, {1.0, 2.0}}), ConfigError);
  EXPECT_THROW(RiskPrior::tabulated({{0.0, 1.0}, {0.6, 1.0}, {0.6, 1.0}, {1.0, 1.0}}),
               ConfigError);
}

TEST(WeightedUtilityTest, DocumentedValues) {
  EXPECT_NEAR(weighted_bas_utility(Confidence(0.5), false, RiskPrior::linear()), -0.136294, 1e-6);
  EXPECT_NEAR(weighted_bas_utility(Confidence(0.5), false, RiskPrior::quadratic()), -0.0794415,
              1e-7);
  EXPECT_NEAR(weighted_bas_utility(Confidence(0.5), true, RiskPrior::linear()), 0.25, 1e-12);
  EXPECT_NEAR(weighted_bas_utility(Confidence(0.5), true, RiskPrior::quadratic()), 0.125, 1e-12);
}

TEST(WeightedUtilityTest, MatchesAntiderivatives) {
  for (int i = 0; i <= 999; ++i) {
    const double s = i / 1000.0;
    for (bool z : {false, true}) {
      EXPECT_NEAR(weighted_bas_utility(Confidence(s), z, RiskPrior::linear()),
                  oracle::linear_prior_utility(s, z), 1e-9);
      EXPECT_NEAR(weighted_bas_utility(Confidence(s), z, RiskPrior::quadratic()),
                  oracle::quadratic_prior_utility(s, z), 1e-9);
    }
  }
}

TEST(WeightedUtilityTest, TabulatedLinearTableMatchesLinearPrior) {
  const RiskPrior table = RiskPrior::tabulated({{0.0, 0.0}, {0.4, 0.8}, {1.0, 2.0}});
  for (double s : {0.1, 0.4, 0.55, 0.9, 0.999}) {
    EXPECT_NEAR(weighted_bas_utility(Confidence(s), false, table),
                oracle::linear_prior_utility(s, false), 1e-9);
  }
}

TEST(WeightedScoreTest, UniformEqualsBasScoreExactly) {
  const auto records = random_records(300, 21);
  EXPECT_EQ(weighted_bas_score(records, RiskPrior::uniform()), bas_score(records));
}

TEST(WeightedScoreTest, SingleRecordProfile) {
  const std::vector<Prediction> one = {{0.5, true}};
  EXPECT_NEAR(weighted_bas_score(one, RiskPrior::uniform()), 0.5, 1e-12);
  EXPECT_NEAR(weighted_bas_score(one, RiskPrior::linear()), 0.25, 1e-12);
  EXPECT_NEAR(weighted_bas_score(one, RiskPrior::quadratic()), 0.125, 1e-12);
}

TEST(ExpectedWeightedUtilityTest, UniformMatchesClosedForm) {
  for (double p : {0.05, 0.5, 0.95}) {
    for (double s : {0.1, 0.5, 0.99}) {
      EXPECT_NEAR(expected_weighted_bas_utility(Confidence(s), Probability(p),
                                                RiskPrior::uniform()),
                  oracle::expected_utility(s, p), 1e-9);
    }
  }
}

TEST(CanonicalMeanTest, OrderInvariantAndEmptyThrows) {
  std::vector<double> v = {1e16, 1.0, -1e16, 3.0, 0.5};
  const double m = canonical_mean(v);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(canonical_mean(v), m);
  EXPECT_THROW(canonical_mean({}), DataError);
}

}  // namespace
}  // namespace bas
