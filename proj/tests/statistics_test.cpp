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

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "bas/error.hpp"
#include "bas/kernels.hpp"
#include "bas/statistics.hpp"
#include "bas/synthetic.hpp"
#include "oracles.hpp"

namespace bas {
namespace {

TEST(StandardDeviationTest, SampleDenominator) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(standard_deviation(v), std::sqrt(5.0 / 3.0), 1e-14);
  EXPECT_EQ(standard_deviation(std::vector<double>{2.0}), 0.0);
}

TEST(ResampleIndicesTest, DeterministicAndInRange) {
  const auto a = kernels::resample_indices(100, 42, 7);
  EXPECT_EQ(a, kernels::resample_indices(100, 42, 7));
  EXPECT_NE(a, kernels::resample_indices(100, 42, 8));
  EXPECT_NE(a, kernels::resample_indices(100, 43, 7));
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i : a) EXPECT_LT(i, 100u);
}

TEST(BootstrapTest, ConstantMetricHasZeroUncertainty) {
  const std::vector<Prediction> same(50, Prediction(0.7, true));
  const Estimate e = bootstrap(same, [](std::span<const Prediction> r) { return bas_score(r); },
                               {200, 1});
  EXPECT_NEAR(e.point, 0.7, 1e-15);
  EXPECT_EQ(e.uncertainty, 0.0);
}

TEST(BootstrapTest, SameSeedSameOutput) {
  const auto data = synthetic::bernoulli_population(300, 0.5, 0.6, 3);
  const MetricFn metric = [](std::span<const Prediction> r) { return accuracy(r); };
  const Estimate a = bootstrap(data, metric, {500, 99});
  const Estimate b = bootstrap(data, metric, {500, 99});
  EXPECT_EQ(a.point, b.point);
  EXPECT_EQ(a.uncertainty, b.uncertainty);
  const Estimate c = bootstrap(data, metric, {500, 100});
  EXPECT_NE(a.uncertainty, c.uncertainty);
}

TEST(BootstrapTest, AccuracySeNearBinomial) {
  const auto data = synthetic::bernoulli_population(1000, 0.5, 0.5, 17);
  const Estimate e = bootstrap(data, [](std::span<const Prediction> r) { return accuracy(r); },
                               {1000, 5});
  const double se = oracle::binomial_se(e.point, data.size());
  EXPECT_NEAR(e.uncertainty / se, 1.0, 0.2);
}

TEST(BootstrapTest, MeanPathAgreesWithGenericPath) {
  const auto data = synthetic::overconfident_population(400, 8);
  std::vector<double> per_record;
  for (const auto& p : data) per_record.push_back(p.correct ? 1.0 : 0.0);
  const Estimate fast = bootstrap_mean(per_record, {300, 4});
  const Estimate slow =
      bootstrap(data, [](std::span<const Prediction> r) { return accuracy(r); }, {300, 4});
  EXPECT_NEAR(fast.point, slow.point, 1e-15);
  EXPECT_NEAR(fast.uncertainty, slow.uncertainty, 1e-12);
}

TEST(BootstrapTest, MetricFailureNamesResample) {
  const auto data = synthetic::bernoulli_population(20, 0.5, 0.5, 1);
  int calls = 0;
  const MetricFn flaky = [&](std::span<const Prediction> r) {
    if (calls++ == 3) throw DataError("empty bin set");
    return accuracy(r);
  };
  try {
    kernels::serial::bootstrap_replicates(
        data.size(), [&](std::span<const std::size_t>) { return flaky(data); }, 10, 0);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("resample"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("empty bin set"), std::string::npos);
  }
  EXPECT_THROW(bootstrap(data, MetricFn([](std::span<const Prediction>) -> double {
                           throw DataError("boom");
                         }),
                         {10, 0}),
               DataError);
}

TEST(BootstrapTest, RejectsZeroResamplesAndEmptyInput) {
  const auto data = synthetic::bernoulli_population(20, 0.5, 0.5, 1);
  const MetricFn metric = [](std::span<const Prediction> r) { return accuracy(r); };
  EXPECT_THROW(bootstrap(data, metric, {0, 0}), ConfigError);
  EXPECT_THROW(bootstrap(std::vector<Prediction>{}, metric, {10, 0}), DataError);
}

TEST(KernelsTest, SerialAndParallelBitwiseEqual) {
  const auto data = synthetic::overconfident_population(2000, 31);
  for (const RiskPrior& prior : {RiskPrior::uniform(), RiskPrior::linear(), RiskPrior::quadratic()}) {
    const auto a = kernels::serial::weighted_utilities(data, prior, ClipEpsilon());
    const auto b = kernels::omp::weighted_utilities(data, prior, ClipEpsilon());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]) << i;
  }
  const kernels::IndexStatistic stat = [&](std::span<const std::size_t> idx) {
    std::vector<double> v;
    for (std::size_t i : idx) v.push_back(data[i].confidence.value());
    return canonical_mean(std::move(v));
  };
  EXPECT_EQ(kernels::serial::bootstrap_replicates(data.size(), stat, 64, 9),
            kernels::omp::bootstrap_replicates(data.size(), stat, 64, 9));
}

TEST(HashTest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashTest, DatasetHashTracksContent) {
  const std::vector<Prediction> a = {{0.5, true}, {0.2, false}};
  const std::vector<Prediction> b = {{0.5, true}, {0.2, true}};
  EXPECT_EQ(dataset_hash(a).size(), 16u);
  EXPECT_NE(dataset_hash(a), dataset_hash(b));
  EXPECT_EQ(dataset_hash(a), dataset_hash(std::vector<Prediction>(a)));
}

TEST(MetricReportTest, EntriesAndNames) {
  const auto data = synthetic::overconfident_population(200, 2);
  ReportConfig config;
  config.bootstrap = {100, 1};
  const MetricReport report = compute_metric_report(data, config, 5);
  std::vector<std::string> names;
  for (const auto& e : report.entries) names.push_back(e.metric);
  EXPECT_EQ(names, report_metric_names(config));
  EXPECT_EQ(names.front(), "accuracy");
  EXPECT_EQ(names.back(), "parse_failure_rate");
  EXPECT_NEAR(report.at("parse_failure_rate").value, 5.0 / 205.0, 1e-15);
  EXPECT_EQ(report.at("bas").value, bas_score(data));
  EXPECT_EQ(report.at("bas_quadratic").value, weighted_bas_score(data, RiskPrior::quadratic()));
  EXPECT_EQ(report.at("ece").value, ece_binned(data));
  EXPECT_EQ(report.at("aurc").value, aurc(data));
  for (const auto& e : report.entries) {
    EXPECT_GE(e.uncertainty, 0.0);
    EXPECT_EQ(e.fingerprint, report.fingerprint);
    EXPECT_EQ(e.n, 200u);
  }
  EXPECT_THROW(report.at("nope"), DataError);
}

TEST(MetricReportTest, FilterAndUnknownMetric) {
  const auto data = synthetic::overconfident_population(50, 2);
  ReportConfig config;
  config.bootstrap = {20, 1};
  config.metrics = {"aurc", "bas"};
  const MetricReport report = compute_metric_report(data, config);
  ASSERT_EQ(report.entries.size(), 2u);
  EXPECT_EQ(report.entries[0].metric, "bas");
  config.metrics = {"f1"};
  EXPECT_THROW(compute_metric_report(data, config), ConfigError);
}

TEST(MetricReportTest, FingerprintChangesWithConfig) {
  const auto data = synthetic::overconfident_population(50, 2);
  ReportConfig a;
  ReportConfig b;
  b.bootstrap.seed = 1;
  const std::string h = dataset_hash(data);
  EXPECT_EQ(config_fingerprint(a, h), config_fingerprint(ReportConfig{}, h));
  EXPECT_NE(config_fingerprint(a, h), config_fingerprint(b, h));
  ReportConfig c;
  c.bins.n_bins = 15;
  EXPECT_NE(config_fingerprint(a, h), config_fingerprint(c, h));
}

TEST(SyntheticTest, OverconfidentPopulationShape) {
  const auto data = synthetic::overconfident_population(5000, 1);
  double conf = 0.0;
  for (const auto& p : data) conf += p.confidence.value();
  EXPECT_GT(conf / data.size(), accuracy(data) + 0.2);
  EXPECT_EQ(data, synthetic::overconfident_population(5000, 1));
}

}  // namespace
}  // namespace bas
