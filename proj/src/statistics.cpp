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

#include "bas/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "bas/error.hpp"

namespace bas {
namespace {

std::string short_digest(std::string_view bytes) {
  return sha256_hex(bytes).substr(0, 16);
}

std::string scheme_name(BinningScheme scheme) {
  return scheme == BinningScheme::kEqualWidth ? "equal_width" : "equal_mass";
}

void require_resamples(const BootstrapConfig& cfg) {
  if (cfg.n_resamples < 1) throw ConfigError("n_resamples must be at least 1");
}

}  // namespace

double standard_deviation(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Welford update: identical values give exactly zero.
  double mean = 0.0;
  double squares = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double delta = sorted[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    squares += delta * (sorted[i] - mean);
  }
  return std::sqrt(squares / static_cast<double>(sorted.size() - 1));
}

Estimate bootstrap_indexed(std::size_t n, double point,
                           const kernels::IndexStatistic& statistic,
                           const BootstrapConfig& cfg) {
  require_resamples(cfg);
  if (n == 0) throw DataError("bootstrap: no records");
  const std::vector<double> replicates =
      kernels::omp::bootstrap_replicates(n, statistic, cfg.n_resamples, cfg.seed);
  return {point, standard_deviation(replicates)};
}

Estimate bootstrap(std::span<const Prediction> records, const MetricFn& metric,
                   const BootstrapConfig& cfg) {
  if (records.empty()) throw DataError("bootstrap: no records");
  const double point = metric(records);
  return bootstrap_indexed(
      records.size(), point,
      [&records, &metric](std::span<const std::size_t> indices) {
        std::vector<Prediction> resample;
        resample.reserve(indices.size());
        for (std::size_t i : indices) resample.push_back(records[i]);
        return metric(resample);
      },
      cfg);
}

Estimate bootstrap_mean(std::span<const double> per_record,
                        const BootstrapConfig& cfg) {
  if (per_record.empty()) throw DataError("bootstrap: no records");
  const double point =
      canonical_mean(std::vector<double>(per_record.begin(), per_record.end()));
  return bootstrap_indexed(
      per_record.size(), point,
      [per_record](std::span<const std::size_t> indices) {
        std::vector<double> values;
        values.reserve(indices.size());
        for (std::size_t i : indices) values.push_back(per_record[i]);
        return canonical_mean(std::move(values));
      },
      cfg);
}

const MetricEntry* MetricReport::find(std::string_view metric) const {
  for (const MetricEntry& entry : entries) {
    if (entry.metric == metric) return &entry;
  }
  return nullptr;
}

const MetricEntry& MetricReport::at(std::string_view metric) const {
  const MetricEntry* entry = find(metric);
  if (entry == nullptr) {
    throw DataError(fmt::format("report has no metric '{}'", metric));
  }
  return *entry;
}

std::string weighted_metric_name(const RiskPrior& prior) {
  if (prior.kind() == RiskPrior::Kind::kUniform) return "bas";
  return "bas_" + prior.name();
}

std::vector<std::string> report_metric_names(const ReportConfig& config) {
  std::vector<std::string> names = {"accuracy", "bas",   "ece",     "ece_unbinned",
                                    "aurc",     "brier", "log_loss"};
  for (const RiskPrior& prior : config.priors) {
    const std::string name = weighted_metric_name(prior);
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      names.push_back(name);
    }
  }
  names.push_back("parse_failure_rate");
  if (config.metrics.empty()) return names;

  for (const std::string& wanted : config.metrics) {
    if (std::find(names.begin(), names.end(), wanted) == names.end()) {
      throw ConfigError(fmt::format("unknown metric '{}'", wanted));
    }
  }
  std::vector<std::string> selected;
  for (const std::string& name : names) {
    if (std::find(config.metrics.begin(), config.metrics.end(), name) !=
        config.metrics.end()) {
      selected.push_back(name);
    }
  }
  return selected;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw ConfigError("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

std::string dataset_hash(std::span<const Prediction> records) {
  std::string canonical;
  for (const Prediction& r : records) {
    canonical += fmt::format("{:.17g} {}\n", r.confidence.value(), r.correct ? 1 : 0);
  }
  return short_digest(canonical);
}

std::string config_fingerprint(const ReportConfig& config,
                               std::string_view dataset_hash) {
  std::string text = fmt::format(
      "bins={};scheme={};resamples={};seed={};eps={:.17g};",
      config.bins.n_bins, scheme_name(config.bins.scheme),
      config.bootstrap.n_resamples, config.bootstrap.seed, config.eps.value());
  text += "priors=";
  for (const RiskPrior& prior : config.priors) {
    text += prior.name();
    for (const auto& [t, w] : prior.table()) {
      text += fmt::format(":{:.17g}/{:.17g}", t, w);
    }
    text += ",";
  }
  text += ";metrics=";
  for (const std::string& name : report_metric_names(config)) text += name + ",";
  text += fmt::format(";dataset={}", dataset_hash);
  return short_digest(text);
}

MetricReport compute_metric_report(std::span<const Prediction> records,
                                   const ReportConfig& config,
                                   std::size_t n_parse_failures) {
  if (records.empty()) throw DataError("no scorable records");
  require_resamples(config.bootstrap);

  MetricReport report;
  report.n_records = records.size();
  report.n_parse_failures = n_parse_failures;
  report.dataset_hash = dataset_hash(records);
  report.fingerprint = config_fingerprint(config, report.dataset_hash);

  const auto add = [&report](std::string name, Estimate estimate) {
    report.entries.push_back({std::move(name), estimate.point, estimate.uncertainty,
                              report.n_records, report.fingerprint,
                              report.dataset_hash});
  };
  const auto per_record = [&records](auto&& term) {
    std::vector<double> values;
    values.reserve(records.size());
    for (const Prediction& r : records) values.push_back(term(r));
    return values;
  };
  const double eps = config.eps.value();

  for (const std::string& name : report_metric_names(config)) {
    if (name == "accuracy") {
      add(name, bootstrap_mean(per_record([](const Prediction& r) {
                                 return r.correct ? 1.0 : 0.0;
                               }),
                               config.bootstrap));
    } else if (name == "bas") {
      add(name, bootstrap_mean(per_record([&config](const Prediction& r) {
                                 return bas_utility(clip_confidence(r.confidence, config.eps),
                                                    r.correct);
                               }),
                               config.bootstrap));
    } else if (name == "ece") {
      const BinningConfig bins = config.bins;
      add(name, bootstrap(records,
                          [bins](std::span<const Prediction> sample) {
                            return ece_binned(sample, bins);
                          },
                          config.bootstrap));
    } else if (name == "ece_unbinned") {
      add(name, bootstrap_mean(per_record([](const Prediction& r) {
                                 return std::abs(r.confidence.value() -
                                                 (r.correct ? 1.0 : 0.0));
                               }),
                               config.bootstrap));
    } else if (name == "aurc") {
      add(name, bootstrap(records,
                          [](std::span<const Prediction> sample) { return aurc(sample); },
                          config.bootstrap));
    } else if (name == "brier") {
      add(name, bootstrap_mean(per_record([](const Prediction& r) {
                                 const double gap =
                                     r.confidence.value() - (r.correct ? 1.0 : 0.0);
                                 return gap * gap;
                               }),
                               config.bootstrap));
    } else if (name == "log_loss") {
      add(name, bootstrap_mean(per_record([eps](const Prediction& r) {
                                 const double s =
                                     std::clamp(r.confidence.value(), eps, 1.0 - eps);
                                 return r.correct ? -std::log(s) : -std::log1p(-s);
                               }),
                               config.bootstrap));
    } else if (name == "parse_failure_rate") {
      const double total = static_cast<double>(records.size() + n_parse_failures);
      add(name, {static_cast<double>(n_parse_failures) / total, 0.0});
    } else {
      for (const RiskPrior& prior : config.priors) {
        if (weighted_metric_name(prior) != name) continue;
        add(name, bootstrap_mean(
                      kernels::omp::weighted_utilities(records, prior, config.eps),
                      config.bootstrap));
        break;
      }
    }
  }
  return report;
}

}  // namespace bas
