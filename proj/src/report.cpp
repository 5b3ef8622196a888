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

#include "bas/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "bas/error.hpp"

namespace bas::report {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kMissing = "-";

bool is_percent_metric(std::string_view metric) {
  return metric == "accuracy" || metric == "ece" || metric == "ece_unbinned" ||
         metric == "parse_failure_rate";
}

std::string label(const MetricReport& r) { return r.model.empty() ? "(unnamed)" : r.model; }

// Left-aligned first `text_columns` columns, right-aligned numbers.
void write_grid(std::ostream& out, const std::vector<std::vector<std::string>>& rows,
                std::size_t text_columns) {
  if (rows.empty()) return;
  std::vector<std::size_t> widths(rows.front().size(), 0);
  const auto display_width = [](const std::string& s) {
    // count code points; the ± sign is two bytes
    return static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
  };
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], display_width(row[c]));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      const std::string& cell = rows[r][c];
      const std::string pad(widths[c] - display_width(cell), ' ');
      if (c > 0) line += "  ";
      line += c < text_columns ? cell + pad : pad + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : widths) total += w;
      out << std::string(total + 2 * (widths.size() - 1), '-') << '\n';
    }
  }
}

std::string cell(const MetricReport& r, std::string_view metric) {
  const MetricEntry* entry = r.find(metric);
  return entry ? format_estimate(*entry) : kMissing;
}

double number_or_nan(const Json& value) {
  return value.is_null() ? std::numeric_limits<double>::quiet_NaN() : value.get<double>();
}

std::string dump(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

std::string csv_number(double value) {
  return std::isnan(value) ? std::string() : fmt::format("{}", value);
}

std::string csv_text(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

}  // namespace

OutputFormat format_from_string(std::string_view text) {
  if (text == "table") return OutputFormat::kTable;
  if (text == "machine") return OutputFormat::kMachine;
  throw ConfigError(fmt::format("unknown format '{}' (expected table or machine)", text));
}

std::vector<HistogramBin> confidence_histogram(std::span<const Prediction> records,
                                               std::size_t n_bins) {
  if (n_bins == 0) throw ConfigError("histogram needs at least one bin");
  std::vector<HistogramBin> bins(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lower = static_cast<double>(b) / static_cast<double>(n_bins);
    bins[b].upper = static_cast<double>(b + 1) / static_cast<double>(n_bins);
  }
  for (const Prediction& p : records) {
    const double s = p.confidence.value();
    const auto b = std::min(n_bins - 1, static_cast<std::size_t>(s * static_cast<double>(n_bins)));
    ++(p.correct ? bins[b].correct : bins[b].incorrect);
  }
  return bins;
}

ReportDocument build_document(std::span<const Prediction> records, const ReportConfig& config,
                              std::string model, std::string task,
                              std::size_t n_parse_failures) {
  ReportDocument doc;
  doc.metrics = compute_metric_report(records, config, n_parse_failures);
  doc.metrics.model = std::move(model);
  doc.metrics.task = std::move(task);
  doc.reliability = reliability_bins(records, config.bins);
  doc.histogram = confidence_histogram(records, config.bins.n_bins);
  doc.risk_coverage = risk_coverage_curve(records);
  return doc;
}

std::string format_metric(std::string_view metric, double value) {
  if (std::isnan(value)) return kMissing;
  if (is_percent_metric(metric)) return fmt::format("{:.1f}", 100.0 * value);
  if (metric == "brier" || metric == "log_loss") return fmt::format("{:.3f}", value);
  return fmt::format("{:.2f}", value);
}

std::string format_estimate(const MetricEntry& entry) {
  return fmt::format("{} ± {}", format_metric(entry.metric, entry.value),
                     format_metric(entry.metric, entry.uncertainty));
}

void write_table(std::ostream& out, std::span<const MetricReport> reports) {
  std::vector<std::vector<std::string>> main = {
      {"Model", "Task", "N", "Acc (%)", "BAS", "ECE (%)", "AURC"}};
  std::vector<std::vector<std::string>> extra = {
      {"Model", "Task", "ECE unbinned (%)", "Brier", "Log loss", "Parse failures (%)"}};
  // profile columns: every bas* metric present in any report, first-seen order
  std::vector<std::string> profile_metrics;
  for (const MetricReport& r : reports) {
    for (const MetricEntry& e : r.entries) {
      if ((e.metric == "bas" || e.metric.starts_with("bas_")) &&
          std::find(profile_metrics.begin(), profile_metrics.end(), e.metric) ==
              profile_metrics.end()) {
        profile_metrics.push_back(e.metric);
      }
    }
  }
  std::vector<std::vector<std::string>> profile(1, {"Model", "Task"});
  for (const std::string& m : profile_metrics) {
    profile[0].push_back(m == "bas" ? "uniform" : m.substr(4));
  }

  for (const MetricReport& r : reports) {
    main.push_back({label(r), r.task.empty() ? kMissing : r.task, std::to_string(r.n_records),
                    cell(r, "accuracy"), cell(r, "bas"), cell(r, "ece"), cell(r, "aurc")});
    extra.push_back({label(r), r.task.empty() ? kMissing : r.task, cell(r, "ece_unbinned"),
                     cell(r, "brier"), cell(r, "log_loss"), cell(r, "parse_failure_rate")});
    std::vector<std::string> row = {label(r), r.task.empty() ? kMissing : r.task};
    for (const std::string& m : profile_metrics) row.push_back(cell(r, m));
    profile.push_back(std::move(row));
  }
  write_grid(out, main, 2);
  out << '\n';
  write_grid(out, extra, 2);
  if (!profile_metrics.empty()) {
    out << "\nBAS by risk prior\n";
    write_grid(out, profile, 2);
  }
  for (const MetricReport& r : reports) {
    out << fmt::format("\n{} {}: fingerprint {} dataset {}", label(r), r.task, r.fingerprint,
                       r.dataset_hash);
  }
  if (!reports.empty()) out << '\n';
}

void write_machine(std::ostream& out, std::span<const ReportDocument> documents) {
  for (const ReportDocument& doc : documents) {
    const MetricReport& m = doc.metrics;
    const auto base = [&](const char* kind) {
      Json line = Json::object();
      line["kind"] = kind;
      line["model"] = m.model;
      line["task"] = m.task;
      return line;
    };
    Json header = base("report");
    header["n_records"] = m.n_records;
    header["n_parse_failures"] = m.n_parse_failures;
    header["fingerprint"] = m.fingerprint;
    header["dataset_hash"] = m.dataset_hash;
    out << dump(header) << '\n';
    for (const MetricEntry& e : m.entries) {
      Json line = base("metric");
      line["metric"] = e.metric;
      line["value"] = e.value;
      line["uncertainty"] = e.uncertainty;
      line["n"] = e.n;
      line["fingerprint"] = e.fingerprint;
      line["dataset_hash"] = e.dataset_hash;
      out << dump(line) << '\n';
    }
    for (const ReliabilityBin& b : doc.reliability) {
      Json line = base("reliability");
      line["lower"] = b.lower;
      line["upper"] = b.upper;
      line["mean_confidence"] = b.mean_confidence;  // NaN dumps as null
      line["accuracy"] = b.accuracy;
      line["count"] = b.count;
      out << dump(line) << '\n';
    }
    for (const HistogramBin& b : doc.histogram) {
      Json line = base("histogram");
      line["lower"] = b.lower;
      line["upper"] = b.upper;
      line["correct"] = b.correct;
      line["incorrect"] = b.incorrect;
      out << dump(line) << '\n';
    }
    for (const RiskCoveragePoint& p : doc.risk_coverage) {
      Json line = base("risk_coverage");
      line["coverage"] = p.coverage;
      line["risk"] = p.risk;
      out << dump(line) << '\n';
    }
  }
}

std::vector<ReportDocument> read_machine(std::istream& in) {
  std::vector<ReportDocument> docs;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json line = Json::parse(text);
      const std::string kind = line.at("kind").get<std::string>();
      const auto key = std::make_pair(line.value("model", std::string()),
                                      line.value("task", std::string()));
      auto [it, inserted] = index.try_emplace(key, docs.size());
      if (inserted) {
        docs.emplace_back();
        docs.back().metrics.model = key.first;
        docs.back().metrics.task = key.second;
      }
      ReportDocument& doc = docs[it->second];
      if (kind == "report") {
        doc.metrics.n_records = line.at("n_records").get<std::size_t>();
        doc.metrics.n_parse_failures = line.value("n_parse_failures", std::size_t{0});
        doc.metrics.fingerprint = line.value("fingerprint", std::string());
        doc.metrics.dataset_hash = line.value("dataset_hash", std::string());
      } else if (kind == "metric") {
        MetricEntry e;
        e.metric = line.at("metric").get<std::string>();
        e.value = number_or_nan(line.at("value"));
        e.uncertainty = number_or_nan(line.at("uncertainty"));
        e.n = line.at("n").get<std::size_t>();
        e.fingerprint = line.value("fingerprint", std::string());
        e.dataset_hash = line.value("dataset_hash", std::string());
        if (doc.metrics.n_records == 0) doc.metrics.n_records = e.n;
        doc.metrics.entries.push_back(std::move(e));
      } else if (kind == "reliability") {
        doc.reliability.push_back({line.at("lower").get<double>(), line.at("upper").get<double>(),
                                   number_or_nan(line.at("mean_confidence")),
                                   number_or_nan(line.at("accuracy")),
                                   line.at("count").get<std::size_t>()});
      } else if (kind == "histogram") {
        doc.histogram.push_back({line.at("lower").get<double>(), line.at("upper").get<double>(),
                                 line.at("correct").get<std::size_t>(),
                                 line.at("incorrect").get<std::size_t>()});
      } else if (kind == "risk_coverage") {
        doc.risk_coverage.push_back(
            {line.at("coverage").get<double>(), line.at("risk").get<double>()});
      } else {
        throw DataError(fmt::format("line {}: unknown report line kind '{}'", line_no, kind));
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("line {}: not a report line: {}", line_no, e.what()));
    }
  }
  if (docs.empty()) throw DataError("report contains no entries");
  return docs;
}

std::vector<ReportDocument> read_machine(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open report '{}'", path.string()));
  try {
    return read_machine(in);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<Divergence> find_divergences(std::span<const MetricReport> reports,
                                         const CompareConfig& config) {
  std::vector<Divergence> found;
  const auto value = [](const MetricReport& r, std::string_view m) {
    const MetricEntry* e = r.find(m);
    return e ? e->value : std::numeric_limits<double>::quiet_NaN();
  };
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (std::size_t j = i + 1; j < reports.size(); ++j) {
      const double binned = std::abs(value(reports[i], "ece") - value(reports[j], "ece"));
      const double unbinned =
          std::abs(value(reports[i], "ece_unbinned") - value(reports[j], "ece_unbinned"));
      const double bas = std::abs(value(reports[i], "bas") - value(reports[j], "bas"));
      // fmin ignores a NaN side; both NaN stays NaN and fails the test below
      const double ece = std::fmin(binned, unbinned);
      if (ece <= config.ece_tolerance && bas >= config.bas_gap) {
        found.push_back({i, j, ece, bas});
      }
    }
  }
  return found;
}

void write_comparison(std::ostream& out, std::span<const MetricReport> reports,
                      const CompareConfig& config) {
  write_table(out, reports);
  const std::vector<Divergence> found = find_divergences(reports, config);
  out << '\n';
  if (found.empty()) {
    out << "No pairs with similar ECE and diverging BAS.\n";
    return;
  }
  out << fmt::format("Similar ECE (within {:.1f} pts), BAS apart by at least {:.2f}:\n",
                     100.0 * config.ece_tolerance, config.bas_gap);
  for (const Divergence& d : found) {
    const MetricReport& a = reports[d.first];
    const MetricReport& b = reports[d.second];
    out << fmt::format("  {} {} vs {} {}: |dECE| = {:.1f} pts, |dBAS| = {:.2f}\n", label(a),
                       a.task, label(b), b.task, 100.0 * d.ece_delta, d.bas_delta);
  }
}

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir,
                                                   std::span<const ReportDocument> documents,
                                                   bool gnuplot_script) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  std::vector<std::filesystem::path> written;
  const auto prefix = [](const ReportDocument& d) {
    return csv_text(d.metrics.model) + "," + csv_text(d.metrics.task) + ",";
  };

  {
    written.push_back(dir / "reliability.csv");
    std::ofstream out = open_output(written.back());
    out << "model,task,lower,upper,mean_confidence,accuracy,count\n";
    for (const ReportDocument& d : documents) {
      for (const ReliabilityBin& b : d.reliability) {
        out << prefix(d) << fmt::format("{},{},{},{},{}\n", b.lower, b.upper,
                                        csv_number(b.mean_confidence), csv_number(b.accuracy),
                                        b.count);
      }
    }
  }
  {
    written.push_back(dir / "confidence_histogram.csv");
    std::ofstream out = open_output(written.back());
    out << "model,task,lower,upper,correct,incorrect\n";
    for (const ReportDocument& d : documents) {
      for (const HistogramBin& b : d.histogram) {
        out << prefix(d) << fmt::format("{},{},{},{}\n", b.lower, b.upper, b.correct, b.incorrect);
      }
    }
  }
  {
    written.push_back(dir / "risk_coverage.csv");
    std::ofstream out = open_output(written.back());
    out << "model,task,coverage,risk\n";
    for (const ReportDocument& d : documents) {
      for (const RiskCoveragePoint& p : d.risk_coverage) {
        out << prefix(d) << fmt::format("{},{}\n", p.coverage, p.risk);
      }
    }
  }
  {
    written.push_back(dir / "metrics.csv");
    std::ofstream out = open_output(written.back());
    out << "model,task,n,metric,value,uncertainty\n";
    for (const ReportDocument& d : documents) {
      for (const MetricEntry& e : d.metrics.entries) {
        out << prefix(d) << fmt::format("{},{},{},{}\n", e.n, e.metric, csv_number(e.value),
                                        csv_number(e.uncertainty));
      }
    }
  }
  {
    written.push_back(dir / "bas_vs_metric.csv");
    std::ofstream out = open_output(written.back());
    const std::vector<std::string> columns = {"bas",  "accuracy", "ece",     "ece_unbinned",
                                              "aurc", "brier",    "log_loss"};
    out << "model,task";
    for (const std::string& c : columns) out << ',' << c;
    out << '\n';
    for (const ReportDocument& d : documents) {
      out << csv_text(d.metrics.model) << ',' << csv_text(d.metrics.task);
      for (const std::string& c : columns) {
        const MetricEntry* e = d.metrics.find(c);
        out << ',' << (e ? csv_number(e->value) : std::string());
      }
      out << '\n';
    }
  }
  if (gnuplot_script) {
    written.push_back(dir / "plots.gp");
    std::ofstream out = open_output(written.back());
    out << R"(# gnuplot -c plots.gp   (run inside this directory)
set datafile separator ","
set terminal pngcairo size 800,600
set key autotitle columnhead

set output "reliability.png"
set xlabel "confidence"; set ylabel "accuracy"
set xrange [0:1]; set yrange [0:1]
plot "reliability.csv" using 5:6 with linespoints title "bins", x with lines dt 2 title "ideal"

set output "confidence_histogram.png"
set style data histograms; set style histogram rowstacked; set style fill solid 0.7
set xlabel "confidence bin"; set ylabel "count"; set autoscale
plot "confidence_histogram.csv" using 5:xtic(3) title "correct", "" using 6 title "incorrect"

set output "risk_coverage.png"
set style data lines
set xlabel "coverage"; set ylabel "risk"; set xrange [0:1]; set autoscale y
plot "risk_coverage.csv" using 3:4 with steps title "risk"

set output "bas_vs_ece.png"
set xlabel "ECE"; set ylabel "BAS"; set autoscale
plot "bas_vs_metric.csv" using 5:3:1 with labels point pt 7 offset 1,1 notitle
)";
  }
  return written;
}

std::vector<Prediction> make_predictions(const std::vector<bool>& is_correct,
                                         const std::vector<double>& confidence) {
  if (is_correct.size() != confidence.size()) {
    throw DataError(fmt::format("length mismatch: {} labels, {} confidences", is_correct.size(),
                                confidence.size()));
  }
  std::vector<Prediction> out;
  out.reserve(confidence.size());
  for (std::size_t i = 0; i < confidence.size(); ++i) {
    const double s = confidence[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DataError(fmt::format("confidence {} at position {} is outside [0, 1]", s, i));
    }
    out.emplace_back(s, static_cast<bool>(is_correct[i]));
  }
  return out;
}

BasReport::BasReport(std::vector<Prediction> records, ReportConfig config)
    : records_(std::move(records)), config_(std::move(config)),
      metrics_(compute_metric_report(records_, config_)) {}

BasReport::BasReport(const std::vector<bool>& is_correct, const std::vector<double>& confidence,
                     ReportConfig config)
    : BasReport(make_predictions(is_correct, confidence), std::move(config)) {}

double BasReport::score() const { return bas_score(records_, config_.eps); }

double BasReport::weighted_score(std::string_view prior) const {
  return weighted_bas_score(records_, RiskPrior::from_name(prior), config_.eps);
}

std::string BasReport::summary() const {
  std::vector<std::vector<std::string>> rows = {{"Metric", "Value", "Uncertainty"}};
  for (const MetricEntry& e : metrics_.entries) {
    rows.push_back({e.metric, format_metric(e.metric, e.value),
                    format_metric(e.metric, e.uncertainty)});
  }
  std::ostringstream out;
  write_grid(out, rows, 1);
  out << "\nBAS by risk prior\n";
  std::vector<std::vector<std::string>> profile = {{"Prior", "BAS"}};
  for (const char* prior : {"uniform", "linear", "quadratic"}) {
    profile.push_back({prior, fmt::format("{:.4f}", weighted_score(prior))});
  }
  write_grid(out, profile, 1);
  return out.str();
}

}  // namespace bas::report
