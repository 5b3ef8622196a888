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

#include "bas/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "json.hpp"

#include "bas/calibration.hpp"
#include "bas/error.hpp"
#include "bas/records.hpp"
#include "bas/report.hpp"
#include "bas/statistics.hpp"

namespace bas::cli {
namespace {

using Json = nlohmann::ordered_json;

struct GlobalFlags {
  std::uint64_t seed = 0;
  std::string format = "table";
  double eps = kDefaultClipEpsilon;
};

struct MetricFlags {
  std::vector<std::string> weights = {"uniform", "linear", "quadratic"};
  std::optional<std::string> prior_table;
  std::size_t bins = 10;
  std::string binning = "width";
  std::size_t bootstrap = 1000;
  std::vector<std::string> metrics;
};

struct EvalFlags {
  MetricFlags metric;
  std::vector<std::string> inputs;
  std::optional<std::string> model;
  std::optional<std::string> task;
  std::optional<std::string> parse_failures;
  std::optional<std::string> output;
};

struct CalibrateFlags {
  MetricFlags metric;
  std::optional<std::string> train;
  std::optional<std::string> apply;
  std::optional<std::string> input;
  std::optional<std::string> split;
  std::optional<std::size_t> calibration_size;
  std::optional<std::string> out;
  std::optional<std::string> map_out;
  std::optional<std::string> map_in;
  std::vector<std::size_t> ablation_sizes;
  std::size_t repeats = 20;
  std::optional<std::string> output;
};

struct ProviderFlags {
  std::optional<std::string> config;
  std::optional<std::string> base_url;
  std::optional<std::string> api_key_env;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::optional<int> max_concurrent;
  std::optional<int> timeout_ms;
  std::optional<int> max_attempts;
};

struct RunFlags {
  ProviderFlags provider;
  std::string questions;
  std::string elicitation = "direct";
  int k = 3;
  std::optional<std::string> system_template;
  std::optional<std::string> checkpoint;
  std::optional<std::string> label;
  std::optional<std::string> out;
  std::optional<std::string> failures;
};

struct JudgeFlags {
  ProviderFlags provider;
  std::string records;
  std::string gt;
  std::optional<std::string> prompt_template;
  std::optional<std::string> out;
  std::optional<std::string> failures;
};

struct GradeFlags {
  std::string records;
  std::string gt;
  std::string mode = "numeric";
  std::optional<std::string> out;
};

struct CompareFlags {
  std::vector<std::string> reports;
  double ece_tolerance = report::CompareConfig{}.ece_tolerance;
  double bas_gap = report::CompareConfig{}.bas_gap;
  std::optional<std::string> output;
};

struct PlotFlags {
  std::vector<std::string> reports;
  std::string out_dir;
  bool gnuplot = false;
};

void add_metric_flags(CLI::App* cmd, MetricFlags& f) {
  cmd->add_option("--weights", f.weights,
                  "Risk priors for weighted BAS: uniform, linear, quadratic, tabulated")
      ->delimiter(',');
  cmd->add_option("--prior-table", f.prior_table,
                  "CSV of `threshold,weight` rows for the tabulated prior");
  cmd->add_option("--bins", f.bins, "Number of ECE bins")->check(CLI::PositiveNumber);
  cmd->add_option("--binning", f.binning, "ECE binning scheme")
      ->check(CLI::IsMember({"width", "mass"}));
  cmd->add_option("--bootstrap", f.bootstrap, "Bootstrap resamples")->check(CLI::PositiveNumber);
  cmd->add_option("--metrics", f.metrics, "Only report these metrics")->delimiter(',');
}

void add_provider_flags(CLI::App* cmd, ProviderFlags& f) {
  cmd->add_option("--provider-config", f.config, "JSON provider settings");
  cmd->add_option("--base-url", f.base_url, "Chat-completions base URL");
  cmd->add_option("--api-key-env", f.api_key_env, "Environment variable holding the API key");
  cmd->add_option("--model", f.model, "Model name sent to the endpoint");
  cmd->add_option("--temperature", f.temperature);
  cmd->add_option("--max-concurrent", f.max_concurrent, "In-flight request limit");
  cmd->add_option("--timeout-ms", f.timeout_ms);
  cmd->add_option("--max-attempts", f.max_attempts, "Attempts per request");
}

ProviderConfig resolve_provider(const ProviderFlags& f) {
  ProviderConfig p;
  if (f.config) p = load_provider_config(*f.config, p);
  if (f.base_url) p.base_url = *f.base_url;
  if (f.api_key_env) p.api_key_env = *f.api_key_env;
  if (f.model) p.model = *f.model;
  if (f.temperature) p.temperature = *f.temperature;
  if (f.max_concurrent) p.max_concurrent = *f.max_concurrent;
  if (f.timeout_ms) p.timeout_ms = *f.timeout_ms;
  if (f.max_attempts) p.retry.max_attempts = *f.max_attempts;
  p.validate();
  return p;
}

std::vector<std::pair<double, double>> read_prior_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open prior table '{}'", path));
  std::vector<std::pair<double, double>> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t = 0.0;
    double w = 0.0;
    if (!(fields >> t >> w)) {
      if (table.empty() && line_no == 1) continue;  // header row
      throw ConfigError(fmt::format("{} line {}: expected `threshold,weight`", path, line_no));
    }
    table.emplace_back(t, w);
  }
  return table;
}

ReportConfig make_report_config(const MetricFlags& f, const GlobalFlags& g) {
  ReportConfig config;
  config.bins.n_bins = f.bins;
  config.bins.scheme = f.binning == "mass" ? BinningScheme::kEqualMass : BinningScheme::kEqualWidth;
  config.bootstrap = {f.bootstrap, g.seed};
  config.eps = ClipEpsilon(g.eps);
  config.metrics = f.metrics;
  config.priors.clear();
  for (const std::string& name : f.weights) {
    if (name == "tabulated") {
      if (!f.prior_table) throw ConfigError("the tabulated prior needs --prior-table");
      config.priors.push_back(RiskPrior::tabulated(read_prior_table(*f.prior_table)));
    } else {
      config.priors.push_back(RiskPrior::from_name(name));
    }
  }
  report_metric_names(config);  // rejects unknown --metrics names early
  return config;
}

Dataset load_records(const std::string& path, std::ostream& err) {
  Dataset data = read_dataset(std::filesystem::path(path));
  for (const ValidationIssue& issue : data.issues) {
    err << fmt::format("warning: {} line {}: record '{}' rejected: {}\n", path, issue.line,
                       issue.id, issue.reason);
  }
  if (!data.issues.empty()) {
    err << fmt::format("warning: {}: {} record(s) rejected, continuing without them\n", path,
                       data.issues.size());
  }
  return data;
}

// Writes to `path`, or to `fallback` when no path is given.
template <typename Fn>
void emit(const std::optional<std::string>& path, std::ostream& fallback, Fn&& fn) {
  if (!path) {
    fn(fallback);
    return;
  }
  std::ofstream file(*path, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", *path));
  fn(file);
}

void write_documents(std::ostream& out, const GlobalFlags& g,
                     const std::vector<report::ReportDocument>& docs) {
  if (g.format == "machine") {
    report::write_machine(out, docs);
    return;
  }
  std::vector<MetricReport> reports;
  for (const auto& d : docs) reports.push_back(d.metrics);
  report::write_table(out, reports);
}

struct Group {
  std::string model;
  std::string task;
  std::vector<EvalRecord> records;
};

std::vector<Group> group_records(std::vector<EvalRecord> records,
                                 const std::optional<std::string>& model,
                                 const std::optional<std::string>& task) {
  std::vector<Group> groups;
  for (EvalRecord& r : records) {
    const std::string m = r.model.value_or(model.value_or(""));
    const std::string t = r.task.value_or(task.value_or(""));
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.model == m && g.task == t; });
    if (it == groups.end()) {
      groups.push_back({m, t, {}});
      it = std::prev(groups.end());
    }
    it->records.push_back(std::move(r));
  }
  return groups;
}

int cmd_eval(const EvalFlags& f, const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  const ReportConfig config = make_report_config(f.metric, g);
  std::size_t n_failures = 0;
  if (f.parse_failures) {
    std::ifstream in(*f.parse_failures);
    if (!in) throw DataError(fmt::format("cannot open '{}'", *f.parse_failures));
    n_failures = read_parse_failures(in).size();
  }
  std::vector<report::ReportDocument> docs;
  for (const std::string& path : f.inputs) {
    Dataset data = load_records(path, err);
    if (data.records.empty()) throw DataError(fmt::format("{}: no scorable records", path));
    std::vector<Group> groups = group_records(std::move(data.records), f.model, f.task);
    if (f.parse_failures && (groups.size() > 1 || f.inputs.size() > 1)) {
      throw ConfigError("--parse-failures needs a single model/task record set");
    }
    for (Group& group : groups) {
      try {
        docs.push_back(report::build_document(to_predictions(group.records), config, group.model,
                                              group.task, n_failures));
      } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", path, e.what()));
      }
    }
  }
  emit(f.output, out, [&](std::ostream& o) { write_documents(o, g, docs); });
  return 0;
}

bool all_labeled(const std::vector<EvalRecord>& records) {
  return std::all_of(records.begin(), records.end(),
                     [](const EvalRecord& r) { return r.is_correct.has_value(); });
}

std::vector<EvalRecord> apply_map(const CalibrationMap& map, std::vector<EvalRecord> records,
                                  ClipEpsilon eps) {
  for (EvalRecord& r : records) r.confidence = map.apply(Confidence(r.confidence), eps).value();
  return records;
}

std::string stage_label(const std::vector<EvalRecord>& records, std::string_view stage) {
  const std::string task = records.empty() ? "" : records.front().task.value_or("");
  return task.empty() ? std::string(stage) : fmt::format("{} ({})", task, stage);
}

int cmd_calibrate(const CalibrateFlags& f, const GlobalFlags& g, std::ostream& out,
                  std::ostream& err) {
  const ReportConfig config = make_report_config(f.metric, g);
  std::vector<EvalRecord> train;
  std::vector<EvalRecord> test;
  std::string created_from;
  std::optional<CalibrationMap> map;

  if (f.map_in) {
    if (!f.apply) throw ConfigError("--map-in needs --apply");
    std::ifstream in(*f.map_in);
    if (!in) throw ConfigError(fmt::format("cannot open map '{}'", *f.map_in));
    map = CalibrationMap::read(in);
    test = load_records(*f.apply, err).records;
  } else if (f.input) {
    if (f.train || f.apply) throw ConfigError("--input cannot be combined with --train/--apply");
    if (f.split.value_or("auto") != "auto") throw ConfigError("--split only supports `auto`");
    std::vector<EvalRecord> all = load_records(*f.input, err).records;
    std::vector<std::string> ids;
    for (const EvalRecord& r : all) ids.push_back(r.id);
    const SplitSpec split = auto_split(ids, g.seed, f.calibration_size);
    for (EvalRecord& r : all) {
      (split.calibration_ids.contains(r.id) ? train : test).push_back(std::move(r));
    }
    created_from = fmt::format("{} (auto split, seed {})",
                               std::filesystem::path(*f.input).filename().string(), g.seed);
  } else {
    if (!f.train || !f.apply) throw ConfigError("calibrate needs --train and --apply, or --input");
    train = load_records(*f.train, err).records;
    test = load_records(*f.apply, err).records;
    created_from = std::filesystem::path(*f.train).filename().string();
  }

  if (!map) {
    SplitSpec spec;
    for (const EvalRecord& r : train) spec.calibration_ids.insert(r.id);
    for (const EvalRecord& r : test) spec.evaluation_ids.insert(r.id);
    spec.validate();
    map = fit_isotonic(to_predictions(train), created_from);
  }
  if (test.empty()) throw DataError("no records to calibrate");
  const std::vector<EvalRecord> calibrated = apply_map(*map, test, config.eps);

  if (f.map_out) {
    std::ofstream file(*f.map_out, std::ios::binary);
    if (!file) throw ConfigError(fmt::format("cannot write '{}'", *f.map_out));
    map->write(file);
  }
  if (f.out) write_dataset(std::filesystem::path(*f.out), calibrated);

  std::vector<report::ReportDocument> docs;
  if (all_labeled(test)) {
    const std::string model = test.front().model.value_or("");
    docs.push_back(report::build_document(to_predictions(test), config, model,
                                          stage_label(test, "before")));
    docs.push_back(report::build_document(to_predictions(calibrated), config, model,
                                          stage_label(test, "after")));
  } else {
    err << "note: evaluation records are unlabeled; skipping the before/after report\n";
  }

  std::vector<AblationRow> ablation;
  if (!f.ablation_sizes.empty()) {
    ablation = calibration_ablation(to_predictions(train), to_predictions(test),
                                    f.ablation_sizes, f.repeats, g.seed, config.bins, config.eps);
  }

  emit(f.output, out, [&](std::ostream& o) {
    if (!docs.empty()) write_documents(o, g, docs);
    if (ablation.empty()) return;
    if (g.format == "machine") {
      for (const AblationRow& row : ablation) {
        Json line = {{"kind", "ablation"},   {"size", row.size},       {"ece_mean", row.ece_mean},
                     {"ece_sd", row.ece_sd}, {"bas_mean", row.bas_mean}, {"bas_sd", row.bas_sd},
                     {"repeats", f.repeats}};
        o << line.dump() << '\n';
      }
      return;
    }
    o << fmt::format("\nCalibration-set size ablation ({} repeats)\n", f.repeats);
    o << fmt::format("{:>8}  {:>16}  {:>14}\n", "Size", "ECE (%)", "BAS");
    for (const AblationRow& row : ablation) {
      o << fmt::format("{:>8}  {:>16}  {:>14}\n", row.size,
                       fmt::format("{:.1f} ± {:.1f}", 100 * row.ece_mean, 100 * row.ece_sd),
                       fmt::format("{:.2f} ± {:.2f}", row.bas_mean, row.bas_sd));
    }
  });
  return 0;
}

bool has_transport_failure(const std::vector<ParseFailure>& failures) {
  return std::any_of(failures.begin(), failures.end(),
                     [](const ParseFailure& f) { return f.reason.starts_with("transport:"); });
}

void write_failures(const std::optional<std::string>& path,
                    const std::vector<ParseFailure>& failures) {
  if (!path) return;
  std::ofstream file(*path, std::ios::binary);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", *path));
  write_parse_failures(file, failures);
}

void write_records(const std::optional<std::string>& path, std::ostream& out,
                   const std::vector<EvalRecord>& records) {
  if (path) write_dataset(std::filesystem::path(*path), records);
  else write_dataset(out, records, FileFormat::kJsonl);
}

int cmd_run(const RunFlags& f, const Environment& env, std::ostream& out, std::ostream& err) {
  const ProviderConfig provider = resolve_provider(f.provider);
  prompts::ElicitationSpec spec;
  spec.method = elicitation_from_string(f.elicitation);
  spec.k = f.k;
  spec.system_template = f.system_template;
  spec.validate();
  if (spec.system_template) prompts::get(*spec.system_template);
  const std::vector<Question> questions = read_questions(f.questions);

  std::unique_ptr<ChatTransport> transport = env.transport_factory(provider);
  RunOptions options;
  if (f.checkpoint) options.checkpoint = std::filesystem::path(*f.checkpoint);
  options.model_label = f.label.value_or("");
  options.sleep = env.sleep;
  const RunResult result = run_eval(questions, spec, provider, *transport, options);

  write_records(f.out, out, result.records);
  std::optional<std::string> failures_path = f.failures;
  if (!failures_path && f.out && !result.failures.empty()) {
    failures_path = std::filesystem::path(*f.out).replace_extension(".failures.jsonl").string();
  }
  write_failures(failures_path, result.failures);
  err << fmt::format("{} questions, {} queried, {} parsed, {} failed{}\n", questions.size(),
                     result.n_queried, result.records.size(), result.failures.size(),
                     failures_path && !result.failures.empty()
                         ? fmt::format(" (see {})", *failures_path)
                         : "");
  if (has_transport_failure(result.failures)) {
    err << "error: some requests failed at the transport level; rerun with the same "
           "--checkpoint to retry them\n";
    return static_cast<int>(ErrorCode::kTransport);
  }
  return 0;
}

int cmd_judge(const JudgeFlags& f, const Environment& env, std::ostream& out, std::ostream& err) {
  JudgeConfig judge;
  judge.provider = resolve_provider(f.provider);
  if (f.prompt_template) {
    std::ifstream in(*f.prompt_template, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", *f.prompt_template));
    judge.prompt_template.assign(std::istreambuf_iterator<char>(in), {});
  }
  const std::vector<EvalRecord> records = load_records(f.records, err).records;
  const auto truth = read_ground_truth(f.gt);
  std::unique_ptr<ChatTransport> transport = env.transport_factory(judge.provider);
  const JudgeResult result = judge_answers(records, truth, judge, *transport, env.sleep);
  write_records(f.out, out, result.records);
  write_failures(f.failures, result.unjudged);
  err << fmt::format("{} records, {} judged, {} left unlabeled\n", records.size(),
                     records.size() - result.unjudged.size(), result.unjudged.size());
  if (has_transport_failure(result.unjudged)) {
    err << "error: some judge requests failed at the transport level\n";
    return static_cast<int>(ErrorCode::kTransport);
  }
  return 0;
}

int cmd_grade(const GradeFlags& f, std::ostream& out, std::ostream& err) {
  const GradeMode mode = grade_mode_from_string(f.mode);
  const std::vector<EvalRecord> records = load_records(f.records, err).records;
  const std::vector<EvalRecord> graded = exact_match_grade(records, read_ground_truth(f.gt), mode);
  write_records(f.out, out, graded);
  const auto correct = std::count_if(graded.begin(), graded.end(),
                                     [](const EvalRecord& r) { return r.is_correct.value_or(false); });
  err << fmt::format("{} records graded, {} correct\n", graded.size(), correct);
  return 0;
}

std::vector<report::ReportDocument> load_reports(const std::vector<std::string>& paths) {
  std::vector<report::ReportDocument> docs;
  for (const std::string& path : paths) {
    for (auto& d : report::read_machine(std::filesystem::path(path))) docs.push_back(std::move(d));
  }
  return docs;
}

int cmd_compare(const CompareFlags& f, const GlobalFlags& g, std::ostream& out) {
  const std::vector<report::ReportDocument> docs = load_reports(f.reports);
  std::vector<MetricReport> reports;
  for (const auto& d : docs) reports.push_back(d.metrics);
  const report::CompareConfig config{f.ece_tolerance, f.bas_gap};
  emit(f.output, out, [&](std::ostream& o) {
    if (g.format != "machine") {
      report::write_comparison(o, reports, config);
      return;
    }
    for (const MetricReport& r : reports) {
      for (const MetricEntry& e : r.entries) {
        Json line = {{"kind", "metric"},         {"model", r.model},
                     {"task", r.task},           {"metric", e.metric},
                     {"value", e.value},         {"uncertainty", e.uncertainty},
                     {"n", e.n},                 {"fingerprint", e.fingerprint},
                     {"dataset_hash", e.dataset_hash}};
        o << line.dump() << '\n';
      }
    }
    for (const report::Divergence& d : report::find_divergences(reports, config)) {
      Json line = {{"kind", "divergence"},
                   {"first", {{"model", reports[d.first].model}, {"task", reports[d.first].task}}},
                   {"second", {{"model", reports[d.second].model}, {"task", reports[d.second].task}}},
                   {"ece_delta", d.ece_delta},
                   {"bas_delta", d.bas_delta}};
      o << line.dump() << '\n';
    }
  });
  return 0;
}

int cmd_plot(const PlotFlags& f, std::ostream& out) {
  const std::vector<report::ReportDocument> docs = load_reports(f.reports);
  for (const auto& path : report::write_plot_data(f.out_dir, docs, f.gnuplot)) {
    out << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, const Environment& env_in) {
  Environment env = env_in;
  std::ostream& out = env.out ? *env.out : std::cout;
  std::ostream& err = env.err ? *env.err : std::cerr;
  if (!env.transport_factory) env.transport_factory = make_http_transport;

  CLI::App app{"Behavioral Alignment Score evaluation toolkit", "bas"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--seed", g.seed, "Seed for bootstrap, splits and ablations");
  app.add_option("--format", g.format, "Report format")
      ->check(CLI::IsMember({"table", "machine"}));
  app.add_option("--eps", g.eps, "Confidence clip epsilon");

  EvalFlags eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score prediction records");
  eval_cmd->add_option("inputs", eval.inputs, "Record files (.jsonl or .csv)")->required();
  add_metric_flags(eval_cmd, eval.metric);
  eval_cmd->add_option("--model", eval.model, "Model label for records without one");
  eval_cmd->add_option("--task", eval.task, "Task label for records without one");
  eval_cmd->add_option("--parse-failures", eval.parse_failures,
                       "Parse-failure log; its size feeds parse_failure_rate");
  eval_cmd->add_option("-o,--output", eval.output, "Write the report here instead of stdout");

  CalibrateFlags cal;
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Fit and apply isotonic calibration");
  cal_cmd->add_option("--train", cal.train, "Labeled records to fit on");
  cal_cmd->add_option("--apply", cal.apply, "Records to recalibrate and score");
  cal_cmd->add_option("--input", cal.input, "Single labeled file to split");
  cal_cmd->add_option("--split", cal.split, "Split mode for --input (auto)");
  cal_cmd->add_option("--calibration-size", cal.calibration_size,
                      "Records on the fitting side of an auto split");
  cal_cmd->add_option("--out", cal.out, "Write recalibrated records here");
  cal_cmd->add_option("--map-out", cal.map_out, "Write the fitted map here");
  cal_cmd->add_option("--map-in", cal.map_in, "Apply a saved map instead of fitting");
  cal_cmd->add_option("--ablation-sizes", cal.ablation_sizes,
                      "Calibration-set sizes for the ablation table")
      ->delimiter(',');
  cal_cmd->add_option("--repeats", cal.repeats, "Subsamples per ablation size")
      ->check(CLI::PositiveNumber);
  cal_cmd->add_option("-o,--output", cal.output, "Write the report here instead of stdout");
  add_metric_flags(cal_cmd, cal.metric);

  RunFlags runf;
  CLI::App* run_cmd = app.add_subcommand("run", "Query a chat endpoint for answers and confidences");
  run_cmd->add_option("--questions", runf.questions, "JSONL with id and question")->required();
  run_cmd->add_option("--elicitation", runf.elicitation, "Elicitation method")
      ->check(CLI::IsMember({"direct", "self_reflection", "top_k", "top_k_reflection"}));
  run_cmd->add_option("--k", runf.k, "Candidates for top-k methods");
  run_cmd->add_option("--system-template", runf.system_template,
                      "Built-in template replacing the step-1 system prompt");
  run_cmd->add_option("--checkpoint", runf.checkpoint, "Resumable JSONL checkpoint");
  run_cmd->add_option("--label", runf.label, "Model label written to records");
  run_cmd->add_option("--out", runf.out, "Records file (default stdout)");
  run_cmd->add_option("--failures", runf.failures, "Parse-failure log");
  add_provider_flags(run_cmd, runf.provider);

  JudgeFlags judgef;
  CLI::App* judge_cmd = app.add_subcommand("judge", "Label answers with an LLM judge");
  judge_cmd->add_option("--records", judgef.records)->required();
  judge_cmd->add_option("--gt", judgef.gt, "JSONL with id and answer")->required();
  judge_cmd->add_option("--prompt-template", judgef.prompt_template,
                        "Judge template file with {question}, {gt}, {model_ans}");
  judge_cmd->add_option("--out", judgef.out, "Labeled records (default stdout)");
  judge_cmd->add_option("--failures", judgef.failures, "Log of records left unlabeled");
  add_provider_flags(judge_cmd, judgef.provider);

  GradeFlags grade;
  CLI::App* grade_cmd = app.add_subcommand("grade", "Label answers by exact match");
  grade_cmd->add_option("--records", grade.records)->required();
  grade_cmd->add_option("--gt", grade.gt, "JSONL with id and answer")->required();
  grade_cmd->add_option("--mode", grade.mode)
      ->check(CLI::IsMember({"numeric", "letter", "exact"}));
  grade_cmd->add_option("--out", grade.out, "Labeled records (default stdout)");

  CompareFlags cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Compare machine-format reports");
  cmp_cmd->add_option("reports", cmp.reports, "Report files from `eval --format machine`")
      ->required();
  cmp_cmd->add_option("--ece-tolerance", cmp.ece_tolerance, "ECE gap treated as similar");
  cmp_cmd->add_option("--bas-gap", cmp.bas_gap, "BAS gap treated as divergent");
  cmp_cmd->add_option("-o,--output", cmp.output);

  PlotFlags plot;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Write plot data from machine-format reports");
  plot_cmd->add_option("reports", plot.reports)->required();
  plot_cmd->add_option("--out-dir", plot.out_dir)->required();
  plot_cmd->add_flag("--gnuplot", plot.gnuplot, "Also write a gnuplot script");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::kConfig);
  }

  try {
    if (*eval_cmd) return cmd_eval(eval, g, out, err);
    if (*cal_cmd) return cmd_calibrate(cal, g, out, err);
    if (*run_cmd) return cmd_run(runf, env, out, err);
    if (*judge_cmd) return cmd_judge(judgef, env, out, err);
    if (*grade_cmd) return cmd_grade(grade, out, err);
    if (*cmp_cmd) return cmd_compare(cmp, g, out);
    if (*plot_cmd) return cmd_plot(plot, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorCode::kData);
  }
  return static_cast<int>(ErrorCode::kConfig);
}

}  // namespace bas::cli
