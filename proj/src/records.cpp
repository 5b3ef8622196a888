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

#include "bas/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "bas/error.hpp"

namespace bas {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kKnownFields[] = {
    "id",          "model",        "task",          "question",     "answer",
    "confidence",  "is_correct",   "raw_response",  "elicitation",  "judge_verdict"};

bool is_known_field(std::string_view name) {
  return std::find(std::begin(kKnownFields), std::end(kKnownFields), name) !=
         std::end(kKnownFields);
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<double> parse_decimal(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

std::optional<Verdict> verdict_from_string(std::string_view text) {
  if (text == "CORRECT") return Verdict::kCorrect;
  if (text == "INCORRECT") return Verdict::kIncorrect;
  return std::nullopt;
}

// Outcome of converting one source row.
struct RowResult {
  std::optional<EvalRecord> record;
  std::optional<ValidationIssue> issue;
};

std::string require_string(const Json& value, std::string_view field, std::size_t line) {
  if (!value.is_string()) {
    throw DataError(fmt::format("line {}: field '{}' must be a string", line, field));
  }
  return value.get<std::string>();
}

RowResult convert_row(const Json& object, std::size_t line) {
  if (!object.is_object()) {
    throw DataError(fmt::format("line {}: expected a JSON object", line));
  }
  if (!object.contains("id")) throw DataError(fmt::format("line {}: missing 'id'", line));
  if (!object.contains("confidence")) {
    throw DataError(fmt::format("line {}: missing 'confidence'", line));
  }
  EvalRecord record;
  record.line = line;
  record.id = require_string(object["id"], "id", line);
  RowResult result;
  const auto reject = [&](std::string reason) {
    result.issue = ValidationIssue{line, record.id, std::move(reason)};
    return result;
  };

  for (const auto& [key, value] : object.items()) {
    if (key == "id") continue;
    if (key == "confidence") {
      if (!value.is_number()) return reject("confidence is not a number");
      record.confidence = value.get<double>();
      if (!std::isfinite(record.confidence) || record.confidence < 0.0 ||
          record.confidence > 1.0) {
        return reject(fmt::format("confidence {} is outside [0, 1]", record.confidence));
      }
    } else if (key == "is_correct") {
      if (value.is_null()) continue;
      if (value.is_boolean()) {
        record.is_correct = value.get<bool>();
      } else if (value.is_number() &&
                 (value.get<double>() == 0.0 || value.get<double>() == 1.0)) {
        record.is_correct = value.get<double>() == 1.0;
      } else {
        return reject("is_correct must be 0/1 or a boolean (graded correctness is not supported)");
      }
    } else if (key == "model") {
      record.model = require_string(value, key, line);
    } else if (key == "task") {
      record.task = require_string(value, key, line);
    } else if (key == "question") {
      record.question = require_string(value, key, line);
    } else if (key == "answer") {
      record.answer = require_string(value, key, line);
    } else if (key == "raw_response") {
      record.raw_response = require_string(value, key, line);
    } else if (key == "elicitation") {
      try {
        record.elicitation = elicitation_from_string(require_string(value, key, line));
      } catch (const ConfigError& e) {
        throw DataError(fmt::format("line {}: {}", line, e.what()));
      }
    } else if (key == "judge_verdict") {
      const auto verdict = verdict_from_string(require_string(value, key, line));
      if (!verdict) {
        throw DataError(fmt::format("line {}: judge_verdict must be CORRECT or INCORRECT", line));
      }
      record.judge_verdict = verdict;
    } else {
      record.extra[key] = value;
    }
  }
  result.record = std::move(record);
  return result;
}

// RFC 4180 rows; `lines` receives the 1-based line each row starts on.
std::vector<std::vector<std::string>> read_csv_rows(std::istream& in,
                                                    std::vector<std::size_t>& lines) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;
  char c = 0;
  const auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row.front().empty();
    if (!blank) {
      rows.push_back(std::move(row));
      lines.push_back(row_line);
    }
    row.clear();
  };
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
      row_line = line;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (in_quotes) throw DataError(fmt::format("line {}: unterminated quoted CSV field", row_line));
  if (!field.empty() || !row.empty()) end_row();
  return rows;
}

std::string csv_escape(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

Json csv_row_to_json(const std::vector<std::string>& header,
                     const std::vector<std::string>& cells, std::size_t line,
                     std::optional<ValidationIssue>& issue) {
  Json object = Json::object();
  std::string id;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "id") id = cells[i];
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    const std::string& cell = cells[i];
    if (name == "id") {
      object[name] = cell;
    } else if (name == "confidence") {
      const auto value = parse_decimal(cell);
      if (!value) {
        issue = ValidationIssue{line, id, fmt::format("confidence '{}' is not a number", cell)};
        return object;
      }
      object[name] = *value;
    } else if (cell.empty()) {
      continue;
    } else if (name == "is_correct") {
      const std::string lowered = lowercase(cell);
      if (lowered == "true" || lowered == "1") {
        object[name] = true;
      } else if (lowered == "false" || lowered == "0") {
        object[name] = false;
      } else {
        issue = ValidationIssue{line, id, fmt::format("is_correct '{}' is not binary", cell)};
        return object;
      }
    } else {
      object[name] = cell;
    }
  }
  return object;
}

std::string csv_cell(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace

bool operator==(const EvalRecord& a, const EvalRecord& b) {
  return a.id == b.id && a.model == b.model && a.task == b.task &&
         a.question == b.question && a.answer == b.answer &&
         a.confidence == b.confidence && a.is_correct == b.is_correct &&
         a.raw_response == b.raw_response && a.elicitation == b.elicitation &&
         a.judge_verdict == b.judge_verdict && a.extra == b.extra;
}

std::string_view to_string(Elicitation method) {
  switch (method) {
    case Elicitation::kDirect:
      return "direct";
    case Elicitation::kSelfReflection:
      return "self_reflection";
    case Elicitation::kTopK:
      return "top_k";
    case Elicitation::kTopKReflection:
      return "top_k_reflection";
  }
  return "direct";
}

Elicitation elicitation_from_string(std::string_view text) {
  if (text == "direct") return Elicitation::kDirect;
  if (text == "self_reflection") return Elicitation::kSelfReflection;
  if (text == "top_k") return Elicitation::kTopK;
  if (text == "top_k_reflection") return Elicitation::kTopKReflection;
  throw ConfigError(fmt::format(
      "unknown elicitation method '{}' (expected direct, self_reflection, top_k or "
      "top_k_reflection)",
      text));
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kCorrect ? "CORRECT" : "INCORRECT";
}

FileFormat format_for_path(const std::filesystem::path& path) {
  return lowercase(path.extension().string()) == ".csv" ? FileFormat::kCsv
                                                         : FileFormat::kJsonl;
}

Dataset read_dataset(std::istream& in, FileFormat format) {
  Dataset dataset;
  std::set<std::string> seen;
  const auto accept = [&](RowResult row, std::size_t line) {
    const std::string& id = row.record ? row.record->id : row.issue->id;
    if (!seen.insert(id).second) {
      throw DataError(fmt::format("line {}: duplicate id '{}'", line, id));
    }
    if (row.record) dataset.records.push_back(std::move(*row.record));
    if (row.issue) dataset.issues.push_back(std::move(*row.issue));
  };

  if (format == FileFormat::kJsonl) {
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      Json object;
      try {
        object = Json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw DataError(fmt::format("line {}: malformed JSON: {}", line, e.what()));
      }
      accept(convert_row(object, line), line);
    }
    return dataset;
  }

  std::vector<std::size_t> lines;
  const auto rows = read_csv_rows(in, lines);
  if (rows.empty()) return dataset;
  const std::vector<std::string>& header = rows.front();
  for (std::string_view required : {"id", "confidence"}) {
    if (std::find(header.begin(), header.end(), required) == header.end()) {
      throw DataError(fmt::format("CSV header lacks required column '{}'", required));
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw DataError(fmt::format("line {}: expected {} CSV fields, found {}", lines[r],
                                  header.size(), rows[r].size()));
    }
    std::optional<ValidationIssue> issue;
    Json object = csv_row_to_json(header, rows[r], lines[r], issue);
    if (issue) {
      accept(RowResult{std::nullopt, std::move(issue)}, lines[r]);
      continue;
    }
    accept(convert_row(object, lines[r]), lines[r]);
  }
  return dataset;
}

Dataset read_dataset(const std::filesystem::path& path, std::optional<FileFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return read_dataset(in, format.value_or(format_for_path(path)));
}

EvalRecord record_from_json(const nlohmann::ordered_json& object, std::size_t line) {
  RowResult row = convert_row(object, line);
  if (row.issue) {
    throw DataError(fmt::format("line {}: record '{}': {}", line, row.issue->id, row.issue->reason));
  }
  return std::move(*row.record);
}

nlohmann::ordered_json record_to_json(const EvalRecord& record) {
  Json object = Json::object();
  object["id"] = record.id;
  if (record.model) object["model"] = *record.model;
  if (record.task) object["task"] = *record.task;
  if (record.question) object["question"] = *record.question;
  if (record.answer) object["answer"] = *record.answer;
  object["confidence"] = record.confidence;
  if (record.is_correct) object["is_correct"] = *record.is_correct;
  if (record.raw_response) object["raw_response"] = *record.raw_response;
  if (record.elicitation) object["elicitation"] = to_string(*record.elicitation);
  if (record.judge_verdict) object["judge_verdict"] = to_string(*record.judge_verdict);
  for (const auto& [key, value] : record.extra.items()) object[key] = value;
  return object;
}

void write_dataset(std::ostream& out, std::span<const EvalRecord> records,
                   FileFormat format) {
  if (format == FileFormat::kJsonl) {
    for (const EvalRecord& record : records) out << record_to_json(record).dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
    return;
  }
  std::vector<Json> objects;
  std::vector<std::string> columns;
  for (const EvalRecord& record : records) objects.push_back(record_to_json(record));
  for (std::string_view known : kKnownFields) {
    for (const Json& object : objects) {
      if (object.contains(known)) {
        columns.emplace_back(known);
        break;
      }
    }
  }
  if (columns.empty()) columns = {"id", "confidence"};
  for (const Json& object : objects) {
    for (const auto& [key, value] : object.items()) {
      if (!is_known_field(key) &&
          std::find(columns.begin(), columns.end(), key) == columns.end()) {
        columns.push_back(key);
      }
    }
  }
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out << (i ? "," : "") << csv_escape(columns[i]);
  }
  out << '\n';
  for (const Json& object : objects) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out << ',';
      if (!object.contains(columns[i])) continue;
      const Json& value = object[columns[i]];
      if (columns[i] == "confidence") {
        out << fmt::format("{}", value.get<double>());
      } else {
        out << csv_escape(csv_cell(value));
      }
    }
    out << '\n';
  }
}

void write_dataset(const std::filesystem::path& path, std::span<const EvalRecord> records,
                   std::optional<FileFormat> format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  write_dataset(out, records, format.value_or(format_for_path(path)));
}

std::vector<Prediction> to_predictions(std::span<const EvalRecord> records) {
  std::vector<Prediction> out;
  out.reserve(records.size());
  std::vector<std::string> unlabeled;
  for (const EvalRecord& record : records) {
    if (!record.is_correct) {
      unlabeled.push_back(record.id);
      continue;
    }
    out.emplace_back(record.confidence, *record.is_correct);
  }
  if (!unlabeled.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < std::min<std::size_t>(unlabeled.size(), 5); ++i) {
      listed += (i ? ", " : "") + unlabeled[i];
    }
    throw DataError(fmt::format(
        "{} record(s) lack is_correct (e.g. {}); label them first with `bas judge` "
        "(LLM judge) or `bas grade` (exact match)",
        unlabeled.size(), listed));
  }
  return out;
}

}  // namespace bas
