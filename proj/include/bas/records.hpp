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

#ifndef BAS_RECORDS_HPP_
#define BAS_RECORDS_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bas/types.hpp"

namespace bas {

enum class Elicitation { kDirect, kSelfReflection, kTopK, kTopKReflection };

std::string_view to_string(Elicitation method);
// Accepts direct, self_reflection, top_k, top_k_reflection.
Elicitation elicitation_from_string(std::string_view text);

enum class Verdict { kCorrect, kIncorrect };

std::string_view to_string(Verdict verdict);

// One model prediction. `confidence` is finite and in [0, 1] for every
// record a reader returns; metrics additionally need `is_correct`.
struct EvalRecord {
  std::string id;
  std::optional<std::string> model;
  std::optional<std::string> task;
  std::optional<std::string> question;
  std::optional<std::string> answer;
  double confidence = 0.0;
  std::optional<bool> is_correct;
  std::optional<std::string> raw_response;
  std::optional<Elicitation> elicitation;
  std::optional<Verdict> judge_verdict;
  // Fields this schema does not know, kept in their original order.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  // 1-based source line (0 when not read from a file). Not compared.
  std::size_t line = 0;

  friend bool operator==(const EvalRecord& a, const EvalRecord& b);
};

// A record the reader refused, with the reason. The run continues without it.
struct ValidationIssue {
  std::size_t line = 0;
  std::string id;
  std::string reason;
};

struct Dataset {
  std::vector<EvalRecord> records;
  std::vector<ValidationIssue> issues;
};

enum class FileFormat { kJsonl, kCsv };

// .csv -> kCsv, anything else -> kJsonl.
FileFormat format_for_path(const std::filesystem::path& path);

// Structural problems (bad JSON, missing id/confidence, duplicate id, ragged
// CSV row) throw DataError with the line number. Out-of-range or
// non-numeric confidences and non-binary labels become ValidationIssues.
Dataset read_dataset(std::istream& in, FileFormat format);
Dataset read_dataset(const std::filesystem::path& path,
                     std::optional<FileFormat> format = std::nullopt);

void write_dataset(std::ostream& out, std::span<const EvalRecord> records,
                   FileFormat format);
void write_dataset(const std::filesystem::path& path,
                   std::span<const EvalRecord> records,
                   std::optional<FileFormat> format = std::nullopt);

nlohmann::ordered_json record_to_json(const EvalRecord& record);
// Inverse of record_to_json. Any problem, including an invalid confidence,
// throws DataError.
EvalRecord record_from_json(const nlohmann::ordered_json& object, std::size_t line = 0);

// (confidence, is_correct) pairs. Throws DataError listing unlabeled ids.
std::vector<Prediction> to_predictions(std::span<const EvalRecord> records);

// Response parsing.

// Plain decimals ("0.85"), leading-dot decimals (".85") and percentages
// ("85%", divided by 100). The value must land in [0, 1].
std::optional<double> parse_confidence_text(std::string_view text);

struct FinalDecision {
  std::string answer;
  double confidence = 0.0;
};

// Reads the `Answer:` and `Confidence:` lines after the last
// "### FINAL DECISION" marker. Throws ParseError.
FinalDecision parse_final_decision(std::string_view raw);

struct TopKCandidate {
  int rank = 0;
  std::string answer;
  double probability = 0.0;
};

struct TopKResult {
  TopKCandidate chosen;
  std::vector<TopKCandidate> all;
};

// Parses `N. Answer: <text>, Confidence: <p>` lines after the last marker.
// Probabilities summing to within 0.05 of 1 are renormalized; the chosen
// candidate has the highest probability, ties going to the lowest rank.
// Throws ParseError for no candidates, more than k candidates, or a sum
// outside tolerance.
TopKResult parse_topk(std::string_view raw, int k);

inline constexpr double kTopKSumTolerance = 0.05;

// The number on the last `Confidence:` line. Throws ParseError.
double parse_reflection_confidence(std::string_view raw);

// Candidate answers from a step-1 top-k reflection response: numbered lines
// ("1. Paris") when present, otherwise non-empty lines. At most k are kept.
// Throws ParseError when nothing usable is found.
std::vector<std::string> parse_candidate_list(std::string_view raw, int k);

// Short answer from a free-form step-1 response: the last non-empty line,
// with an optional "Answer:" prefix removed. Throws ParseError when empty.
std::string parse_short_answer(std::string_view raw);

// Line-delimited log entry for a response that could not be used.
struct ParseFailure {
  std::string id;
  std::string reason;
  std::string raw_excerpt;

  friend bool operator==(const ParseFailure&, const ParseFailure&) = default;
};

inline constexpr std::size_t kRawExcerptLength = 200;

// Keeps the first 200 characters (UTF-8 code points) of `raw`.
ParseFailure make_parse_failure(std::string id, std::string reason,
                                std::string_view raw);

void write_parse_failures(std::ostream& out, std::span<const ParseFailure> failures);
std::vector<ParseFailure> read_parse_failures(std::istream& in);

}  // namespace bas

#endif  // BAS_RECORDS_HPP_
