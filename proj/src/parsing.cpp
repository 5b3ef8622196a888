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
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <regex>

#include <fmt/format.h>

#include "bas/error.hpp"
#include "bas/records.hpp"

namespace bas {
namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::vector<std::string> split_lines(std::string_view raw) {
  std::vector<std::string> lines;
  std::size_t begin = 0;
  while (begin <= raw.size()) {
    const auto end = raw.find('\n', begin);
    std::string_view line = raw.substr(begin, end == std::string_view::npos ? raw.size() - begin
                                                                            : end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return lines;
}

// "### FINAL DECISION", tolerating other heading depths, bold markers and
// letter case.
bool is_marker(std::string_view line) {
  std::string_view text = trim(line);
  const auto decoration = [](char c) { return c == '#' || c == '*' || c == ' ' || c == '\t'; };
  while (!text.empty() && decoration(text.front())) text.remove_prefix(1);
  while (!text.empty() && decoration(text.back())) text.remove_suffix(1);
  if (text.size() != std::string_view("FINAL DECISION").size()) return false;
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return upper == "FINAL DECISION";
}

// Index just past the last marker line, if any.
std::optional<std::size_t> after_last_marker(const std::vector<std::string>& lines) {
  for (std::size_t i = lines.size(); i-- > 0;) {
    if (is_marker(lines[i])) return i + 1;
  }
  return std::nullopt;
}

// `Key: value` with optional markdown emphasis around the key or value.
std::optional<std::string> keyed_value(const std::string& line, const std::regex& pattern) {
  std::smatch match;
  if (!std::regex_match(line, match, pattern)) return std::nullopt;
  return std::string(trim(match[1].str()));
}

const std::regex& answer_line() {
  static const std::regex kPattern(R"(^\s*[*_]*\s*answer\s*[*_]*\s*:\s*[*_]*(.*?)[*_]*\s*$)",
                                   std::regex::icase);
  return kPattern;
}

const std::regex& confidence_line() {
  static const std::regex kPattern(
      R"(^\s*[*_]*\s*confidence\s*[*_]*\s*:\s*[*_]*(.*?)[*_]*\s*$)", std::regex::icase);
  return kPattern;
}

const std::regex& topk_line() {
  static const std::regex kPattern(
      R"(^\s*(\d+)\s*[.)]\s*[*_]*answer[*_]*\s*:\s*(.*)\s*,\s*[*_]*confidence[*_]*\s*:\s*(.*?)\s*$)",
      std::regex::icase);
  return kPattern;
}

const std::regex& numbered_line() {
  static const std::regex kPattern(R"(^\s*(\d+)\s*[.)]\s*(.*?)\s*$)");
  return kPattern;
}

std::string strip_answer_prefix(std::string_view text) {
  const std::string line(text);
  if (auto value = keyed_value(line, answer_line())) return *value;
  return std::string(trim(text));
}

}  // namespace

std::optional<double> parse_confidence_text(std::string_view text) {
  std::string_view body = trim(text);
  bool percent = false;
  if (!body.empty() && body.back() == '%') {
    percent = true;
    body = trim(body.substr(0, body.size() - 1));
  }
  if (body.empty()) return std::nullopt;
  std::string number(body);
  if (number.front() == '.') number.insert(number.begin(), '0');
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (ec != std::errc() || ptr != number.data() + number.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  if (percent) value /= 100.0;
  if (value < 0.0 || value > 1.0) return std::nullopt;
  return value;
}

FinalDecision parse_final_decision(std::string_view raw) {
  const std::vector<std::string> lines = split_lines(raw);
  const auto start = after_last_marker(lines);
  if (!start) throw ParseError("missing '### FINAL DECISION' marker", std::string(raw));
  std::optional<std::string> answer;
  std::optional<std::string> confidence;
  for (std::size_t i = *start; i < lines.size(); ++i) {
    if (!answer) {
      if ((answer = keyed_value(lines[i], answer_line()))) continue;
    }
    if (!confidence) confidence = keyed_value(lines[i], confidence_line());
  }
  if (!answer) throw ParseError("missing 'Answer:' line after marker", std::string(raw));
  if (answer->empty()) throw ParseError("empty answer", std::string(raw));
  if (!confidence) throw ParseError("missing 'Confidence:' line after marker", std::string(raw));
  const auto value = parse_confidence_text(*confidence);
  if (!value) {
    throw ParseError(fmt::format("unparseable confidence '{}'", *confidence), std::string(raw));
  }
  return {*answer, *value};
}

TopKResult parse_topk(std::string_view raw, int k) {
  if (k < 1) throw ConfigError("top-k parsing needs k >= 1");
  const std::vector<std::string> lines = split_lines(raw);
  const auto start = after_last_marker(lines);
  if (!start) throw ParseError("missing '### FINAL DECISION' marker", std::string(raw));
  TopKResult result;
  for (std::size_t i = *start; i < lines.size(); ++i) {
    std::smatch match;
    if (!std::regex_match(lines[i], match, topk_line())) continue;
    const auto probability = parse_confidence_text(match[3].str());
    if (!probability) {
      throw ParseError(fmt::format("unparseable candidate confidence '{}'", match[3].str()),
                       std::string(raw));
    }
    TopKCandidate candidate;
    candidate.rank = std::stoi(match[1].str());
    candidate.answer = std::string(trim(match[2].str()));
    candidate.probability = *probability;
    result.all.push_back(std::move(candidate));
  }
  if (result.all.empty()) throw ParseError("no parseable top-k candidates", std::string(raw));
  if (result.all.size() > static_cast<std::size_t>(k)) {
    throw ParseError(fmt::format("{} candidates listed, expected at most {}", result.all.size(), k),
                     std::string(raw));
  }
  double sum = 0.0;
  for (const TopKCandidate& c : result.all) sum += c.probability;
  if (!(std::abs(sum - 1.0) <= kTopKSumTolerance)) {
    throw ParseError(fmt::format("candidate confidences sum to {:.4g}, not 1", sum),
                     std::string(raw));
  }
  for (TopKCandidate& c : result.all) c.probability /= sum;
  result.chosen = result.all.front();
  for (const TopKCandidate& c : result.all) {
    if (c.probability > result.chosen.probability ||
        (c.probability == result.chosen.probability && c.rank < result.chosen.rank)) {
      result.chosen = c;
    }
  }
  return result;
}

double parse_reflection_confidence(std::string_view raw) {
  const std::vector<std::string> lines = split_lines(raw);
  for (std::size_t i = lines.size(); i-- > 0;) {
    const auto text = keyed_value(lines[i], confidence_line());
    if (!text) continue;
    const auto value = parse_confidence_text(*text);
    if (!value) {
      throw ParseError(fmt::format("unparseable confidence '{}'", *text), std::string(raw));
    }
    return *value;
  }
  throw ParseError("missing 'Confidence:' line", std::string(raw));
}

std::vector<std::string> parse_candidate_list(std::string_view raw, int k) {
  if (k < 1) throw ConfigError("candidate parsing needs k >= 1");
  const std::vector<std::string> lines = split_lines(raw);
  std::vector<std::string> numbered;
  std::vector<std::string> plain;
  for (const std::string& line : lines) {
    std::smatch match;
    if (std::regex_match(line, match, numbered_line())) {
      const std::string answer = strip_answer_prefix(match[2].str());
      if (!answer.empty()) numbered.push_back(answer);
    } else if (!trim(line).empty()) {
      plain.push_back(strip_answer_prefix(line));
    }
  }
  std::vector<std::string> candidates = numbered.empty() ? plain : numbered;
  if (candidates.empty()) throw ParseError("no candidate answers", std::string(raw));
  if (candidates.size() > static_cast<std::size_t>(k)) candidates.resize(k);
  return candidates;
}

std::string parse_short_answer(std::string_view raw) {
  const std::vector<std::string> lines = split_lines(raw);
  for (std::size_t i = lines.size(); i-- > 0;) {
    if (trim(lines[i]).empty()) continue;
    std::string answer = strip_answer_prefix(lines[i]);
    if (answer.empty()) break;
    return answer;
  }
  throw ParseError("empty answer", std::string(raw));
}

ParseFailure make_parse_failure(std::string id, std::string reason, std::string_view raw) {
  std::size_t code_points = 0;
  std::size_t cut = raw.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto byte = static_cast<unsigned char>(raw[i]);
    if ((byte & 0xC0) != 0x80) {
      if (code_points == kRawExcerptLength) {
        cut = i;
        break;
      }
      ++code_points;
    }
  }
  return {std::move(id), std::move(reason), std::string(raw.substr(0, cut))};
}

void write_parse_failures(std::ostream& out, std::span<const ParseFailure> failures) {
  for (const ParseFailure& f : failures) {
    Json line = Json::object();
    line["id"] = f.id;
    line["reason"] = f.reason;
    line["raw_excerpt"] = f.raw_excerpt;
    out << line.dump(-1, ' ', false, Json::error_handler_t::replace) << '\n';
  }
}

std::vector<ParseFailure> read_parse_failures(std::istream& in) {
  std::vector<ParseFailure> failures;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    try {
      const Json object = Json::parse(text);
      failures.push_back({object.at("id").get<std::string>(),
                          object.at("reason").get<std::string>(),
                          object.value("raw_excerpt", std::string())});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("parse-failure log line {}: {}", line, e.what()));
    }
  }
  return failures;
}

}  // namespace bas
