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

#include "bas/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <regex>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "bas/error.hpp"

namespace bas {
namespace {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::string dump(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

void default_sleep(std::chrono::milliseconds wait) { std::this_thread::sleep_for(wait); }

// One question's outcome. `transport_error` entries are never checkpointed.
struct Outcome {
  CheckpointStore::Entry entry;
  bool transport_error = false;
};

Outcome run_question(const Question& q, const prompts::ElicitationSpec& spec,
                     const ProviderConfig& provider, ChatTransport& transport,
                     const std::string& model_label, const Sleeper& sleep) {
  Outcome outcome;
  outcome.entry.id = q.id;
  std::vector<std::string>& raws = outcome.entry.raw_responses;
  const auto call = [&](const prompts::RenderedPrompt& prompt) {
    ChatRequest request{provider.model, prompt.system, prompt.user, provider.temperature};
    raws.push_back(complete_with_retry(transport, request, provider.retry, sleep));
    return raws.back();
  };

  EvalRecord record;
  record.id = q.id;
  record.model = model_label;
  record.task = q.task;
  record.question = q.question;
  record.elicitation = spec.method;
  try {
    const std::string first = call(prompts::render_prompt(spec, q.question, 1));
    switch (spec.method) {
      case Elicitation::kDirect: {
        const FinalDecision decision = parse_final_decision(first);
        record.answer = decision.answer;
        record.confidence = decision.confidence;
        break;
      }
      case Elicitation::kTopK: {
        const TopKResult parsed = parse_topk(first, spec.k);
        record.answer = parsed.chosen.answer;
        record.confidence = parsed.chosen.probability;
        Json candidates = Json::array();
        for (const TopKCandidate& c : parsed.all) {
          candidates.push_back({{"rank", c.rank}, {"answer", c.answer}, {"probability", c.probability}});
        }
        record.extra["top_k_candidates"] = std::move(candidates);
        break;
      }
      case Elicitation::kSelfReflection: {
        const std::string answer = parse_short_answer(first);
        const std::string second = call(prompts::render_prompt(spec, q.question, 2, answer));
        record.answer = answer;
        record.confidence = parse_reflection_confidence(second);
        break;
      }
      case Elicitation::kTopKReflection: {
        const std::vector<std::string> candidates = parse_candidate_list(first, spec.k);
        const std::string second = call(prompts::render_prompt(
            spec, q.question, 2, prompts::numbered_list(candidates)));
        const TopKResult parsed = parse_topk(second, spec.k);
        record.answer = parsed.chosen.answer;
        record.confidence = parsed.chosen.probability;
        break;
      }
    }
  } catch (const ParseError& e) {
    outcome.entry.failure = make_parse_failure(q.id, e.reason(), e.raw());
    return outcome;
  } catch (const TransportError& e) {
    outcome.entry.failure = make_parse_failure(q.id, fmt::format("transport: {}", e.what()),
                                               raws.empty() ? "" : raws.back());
    outcome.transport_error = true;
    return outcome;
  }
  record.raw_response = raws.back();
  if (raws.size() > 1) record.extra["raw_responses"] = raws;
  outcome.entry.record = std::move(record);
  return outcome;
}

std::optional<double> parse_number(std::string_view text) {
  std::string_view body = trim(text);
  if (!body.empty() && body.back() == '.') body.remove_suffix(1);
  if (body.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<char> parse_letter(std::string_view text) {
  static const std::regex kLetter(R"(^\(?([A-Da-d])\)?(?:[.):\s].*)?$)");
  const std::string body(trim(text));
  std::smatch match;
  if (!std::regex_match(body, match, kLetter)) return std::nullopt;
  return static_cast<char>(std::toupper(static_cast<unsigned char>(match[1].str()[0])));
}

Json read_json_line(const std::string& text, std::size_t line, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("{} line {}: malformed JSON: {}", source, line, e.what()));
  }
}

}  // namespace

void ProviderConfig::validate() const {
  if (model.empty()) throw ConfigError("provider model name is required (--model)");
  if (base_url.empty()) throw ConfigError("provider base URL is required");
  if (max_concurrent < 1) throw ConfigError("max_concurrent must be at least 1");
  if (timeout_ms < 1) throw ConfigError("timeout_ms must be positive");
  if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be at least 1");
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw ConfigError("temperature must be a non-negative number");
  }
}

ProviderConfig load_provider_config(const std::filesystem::path& path, ProviderConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open provider config '{}'", path.string()));
  try {
    const Json config = Json::parse(in);
    base.base_url = config.value("base_url", base.base_url);
    base.api_key_env = config.value("api_key_env", base.api_key_env);
    base.model = config.value("model", base.model);
    base.temperature = config.value("temperature", base.temperature);
    base.max_concurrent = config.value("max_concurrent", base.max_concurrent);
    base.timeout_ms = config.value("timeout_ms", base.timeout_ms);
    if (config.contains("retry")) {
      const Json& retry = config["retry"];
      base.retry.max_attempts = retry.value("max_attempts", base.retry.max_attempts);
      base.retry.initial_backoff = std::chrono::milliseconds(retry.value(
          "initial_backoff_ms", static_cast<std::int64_t>(base.retry.initial_backoff.count())));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("provider config '{}': {}", path.string(), e.what()));
  }
  return base;
}

std::string request_payload(const ChatRequest& request) {
  Json payload = Json::object();
  payload["model"] = request.model;
  payload["messages"] = Json::array({
      Json{{"role", "system"}, {"content", request.system}},
      Json{{"role", "user"}, {"content", request.user}},
  });
  payload["temperature"] = request.temperature;
  return dump(payload);
}

std::string response_content(std::string_view body) {
  try {
    const Json response = Json::parse(body);
    return response.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("unexpected chat-completions response: {}", e.what()));
  }
}

std::string complete_with_retry(ChatTransport& transport, const ChatRequest& request,
                                const RetryPolicy& policy, const Sleeper& sleep) {
  std::chrono::milliseconds wait = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return transport.complete(request);
    } catch (const TransportError&) {
      if (attempt >= policy.max_attempts) throw;
    }
    (sleep ? sleep : Sleeper(default_sleep))(wait);
    wait *= 2;
  }
}

void bounded_parallel_for(std::size_t n, int max_concurrent,
                          const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, max_concurrent)));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = n;
  std::exception_ptr error;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (i < error_index) {
              error_index = i;
              error = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<Question> read_questions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open questions file '{}'", path.string()));
  std::vector<Question> questions;
  std::set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    const Json object = read_json_line(text, line, path.string());
    try {
      Question q;
      q.id = object.at("id").get<std::string>();
      q.question = object.at("question").get<std::string>();
      if (object.contains("answer")) q.reference = object["answer"].get<std::string>();
      else if (object.contains("gt")) q.reference = object["gt"].get<std::string>();
      if (object.contains("task")) q.task = object["task"].get<std::string>();
      if (!ids.insert(q.id).second) {
        throw DataError(fmt::format("{} line {}: duplicate id '{}'", path.string(), line, q.id));
      }
      questions.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("{} line {}: {}", path.string(), line, e.what()));
    }
  }
  return questions;
}

CheckpointStore::CheckpointStore(std::filesystem::path path) : path_(std::move(path)) {}

std::map<std::string, CheckpointStore::Entry> CheckpointStore::load() const {
  std::map<std::string, Entry> entries;
  std::ifstream in(path_);
  if (!in) return entries;
  std::vector<std::string> lines;
  for (std::string text; std::getline(in, text);) lines.push_back(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    Json object;
    try {
      object = Json::parse(lines[i]);
    } catch (const nlohmann::json::parse_error& e) {
      if (i + 1 == lines.size()) break;
      throw DataError(fmt::format("checkpoint {} line {}: {}", path_.string(), i + 1, e.what()));
    }
    try {
      Entry entry;
      entry.id = object.at("id").get<std::string>();
      entry.raw_responses = object.value("raw_responses", std::vector<std::string>{});
      if (object.contains("record")) entry.record = record_from_json(object["record"], i + 1);
      if (object.contains("failure")) {
        const Json& f = object["failure"];
        entry.failure = ParseFailure{entry.id, f.at("reason").get<std::string>(),
                                     f.value("raw_excerpt", std::string())};
      }
      entries[entry.id] = std::move(entry);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("checkpoint {} line {}: {}", path_.string(), i + 1, e.what()));
    }
  }
  return entries;
}

void CheckpointStore::append(const Entry& entry) {
  Json line = Json::object();
  line["id"] = entry.id;
  line["raw_responses"] = entry.raw_responses;
  if (entry.record) line["record"] = record_to_json(*entry.record);
  if (entry.failure) {
    line["failure"] = {{"reason", entry.failure->reason},
                       {"raw_excerpt", entry.failure->raw_excerpt}};
  }
  const std::string text = dump(line) + "\n";
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot append to checkpoint '{}'", path_.string()));
  out << text;
  out.flush();
}

RunResult run_eval(std::span<const Question> questions, const prompts::ElicitationSpec& spec,
                   const ProviderConfig& provider, ChatTransport& transport,
                   const RunOptions& options) {
  spec.validate();
  provider.validate();
  std::set<std::string> ids;
  for (const Question& q : questions) {
    if (!ids.insert(q.id).second) throw DataError(fmt::format("duplicate question id '{}'", q.id));
  }
  std::optional<CheckpointStore> store;
  std::map<std::string, CheckpointStore::Entry> done;
  if (options.checkpoint) {
    store.emplace(*options.checkpoint);
    done = store->load();
  }
  const std::string model_label = options.model_label.empty() ? provider.model : options.model_label;

  std::vector<CheckpointStore::Entry> entries(questions.size());
  std::atomic<std::size_t> queried{0};
  bounded_parallel_for(questions.size(), provider.max_concurrent, [&](std::size_t i) {
    const Question& q = questions[i];
    if (auto it = done.find(q.id); it != done.end()) {
      entries[i] = it->second;
      return;
    }
    ++queried;
    Outcome outcome = run_question(q, spec, provider, transport, model_label, options.sleep);
    if (store && !outcome.transport_error) store->append(outcome.entry);
    entries[i] = std::move(outcome.entry);
  });

  RunResult result;
  result.n_queried = queried.load();
  for (CheckpointStore::Entry& entry : entries) {
    if (entry.record) result.records.push_back(std::move(*entry.record));
    if (entry.failure) result.failures.push_back(std::move(*entry.failure));
  }
  return result;
}

JudgeResult judge_answers(std::span<const EvalRecord> records,
                          const std::map<std::string, std::string>& ground_truth,
                          const JudgeConfig& judge, ChatTransport& transport,
                          const Sleeper& sleep) {
  judge.provider.validate();
  for (const EvalRecord& r : records) {
    if (!ground_truth.contains(r.id)) {
      throw DataError(fmt::format("no ground-truth answer for record '{}'", r.id));
    }
  }
  const std::string_view tmpl =
      judge.prompt_template.empty() ? prompts::get("judge_system") : judge.prompt_template;

  JudgeResult result;
  result.records.assign(records.begin(), records.end());
  std::vector<std::optional<ParseFailure>> failures(records.size());
  bounded_parallel_for(records.size(), judge.provider.max_concurrent, [&](std::size_t i) {
    EvalRecord& record = result.records[i];
    const prompts::RenderedPrompt prompt = prompts::render_judge_prompt(
        tmpl, record.question.value_or(""), ground_truth.at(record.id), record.answer.value_or(""));
    const ChatRequest request{judge.provider.model, prompt.system, prompt.user,
                              judge.provider.temperature};
    Json raw_outputs = Json::array();
    std::optional<Verdict> verdict;
    std::string reason;
    for (int attempt = 0; attempt < 2 && !verdict; ++attempt) {
      std::string output;
      try {
        output = complete_with_retry(transport, request, judge.provider.retry, sleep);
      } catch (const TransportError& e) {
        reason = fmt::format("transport: {}", e.what());
        break;
      }
      raw_outputs.push_back(output);
      const std::string_view token = trim(output);
      if (token == "CORRECT") verdict = Verdict::kCorrect;
      else if (token == "INCORRECT") verdict = Verdict::kIncorrect;
      else reason = "judge output is not CORRECT or INCORRECT";
    }
    record.extra["judge_raw"] = raw_outputs;
    if (verdict) {
      record.judge_verdict = verdict;
      record.is_correct = *verdict == Verdict::kCorrect;
      record.extra.erase("judge_status");
      return;
    }
    record.judge_verdict.reset();
    record.is_correct.reset();
    record.extra["judge_status"] = "unjudged";
    const std::string last = raw_outputs.empty() ? "" : raw_outputs.back().get<std::string>();
    failures[i] = make_parse_failure(record.id, reason, last);
  });
  for (auto& failure : failures) {
    if (failure) result.unjudged.push_back(std::move(*failure));
  }
  return result;
}

GradeMode grade_mode_from_string(std::string_view text) {
  if (text == "numeric") return GradeMode::kNumeric;
  if (text == "letter") return GradeMode::kLetter;
  if (text == "exact") return GradeMode::kExact;
  throw ConfigError(fmt::format("unknown grade mode '{}' (expected numeric, letter or exact)", text));
}

std::vector<EvalRecord> exact_match_grade(std::span<const EvalRecord> records,
                                          const std::map<std::string, std::string>& ground_truth,
                                          GradeMode mode) {
  std::vector<EvalRecord> graded(records.begin(), records.end());
  for (EvalRecord& record : graded) {
    const auto it = ground_truth.find(record.id);
    if (it == ground_truth.end()) {
      throw DataError(fmt::format("no ground-truth answer for record '{}'", record.id));
    }
    const std::string answer = record.answer.value_or("");
    switch (mode) {
      case GradeMode::kNumeric: {
        const auto expected = parse_number(it->second);
        if (!expected) {
          throw DataError(fmt::format("ground truth '{}' for '{}' is not numeric", it->second,
                                      record.id));
        }
        const auto got = parse_number(answer);
        record.is_correct = got && *got == *expected;
        break;
      }
      case GradeMode::kLetter: {
        const auto expected = parse_letter(it->second);
        if (!expected) {
          throw DataError(fmt::format("ground truth '{}' for '{}' is not a letter A-D",
                                      it->second, record.id));
        }
        const auto got = parse_letter(answer);
        record.is_correct = got && *got == *expected;
        break;
      }
      case GradeMode::kExact:
        record.is_correct = trim(answer) == trim(it->second);
        break;
    }
  }
  return graded;
}

std::map<std::string, std::string> read_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open ground-truth file '{}'", path.string()));
  std::map<std::string, std::string> truth;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    const Json object = read_json_line(text, line, path.string());
    try {
      const std::string id = object.at("id").get<std::string>();
      const Json& answer = object.contains("gt") ? object["gt"] : object.at("answer");
      truth[id] = answer.is_string() ? answer.get<std::string>() : answer.dump();
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("{} line {}: {}", path.string(), line, e.what()));
    }
  }
  return truth;
}

}  // namespace bas
