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

#ifndef BAS_RUNNER_HPP_
#define BAS_RUNNER_HPP_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bas/prompts.hpp"
#include "bas/records.hpp"

namespace bas {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
};

// Chat-completions endpoint settings. The API key is read from the
// environment variable named by api_key_env when the transport is created.
struct ProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string model;
  double temperature = 0.0;
  int max_concurrent = 4;
  int timeout_ms = 60000;
  RetryPolicy retry;

  // Throws ConfigError for a missing model, non-positive concurrency or
  // timeout, or fewer than one attempt.
  void validate() const;
};

// Reads a JSON provider config: base_url, api_key_env, model, temperature,
// max_concurrent, timeout_ms, retry.max_attempts, retry.initial_backoff_ms.
// Missing keys keep the defaults of `base`.
ProviderConfig load_provider_config(const std::filesystem::path& path,
                                    ProviderConfig base = {});

struct ChatRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.0;
};

// The JSON body sent to /chat/completions. Byte-identical for identical
// requests.
std::string request_payload(const ChatRequest& request);

// Extracts choices[0].message.content from a chat-completions response body.
// Throws TransportError for anything else.
std::string response_content(std::string_view body);

// Sends one chat request and returns the assistant text. Implementations
// throw TransportError on network, HTTP or auth failure and must be safe to
// call from several threads.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// HTTP(S) transport posting request_payload to <base_url>/chat/completions.
std::unique_ptr<ChatTransport> make_http_transport(const ProviderConfig& config);

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// complete() with retries on TransportError only; the wait doubles after each
// failed attempt. Rethrows the last TransportError.
std::string complete_with_retry(ChatTransport& transport, const ChatRequest& request,
                                const RetryPolicy& policy, const Sleeper& sleep);

// Runs fn(i) for i in [0, n) on at most max_concurrent threads. The first
// exception (lowest index) is rethrown after all workers stop.
void bounded_parallel_for(std::size_t n, int max_concurrent,
                          const std::function<void(std::size_t)>& fn);

struct Question {
  std::string id;
  std::string question;
  std::optional<std::string> reference;
  std::optional<std::string> task;
};

// JSONL with `id`, `question` and optional `answer` (or `gt`) and `task`.
std::vector<Question> read_questions(const std::filesystem::path& path);

// Append-only JSONL log of completed questions keyed by id. Each line holds
// the raw responses and either the finished record or the parse failure.
class CheckpointStore {
 public:
  struct Entry {
    std::string id;
    std::vector<std::string> raw_responses;
    std::optional<EvalRecord> record;
    std::optional<ParseFailure> failure;
  };

  explicit CheckpointStore(std::filesystem::path path);

  // Entries already on disk; a later line for the same id wins. A truncated
  // final line (interrupted write) is ignored.
  std::map<std::string, Entry> load() const;
  void append(const Entry& entry);

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

struct RunOptions {
  std::optional<std::filesystem::path> checkpoint;
  std::string model_label;
  Sleeper sleep;
};

struct RunResult {
  // Parsed records in question order.
  std::vector<EvalRecord> records;
  // Questions without a usable record (parse or transport failure), in
  // question order.
  std::vector<ParseFailure> failures;
  // Questions sent to the endpoint in this run (checkpointed ones are not).
  std::size_t n_queried = 0;
};

// Queries each question once (twice for reflection methods, the second call
// only after the first response parses). Parse failures are checkpointed;
// transport failures are not, so a rerun retries them.
RunResult run_eval(std::span<const Question> questions, const prompts::ElicitationSpec& spec,
                   const ProviderConfig& provider, ChatTransport& transport,
                   const RunOptions& options = {});

struct JudgeConfig {
  ProviderConfig provider;
  std::string prompt_template;  // empty: built-in judge_system template
};

struct JudgeResult {
  // Every input record; judged ones carry is_correct and judge_verdict.
  // Raw judge outputs are kept in extra["judge_raw"].
  std::vector<EvalRecord> records;
  // Records the judge could not label, with reasons.
  std::vector<ParseFailure> unjudged;
};

// Labels records with an LLM judge: CORRECT -> 1, INCORRECT -> 0, anything
// else is retried once, then the record is left unlabeled. Throws DataError
// when an id has no ground truth.
JudgeResult judge_answers(std::span<const EvalRecord> records,
                          const std::map<std::string, std::string>& ground_truth,
                          const JudgeConfig& judge, ChatTransport& transport,
                          const Sleeper& sleep = {});

enum class GradeMode {
  kNumeric,  // numeric value equality ("042" == "42" == "42.0")
  kLetter,   // multiple-choice letter A-D
  kExact,    // whitespace-trimmed string equality
};

GradeMode grade_mode_from_string(std::string_view text);

// Fills is_correct by exact match. Throws DataError for a missing ground
// truth, or a ground truth that does not parse under the mode.
std::vector<EvalRecord> exact_match_grade(std::span<const EvalRecord> records,
                                          const std::map<std::string, std::string>& ground_truth,
                                          GradeMode mode);

// id -> reference answer from a JSONL file with `id` and `answer` (or `gt`).
std::map<std::string, std::string> read_ground_truth(const std::filesystem::path& path);

}  // namespace bas

#endif  // BAS_RUNNER_HPP_
