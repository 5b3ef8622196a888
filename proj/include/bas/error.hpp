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

#ifndef BAS_ERROR_HPP_
#define BAS_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace bas {

// Error categories double as the CLI process exit codes.
enum class ErrorCode : int {
  kData = 1,
  kConfig = 2,
  kTransport = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Malformed or invalid input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorCode::kData, message) {}
};

// Invalid configuration: flags, priors, provider settings, split specs.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(ErrorCode::kConfig, message) {}
};

// Network, HTTP or authentication failure talking to a chat endpoint.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string& message)
      : Error(ErrorCode::kTransport, message) {}
};

// A model response that does not follow the elicitation format. Carries the
// raw text so callers can log it.
class ParseError : public DataError {
 public:
  ParseError(const std::string& reason, std::string raw)
      : DataError(reason), reason_(reason), raw_(std::move(raw)) {}

  const std::string& reason() const noexcept { return reason_; }
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string reason_;
  std::string raw_;
};

int exit_code(const Error& error) noexcept;

}  // namespace bas

#endif  // BAS_ERROR_HPP_
