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

#ifndef BAS_CLI_HPP_
#define BAS_CLI_HPP_

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "bas/runner.hpp"

namespace bas::cli {

using TransportFactory = std::function<std::unique_ptr<ChatTransport>(const ProviderConfig&)>;

struct Environment {
  std::ostream* out = nullptr;  // defaults to std::cout
  std::ostream* err = nullptr;  // defaults to std::cerr
  // Defaults to make_http_transport.
  TransportFactory transport_factory;
  // Retry backoff; defaults to a real sleep.
  Sleeper sleep;
};

// Runs `bas <args...>` in-process (args exclude the program name) and returns
// the exit code: 0 success, 1 data error, 2 config or usage error,
// 3 transport error.
int run(const std::vector<std::string>& args, const Environment& env = {});

}  // namespace bas::cli

#endif  // BAS_CLI_HPP_
