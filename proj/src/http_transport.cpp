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

#include <cstdlib>
#include <regex>

#include <fmt/format.h>
#include <httplib.h>

#include "bas/error.hpp"
#include "bas/runner.hpp"

namespace bas {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)", std::regex::icase);
  std::smatch match;
  if (!std::regex_match(url, match, kUrl)) {
    throw ConfigError(fmt::format("base_url '{}' is not an http(s) URL", url));
  }
  Endpoint endpoint{match[1].str(), match[2].matched ? match[2].str() : ""};
  while (!endpoint.path.empty() && endpoint.path.back() == '/') endpoint.path.pop_back();
  return endpoint;
}

class HttpTransport final : public ChatTransport {
 public:
  explicit HttpTransport(const ProviderConfig& config)
      : endpoint_(split_url(config.base_url)), timeout_ms_(config.timeout_ms) {
    if (const char* key = std::getenv(config.api_key_env.c_str()); key && *key) api_key_ = key;
  }

  std::string complete(const ChatRequest& request) override {
    httplib::Client client(endpoint_.origin);
    const auto timeout = std::chrono::milliseconds(timeout_ms_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const auto response = client.Post(endpoint_.path + "/chat/completions", headers,
                                      request_payload(request), "application/json");
    if (!response) {
      throw TransportError(fmt::format("request to {} failed: {}", endpoint_.origin,
                                       httplib::to_string(response.error())));
    }
    if (response->status != 200) {
      throw TransportError(fmt::format("{} returned HTTP {}: {}", endpoint_.origin,
                                       response->status, response->body.substr(0, 200)));
    }
    return response_content(response->body);
  }

 private:
  Endpoint endpoint_;
  int timeout_ms_;
  std::string api_key_;
};

}  // namespace

std::unique_ptr<ChatTransport> make_http_transport(const ProviderConfig& config) {
  config.validate();
  return std::make_unique<HttpTransport>(config);
}

}  // namespace bas
