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

#ifndef BAS_PROMPTS_HPP_
#define BAS_PROMPTS_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bas/records.hpp"

namespace bas::prompts {

// Templates are embedded at build time from resources/prompts/<version>/.
// Names are the file stems, e.g. "direct_system" or "judge_system".
std::string_view template_version();
std::string_view get(std::string_view name);
std::vector<std::string> template_names();

// Substitutes `{slot}` placeholders (lowercase letters and underscores) in a
// single pass over the template; substituted text is never rescanned. A
// placeholder without a value throws ConfigError.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& slots);

struct ElicitationSpec {
  Elicitation method = Elicitation::kDirect;
  int k = 3;
  // Replaces the built-in step-1 system template (e.g. "medqa_direct_system").
  std::optional<std::string> system_template;

  // 2 for the reflection variants, 1 otherwise.
  int steps() const;
  // Throws ConfigError: top-k variants need k >= 2.
  void validate() const;
};

struct RenderedPrompt {
  std::string system;
  std::string user;

  friend bool operator==(const RenderedPrompt&, const RenderedPrompt&) = default;
};

// Step 2 needs `prior_answer`: the step-1 answer for self-reflection, or the
// numbered candidate list for top-k reflection. Throws ConfigError for an
// invalid step or a missing prior answer.
RenderedPrompt render_prompt(const ElicitationSpec& spec, std::string_view question,
                             int step,
                             std::optional<std::string_view> prior_answer = std::nullopt);

// Numbered "1. a\n2. b" list fed to the top-k reflection step.
std::string numbered_list(const std::vector<std::string>& answers);

// Judge prompt with {question}, {gt} and {model_ans} filled.
RenderedPrompt render_judge_prompt(std::string_view judge_template, std::string_view question,
                                   std::string_view ground_truth, std::string_view model_answer);

namespace internal {
extern const char* const kTemplateVersion;
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_templates();
}  // namespace internal

}  // namespace bas::prompts

#endif  // BAS_PROMPTS_HPP_
