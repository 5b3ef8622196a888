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

#include "bas/prompts.hpp"

#include <fmt/format.h>

#include "bas/error.hpp"

namespace bas::prompts {
namespace {

bool is_slot_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

std::string_view step1_template(Elicitation method) {
  switch (method) {
    case Elicitation::kDirect:
      return "direct_system";
    case Elicitation::kTopK:
      return "top_k_system";
    case Elicitation::kSelfReflection:
      return "self_reflection_step1_system";
    case Elicitation::kTopKReflection:
      return "top_k_reflection_step1_system";
  }
  return "direct_system";
}

}  // namespace

std::string_view template_version() { return internal::kTemplateVersion; }

std::string_view get(std::string_view name) {
  for (const auto& [stem, text] : internal::embedded_templates()) {
    if (stem == name) return text;
  }
  throw ConfigError(fmt::format("unknown prompt template '{}'", name));
}

std::vector<std::string> template_names() {
  std::vector<std::string> names;
  for (const auto& entry : internal::embedded_templates()) names.emplace_back(entry.first);
  return names;
}

std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_slot_char(tmpl[j])) ++j;
      if (j < tmpl.size() && tmpl[j] == '}' && j > i + 1) {
        const std::string name(tmpl.substr(i + 1, j - i - 1));
        const auto it = slots.find(name);
        if (it == slots.end()) {
          throw ConfigError(fmt::format("prompt template slot '{{{}}}' has no value", name));
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

int ElicitationSpec::steps() const {
  return method == Elicitation::kSelfReflection || method == Elicitation::kTopKReflection ? 2
                                                                                           : 1;
}

void ElicitationSpec::validate() const {
  const bool top_k = method == Elicitation::kTopK || method == Elicitation::kTopKReflection;
  if (top_k && k < 2) {
    throw ConfigError(fmt::format("{} elicitation needs k >= 2, got {}", to_string(method), k));
  }
  if (system_template) get(*system_template);
}

RenderedPrompt render_prompt(const ElicitationSpec& spec, std::string_view question, int step,
                             std::optional<std::string_view> prior_answer) {
  spec.validate();
  if (step < 1 || step > spec.steps()) {
    throw ConfigError(fmt::format("{} elicitation has no step {}", to_string(spec.method), step));
  }
  std::map<std::string, std::string> slots = {{"question", std::string(question)},
                                              {"k", std::to_string(spec.k)}};
  if (step == 1) {
    const std::string_view system =
        spec.system_template ? get(*spec.system_template) : get(step1_template(spec.method));
    return {fill(system, slots), fill(get("question_user"), slots)};
  }
  if (!prior_answer) {
    throw ConfigError(fmt::format("step 2 of {} needs the step-1 answer", to_string(spec.method)));
  }
  slots["answer"] = std::string(*prior_answer);
  if (spec.method == Elicitation::kSelfReflection) {
    return {fill(get("self_reflection_step2_system"), slots),
            fill(get("reflection_user"), slots)};
  }
  return {fill(get("top_k_reflection_step2_system"), slots),
          fill(get("top_k_reflection_user"), slots)};
}

std::string numbered_list(const std::vector<std::string>& answers) {
  std::string out;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (i) out += '\n';
    out += fmt::format("{}. {}", i + 1, answers[i]);
  }
  return out;
}

RenderedPrompt render_judge_prompt(std::string_view judge_template, std::string_view question,
                                   std::string_view ground_truth, std::string_view model_answer) {
  const std::map<std::string, std::string> slots = {{"question", std::string(question)},
                                                    {"gt", std::string(ground_truth)},
                                                    {"model_ans", std::string(model_answer)}};
  return {fill(judge_template, slots), std::string(get("judge_user"))};
}

}  // namespace bas::prompts
