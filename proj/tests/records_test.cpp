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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "bas/error.hpp"
#include "bas/records.hpp"

namespace bas {
namespace {

Dataset read_jsonl(const std::string& text) {
  std::istringstream in(text);
  return read_dataset(in, FileFormat::kJsonl);
}

Dataset read_csv(const std::string& text) {
  std::istringstream in(text);
  return read_dataset(in, FileFormat::kCsv);
}

TEST(RecordsJsonlTest, ReadsKnownAndExtraFields) {
  const Dataset d = read_jsonl(
      R"({"id":"a","confidence":0.7,"is_correct":true,"model":"m","note":{"x":1}})"
      "\n\n"
      R"({"id":"b","confidence":0.2,"is_correct":0,"elicitation":"top_k"})"
      "\n");
  ASSERT_EQ(d.records.size(), 2u);
  EXPECT_TRUE(d.issues.empty());
  EXPECT_EQ(d.records[0].model, "m");
  EXPECT_EQ(d.records[0].extra["note"]["x"], 1);
  EXPECT_EQ(d.records[0].line, 1u);
  EXPECT_EQ(d.records[1].is_correct, false);
  EXPECT_EQ(d.records[1].elicitation, Elicitation::kTopK);
  EXPECT_EQ(d.records[1].line, 3u);
}

TEST(RecordsJsonlTest, StructuralErrorsCarryLineNumbers) {
  const auto expect_line = [](const std::string& text, const std::string& needle) {
    try {
      read_jsonl(text);
      FAIL() << "expected DataError for " << text;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_line("{\"id\":\"a\",\"confidence\":0.5}\n{oops\n", "line 2");
  expect_line("{\"confidence\":0.5}\n", "missing 'id'");
  expect_line("{\"id\":\"a\"}\n", "missing 'confidence'");
  expect_line("{\"id\":\"a\",\"confidence\":0.5}\n{\"id\":\"a\",\"confidence\":0.5}\n",
              "duplicate id");
}

TEST(RecordsJsonlTest, InvalidValuesBecomeIssues) {
  const Dataset d = read_jsonl(
      R"({"id":"a","confidence":1.2,"is_correct":true})"
      "\n"
      R"({"id":"b","confidence":"high","is_correct":true})"
      "\n"
      R"({"id":"c","confidence":0.5,"is_correct":0.5})"
      "\n"
      R"({"id":"d","confidence":0.5,"is_correct":true})"
      "\n");
  ASSERT_EQ(d.records.size(), 1u);
  EXPECT_EQ(d.records[0].id, "d");
  ASSERT_EQ(d.issues.size(), 3u);
  EXPECT_EQ(d.issues[0].id, "a");
  EXPECT_EQ(d.issues[0].line, 1u);
  EXPECT_EQ(d.issues[2].id, "c");
}

TEST(RecordsJsonlTest, RoundTripPreservesEverything) {
  const Dataset d = read_jsonl(
      R"({"id":"a","model":"m","task":"t","question":"q?","answer":"x","confidence":0.1234567890123,"is_correct":true,"raw_response":"r\n\"quoted\"","elicitation":"direct","judge_verdict":"CORRECT","zeta":[1,2],"alpha":"keep order"})"
      "\n");
  std::ostringstream out;
  write_dataset(out, d.records, FileFormat::kJsonl);
  const Dataset back = read_jsonl(out.str());
  EXPECT_EQ(back.records, d.records);
  const std::string text = out.str();
  EXPECT_LT(text.find("zeta"), text.find("alpha"));
}

TEST(RecordsCsvTest, ReadsQuotedFields) {
  const Dataset d = read_csv(
      "id,confidence,is_correct,answer\n"
      "a,0.9,1,\"Paris, France\"\n"
      "b,.3,false,\"say \"\"hi\"\"\"\n"
      "c,0.5,,\"multi\nline\"\n");
  ASSERT_EQ(d.records.size(), 3u);
  EXPECT_EQ(d.records[0].answer, "Paris, France");
  EXPECT_EQ(d.records[1].answer, "say \"hi\"");
  EXPECT_EQ(d.records[1].confidence, 0.3);
  EXPECT_FALSE(d.records[2].is_correct.has_value());
  EXPECT_EQ(d.records[2].answer, "multi\nline");
}

TEST(RecordsCsvTest, RaggedRowAndMissingColumn) {
  EXPECT_THROW(read_csv("id,confidence\na,0.5,extra\n"), DataError);
  EXPECT_THROW(read_csv("id,score\na,0.5\n"), DataError);
}

TEST(RecordsCsvTest, BadCellsBecomeIssues) {
  const Dataset d = read_csv("id,confidence,is_correct\na,abc,1\nb,0.5,maybe\nc,0.5,1\n");
  EXPECT_EQ(d.records.size(), 1u);
  EXPECT_EQ(d.issues.size(), 2u);
}

TEST(RecordsCsvTest, RoundTrip) {
  const Dataset d = read_csv("id,confidence,is_correct,model,comment\na,0.1,1,m,\"x,y\"\nb,1,0,m,\n");
  std::ostringstream out;
  write_dataset(out, d.records, FileFormat::kCsv);
  EXPECT_EQ(read_csv(out.str()).records, d.records);
}

TEST(ToPredictionsTest, PointsAtLabelingCommands) {
  const Dataset d = read_jsonl(
      R"({"id":"a","confidence":0.7})"
      "\n"
      R"({"id":"b","confidence":0.7,"is_correct":true})"
      "\n");
  try {
    to_predictions(d.records);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bas judge"), std::string::npos);
    EXPECT_NE(msg.find("bas grade"), std::string::npos);
    EXPECT_NE(msg.find("a"), std::string::npos);
  }
}

TEST(RecordFromJsonTest, ThrowsOnIssue) {
  EXPECT_THROW(record_from_json(nlohmann::ordered_json::parse(R"({"id":"a","confidence":2})")),
               DataError);
  EXPECT_EQ(record_from_json(nlohmann::ordered_json::parse(R"({"id":"a","confidence":0.25})"))
                .confidence,
            0.25);
}

TEST(FormatTest, ByExtension) {
  EXPECT_EQ(format_for_path("x/y.csv"), FileFormat::kCsv);
  EXPECT_EQ(format_for_path("x/y.CSV"), FileFormat::kCsv);
  EXPECT_EQ(format_for_path("x/y.jsonl"), FileFormat::kJsonl);
}

}  // namespace
}  // namespace bas
