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
#include <sstream>

#include <gtest/gtest.h>

#include "bas/cli.hpp"
#include "bas/error.hpp"
#include "json.hpp"
#include "mock_transport.hpp"
#include "temp_dir.hpp"

namespace bas::cli {
namespace {

using testing_support::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args, TransportFactory factory = {}) {
  std::ostringstream out;
  std::ostringstream err;
  Environment env;
  env.out = &out;
  env.err = &err;
  env.transport_factory = std::move(factory);
  env.sleep = [](std::chrono::milliseconds) {};
  const int code = run(args, env);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> metric_lines(const std::string& text) {
  std::vector<nlohmann::json> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    if (j["kind"] == "metric") lines.push_back(j);
  }
  return lines;
}

double metric_value(const std::string& text, const std::string& name) {
  for (const auto& j : metric_lines(text)) {
    if (j["metric"] == name) return j["value"].get<double>();
  }
  ADD_FAILURE() << "missing metric " << name;
  return 0.0;
}

TEST(CliTest, EvalSingleRecordProfile) {
  TempDir dir;
  const auto f = dir.write("r.jsonl", R"({"id":"1","confidence":0.5,"is_correct":true})" "\n");
  const Result r = invoke({"eval", f.string(), "--format", "machine", "--bootstrap", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(metric_value(r.out, "bas"), 0.5, 1e-12);
  EXPECT_NEAR(metric_value(r.out, "bas_linear"), 0.25, 1e-9);
  EXPECT_NEAR(metric_value(r.out, "bas_quadratic"), 0.125, 1e-9);
}

TEST(CliTest, EvalTableAndCsv) {
  TempDir dir;
  const auto f = dir.write("r.csv", "id,confidence,is_correct\na,0.9,1\nb,0.2,0\nc,0.6,1\n");
  const Result r = invoke({"eval", f.string(), "--model", "m1", "--bootstrap", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("m1"), std::string::npos);
  EXPECT_NE(r.out.find("AURC"), std::string::npos);
}

TEST(CliTest, EvalDataErrors) {
  TempDir dir;
  EXPECT_EQ(invoke({"eval", dir.write("e.jsonl", "").string()}).code, 1);
  const Result unlabeled =
      invoke({"eval", dir.write("u.jsonl", R"({"id":"1","confidence":0.5})" "\n").string()});
  EXPECT_EQ(unlabeled.code, 1);
  EXPECT_NE(unlabeled.err.find("judge"), std::string::npos);
  EXPECT_EQ(invoke({"eval", (dir / "missing.jsonl").string()}).code, 1);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({"eval"}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"eval", "x.jsonl", "--binning", "log"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(CliTest, SeedMakesOutputReproducible) {
  TempDir dir;
  const auto f = dir.write("r.csv", "id,confidence,is_correct\na,0.9,1\nb,0.2,0\nc,0.6,0\n");
  const auto a = invoke({"--seed", "9", "eval", f.string(), "--format", "machine"});
  const auto b = invoke({"eval", f.string(), "--format", "machine", "--seed", "9"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(CliTest, GradeThenEval) {
  TempDir dir;
  const auto rec = dir.write("r.jsonl",
                             R"({"id":"1","answer":"042","confidence":0.8})" "\n"
                             R"({"id":"2","answer":"7","confidence":0.6})" "\n");
  const auto gt = dir.write("gt.jsonl",
                            R"({"id":"1","answer":"42"})" "\n" R"({"id":"2","answer":"8"})" "\n");
  const auto out = dir / "graded.jsonl";
  const Result g = invoke({"grade", "--records", rec.string(), "--gt", gt.string(), "--mode",
                           "numeric", "--out", out.string()});
  ASSERT_EQ(g.code, 0) << g.err;
  const Result e = invoke({"eval", out.string(), "--format", "machine"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NEAR(metric_value(e.out, "accuracy"), 0.5, 1e-12);
}

TEST(CliTest, RunWithMockTransport) {
  TempDir dir;
  std::string q;
  for (int i = 0; i < 5; ++i) {
    q += nlohmann::json{{"id", "q" + std::to_string(i)}, {"question", "What is 1?"}}.dump() + "\n";
  }
  const auto questions = dir.write("q.jsonl", q);
  auto factory = [](const ProviderConfig&) -> std::unique_ptr<ChatTransport> {
    return std::make_unique<testing_support::ScriptedTransport>(testing_support::direct_reply);
  };
  const auto out = dir / "records.jsonl";
  const Result r = invoke({"run", "--questions", questions.string(), "--model", "mock", "--out",
                           out.string()},
                          factory);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string written = testing_support::slurp(out);
  EXPECT_EQ(std::count(written.begin(), written.end(), '\n'), 5);

  auto down = [](const ProviderConfig&) -> std::unique_ptr<ChatTransport> {
    return std::make_unique<testing_support::ScriptedTransport>(
        [](const ChatRequest&) -> std::string { throw TransportError("refused"); });
  };
  const Result fail = invoke({"run", "--questions", questions.string(), "--model", "mock",
                              "--out", (dir / "x.jsonl").string()},
                             down);
  EXPECT_EQ(fail.code, 3);
}

TEST(CliTest, CalibrateAutoSplit) {
  TempDir dir;
  std::string rows = "id,confidence,is_correct\n";
  for (int i = 0; i < 200; ++i) {
    rows += "r" + std::to_string(i) + "," + (i % 2 ? "0.95" : "0.9") + "," +
            (i % 3 == 0 ? "1" : "0") + "\n";
  }
  const auto f = dir.write("r.csv", rows);
  const auto map = dir / "map.tsv";
  const Result r = invoke({"calibrate", "--input", f.string(), "--split", "auto", "--map-out",
                           map.string(), "--format", "machine", "--bootstrap", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(map));
  EXPECT_NE(r.out.find("before"), std::string::npos);
  EXPECT_NE(r.out.find("after"), std::string::npos);
  EXPECT_EQ(invoke({"calibrate", "--input", f.string(), "--train", f.string()}).code, 2);
}

TEST(CliTest, CompareAndPlot) {
  TempDir dir;
  const auto a = dir.write("a.csv", "id,confidence,is_correct\n1,0.7,1\n2,0.7,1\n3,0.3,0\n4,0.3,0\n");
  const auto b =
      dir.write("b.csv", "id,confidence,is_correct\n1,0.9,1\n2,0.9,1\n3,0.99,0\n4,0.01,0\n");
  const auto ra = dir / "a.report";
  const auto rb = dir / "b.report";
  ASSERT_EQ(invoke({"eval", a.string(), "--model", "A", "--format", "machine", "-o",
                    ra.string()}).code, 0);
  ASSERT_EQ(invoke({"eval", b.string(), "--model", "B", "--format", "machine", "-o",
                    rb.string()}).code, 0);
  const Result c = invoke({"compare", ra.string(), rb.string()});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out.find("No pairs"), std::string::npos);
  const Result p = invoke({"plot", ra.string(), rb.string(), "--out-dir", (dir / "plots").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "plots" / "reliability.csv"));
}

}  // namespace
}  // namespace bas::cli
