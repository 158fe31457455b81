// Copyright 2026 The er-evalkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "test_util.hpp"

namespace erkit::cli {
namespace {

using erkit::testing::TempDir;
using erkit::testing::read_file;
using erkit::testing::write_file;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

void write_worked_fixture(const TempDir& dir) {
  write_file(dir / "q.jsonl", "{\"query\":\"q\",\"relevant\":[\"A\",\"B\"]}\n");
  write_file(dir / "r.jsonl",
             "{\"query\":\"q\",\"results\":["
             "{\"entity_id\":\"A\",\"score\":0.99,\"bin\":\"high\"},"
             "{\"entity_id\":\"C\",\"score\":0.95,\"bin\":\"high\"},"
             "{\"entity_id\":\"D\",\"score\":0.8,\"bin\":\"medium\"},"
             "{\"entity_id\":\"E\",\"score\":0.75,\"bin\":\"medium\"},"
             "{\"entity_id\":\"F\",\"score\":0.4,\"bin\":\"low\"}]}\n");
}

TEST(Cli, UsageErrors) {
  const auto unknown = run({"compute"});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"evaluate", "--qrels", "x"}).code, kExitUsage);
  EXPECT_EQ(run({"evaluate", "--bogus"}).code, kExitUsage);
}

TEST(Cli, HelpShowsDefaults) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE((help.out + help.err).find("min-impressions"), std::string::npos);
}

TEST(Cli, EvaluateWorkedExample) {
  TempDir dir;
  write_worked_fixture(dir);
  const auto result = run({"evaluate", "--qrels", (dir / "q.jsonl").string(), "--run",
                           (dir / "r.jsonl").string(), "-k", "5"});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("\"precision@5\": {\n      \"micro\": 0.2"), std::string::npos)
      << result.out;
}

TEST(Cli, ModuleErrorsExitOne) {
  TempDir dir;
  const auto missing = run({"evaluate", "--qrels", (dir / "none.jsonl").string(), "--run",
                            (dir / "none.jsonl").string()});
  EXPECT_EQ(missing.code, kExitFailure);
  EXPECT_EQ(missing.err.rfind("error:", 0), 0u);

  write_worked_fixture(dir);
  const auto bad_k = run({"evaluate", "--qrels", (dir / "q.jsonl").string(), "--run",
                          (dir / "r.jsonl").string(), "-k", "0"});
  EXPECT_NE(bad_k.code, kExitOk);
}

TEST(Cli, StrictTurnsRejectsIntoFailure) {
  TempDir dir;
  write_file(dir / "e.jsonl",
             "{\"query\":\"a\",\"impressions\":[\"x\"],\"clicked\":\"x\"}\nnot json\n");
  const std::string events = (dir / "e.jsonl").string();
  const std::string out = (dir / "c.jsonl").string();
  EXPECT_EQ(run({"aggregate-ctr", "--events", events, "--out", out}).code, kExitOk);
  EXPECT_EQ(run({"--strict", "aggregate-ctr", "--events", events, "--out", out}).code,
            kExitFailure);
}

TEST(Cli, ConfigFileSuppliesDefaults) {
  TempDir dir;
  write_worked_fixture(dir);
  write_file(dir / "cfg", "# evaluation\nk = 1\n");
  const auto result = run({"--config", (dir / "cfg").string(), "evaluate", "--qrels",
                           (dir / "q.jsonl").string(), "--run", (dir / "r.jsonl").string()});
  ASSERT_EQ(result.code, kExitOk) << result.err;
  EXPECT_NE(result.out.find("\"k\": 1"), std::string::npos);

  const auto overridden = run({"--config", (dir / "cfg").string(), "evaluate", "--qrels",
                               (dir / "q.jsonl").string(), "--run",
                               (dir / "r.jsonl").string(), "-k", "3"});
  EXPECT_NE(overridden.out.find("\"k\": 3"), std::string::npos);

  write_file(dir / "bad", "nonsense_key = 1\n");
  EXPECT_EQ(run({"--config", (dir / "bad").string(), "evaluate", "--qrels",
                 (dir / "q.jsonl").string(), "--run", (dir / "r.jsonl").string()})
                .code,
            kExitUsage);
}

TEST(Cli, SimulateIsDeterministicAndPipelineRuns) {
  TempDir a, b;
  const std::vector<std::string> flags = {"--n-titles", "80", "--n-queries", "30",
                                          "--replays", "40"};
  auto sim = [&](const TempDir& dir, const std::string& threads) {
    std::vector<std::string> args = {"--threads", threads, "simulate", "--seed", "7",
                                     "--out-dir", dir.path().string()};
    args.insert(args.end(), flags.begin(), flags.end());
    return run(args);
  };
  ASSERT_EQ(sim(a, "1").code, kExitOk);
  ASSERT_EQ(sim(b, "3").code, kExitOk);
  for (const char* name : {"basics.tsv", "ratings.tsv", "ranks.tsv", "truth.jsonl",
                           "run.jsonl", "events.jsonl"}) {
    EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
  }
  EXPECT_EQ(run({"simulate", "--out-dir", a.path().string()}).code, kExitUsage);

  auto p = [&](const char* name) { return (a / name).string(); };
  ASSERT_EQ(run({"ingest-catalog", "--basics", p("basics.tsv"), "--ratings",
                 p("ratings.tsv"), "--ranks", p("ranks.tsv"), "--out", p("catalog.jsonl")})
                .code,
            kExitOk);
  ASSERT_EQ(run({"score-importance", "--catalog", p("catalog.jsonl"), "--out",
                 p("scored.jsonl")})
                .code,
            kExitOk);
  ASSERT_EQ(run({"aggregate-ctr", "--events", p("events.jsonl"), "--out", p("ctr.jsonl"),
                 "--shards", "4"})
                .code,
            kExitOk);
  const auto rel = run({"build-relevance", "--ctr", p("ctr.jsonl"), "--scored",
                        p("scored.jsonl"), "--out", p("qrels.jsonl"), "--min-importance", "0"});
  ASSERT_EQ(rel.code, kExitOk) << rel.err;
  EXPECT_FALSE(read_file(a / "qrels.jsonl.provenance.jsonl").empty());
  const auto eval = run({"evaluate", "--qrels", p("qrels.jsonl"), "--run", p("run.jsonl"),
                         "--out", p("report.json")});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  const auto diag = run({"diagnose", "--qrels", p("qrels.jsonl"), "--run", p("run.jsonl"),
                         "--out", p("diag.jsonl")});
  ASSERT_EQ(diag.code, kExitOk) << diag.err;
  EXPECT_NE(diag.out.find("\"consistent\": true"), std::string::npos);
  const auto cmp = run({"compare", "--baseline", p("report.json"), "--candidate",
                        p("report.json"), "--table", "headline"});
  ASSERT_EQ(cmp.code, kExitOk) << cmp.err;
  EXPECT_NE(cmp.out.find("+0.00%"), std::string::npos);
}

}  // namespace
}  // namespace erkit::cli
