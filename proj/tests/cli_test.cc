// Copyright 2026 The sqlrobust Authors.
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

#include <cstdlib>
#include <sstream>

#include "sqlrobust/dataset.h"
#include "sqlrobust/json_io.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::CliRun;
using testing::DataPath;
using testing::RunCliArgs;
using testing::StripMetadata;
using testing::TempDir;

std::string D(const char *name) { return DataPath(name).string(); }

std::vector<Json> ReadJsonl(const std::string &path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<Json> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(Json::parse(line));
  return rows;
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(RunCliArgs({}).code, 1);
  EXPECT_EQ(RunCliArgs({"perturb", "--no-such-flag"}).code, 1);
  EXPECT_EQ(RunCliArgs({"--help"}).code, 0);
  const CliRun r = RunCliArgs({"perturb", "--tables", D("tables.json"), "--dataset", D("campus_dev.json"),
                               "--out", "/tmp/never.json"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--seed"), std::string::npos) << r.err;
}

TEST(CliTest, InputAndValidationExitCodes) {
  TempDir dir("cli_codes");
  EXPECT_EQ(RunCliArgs({"link", "--tables", D("missing.json"), "--dataset", D("campus_dev.json"), "--out",
                        dir / "x.jsonl"})
                .code,
            2);
  WriteJsonFile(dir / "bad_db.json", Json::array({{{"db_id", "nowhere"}, {"question", "q"}, {"query", "x"}}}));
  EXPECT_EQ(RunCliArgs({"link", "--tables", D("tables.json"), "--dataset", dir / "bad_db.json", "--out",
                        dir / "x.jsonl"})
                .code,
            4);
}

TEST(CliTest, EvaluateListsUnparseableAndMissing) {
  TempDir dir("cli_eval");
  const auto gold = LoadExamples(DataPath("campus_dev.json"));
  std::string preds = "{\"metadata\": {}}\n";
  for (std::size_t i = 0; i < 10; ++i) {
    const std::string sql = i == 3 ? "SELEKT" : i % 2 == 0 ? gold[i].query : "SELECT floors FROM building";
    preds += Json{{"index", i}, {"sql", sql}}.dump() + "\n";
  }
  for (std::size_t i = 10; i < 20; ++i) preds += Json{{"id", std::to_string(i)}, {"sql", gold[i].query}}.dump() + "\n";
  WriteFileAtomic(dir / "p.jsonl", preds);
  const CliRun r = RunCliArgs({"evaluate", "--tables", D("tables.json"), "--gold", D("campus_dev.json"),
                               "--predictions", dir / "p.jsonl", "--out", dir / "e.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json report = ReadJsonFile(dir / "e.json");
  EXPECT_EQ(report["accuracy"], 0.75);
  EXPECT_EQ(report["unparseable"].size(), 1u);
  EXPECT_EQ(report["unparseable"][0]["index"], 3);
  EXPECT_EQ(report["metadata"]["command"], "evaluate");
  EXPECT_TRUE(report["config"].contains("predictions"));
  EXPECT_EQ(report["metric"]["keywords_include_distinct"], true);
  EXPECT_EQ(Json::parse(r.out)["accuracy"], 0.75);
}

TEST(CliTest, PerturbBudgetZeroIsIdentity) {
  TempDir dir("cli_zero");
  const CliRun r = RunCliArgs({"perturb", "--tables", D("tables.json"), "--dataset", D("campus_dev.json"),
                               "--lexicon", D("campus_lexicon.json"), "--budget", "0", "--seed", "5", "--out",
                               dir / "p.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["edits"], 0);
  const Json out = ReadJsonFile(dir / "p.json");
  const Json in = ReadJsonFile(DataPath("campus_dev.json"));
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i]["question"], in[i]["question"]);
    EXPECT_EQ(out[i]["query"], in[i]["query"]);
  }
  EXPECT_EQ(ReadJsonFile(dir / "p.json.report.json")["metadata"]["seed"], 5);
}

TEST(CliTest, ConfigFileEnvAndFlagPrecedence) {
  TempDir dir("cli_layers");
  WriteJsonFile(dir / "cfg.json", {{"seed", 1},
                                   {"tables", D("tables.json")},
                                   {"perturb", {{"dataset", D("campus_dev.json")}, {"budget", 1}}}});
  auto run = [&](std::vector<std::string> extra) {
    std::vector<std::string> args = {"perturb", "--config", dir / "cfg.json", "--lexicon", D("campus_lexicon.json"),
                                     "--out", dir / "p.json"};
    args.insert(args.end(), extra.begin(), extra.end());
    const CliRun r = RunCliArgs(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return ReadJsonFile(dir / "p.json.report.json");
  };
  EXPECT_EQ(run({})["config"]["seed"], "1");
  EXPECT_EQ(run({})["config"]["budget"], "1");
  ::setenv("SQLROBUST_SEED", "2", 1);
  EXPECT_EQ(run({})["config"]["seed"], "2");
  EXPECT_EQ(run({"--seed", "3"})["config"]["seed"], "3");
  ::unsetenv("SQLROBUST_SEED");

  WriteJsonFile(dir / "bad.json", {{"perturb", {{"no_such_option", 1}}}});
  EXPECT_EQ(RunCliArgs({"perturb", "--config", dir / "bad.json"}).code, 1);
}

TEST(CliTest, MasAndLinkWriteJsonl) {
  TempDir dir("cli_mas");
  CliRun r = RunCliArgs({"mas", "--tables", D("tables.json"), "--annotations", D("campus_annotations.json"), "--db-id",
                         "campus", "--question", "Show the heading of every class.", "--out", dir / "m.jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = ReadJsonl(dir / "m.jsonl");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].contains("metadata"));
  EXPECT_EQ(rows[1]["selected"]["course"]["selected"], "class");
  EXPECT_EQ(rows[1]["schema"]["table_names"][1], "class");

  r = RunCliArgs({"link", "--tables", D("tables.json"), "--dataset", D("campus_dev.json"), "--jobs", "3", "--out",
                  dir / "l.jsonl"});
  ASSERT_EQ(r.code, 0) << r.err;
  rows = ReadJsonl(dir / "l.jsonl");
  ASSERT_EQ(rows.size(), 21u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i]["index"], i - 1);
}

TEST(CliTest, StatsAndReport) {
  TempDir dir("cli_stats");
  CliRun r = RunCliArgs({"stats", "--tables", D("tables.json"), "--cell-values", D("clinic_cells.json"), "--original",
                         D("diff_original.json"), "--modified", D("diff_modified.json"), "--out", dir / "s.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json s = ReadJsonFile(dir / "s.json");
  EXPECT_EQ(s["stats"]["modified_count"], 7);
  EXPECT_EQ(s["stats"]["cell_value_mods"], 1);
  r = RunCliArgs({"report", "--tables", D("tables.json"), "--original", D("diff_original.json"), "--modified",
                  D("diff_modified.json"), "--out", dir / "r.json", "--text-out", dir / "r.txt"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(ReadTextFile(dir / "r.txt").find("telephone"), std::string::npos);
  EXPECT_EQ(RunCliArgs({"stats", "--tables", D("tables.json"), "--original", D("diff_original.json"), "--modified",
                        D("campus_dev.json"), "--out", dir / "x.json"})
                .code,
            4);
}

TEST(CliTest, AttackUnreachablePredictorExitsThree) {
  TempDir dir("cli_attack");
  const CliRun r = RunCliArgs({"attack", "--tables", D("tables.json"), "--dataset", D("campus_dev.json"), "--lexicon",
                               D("campus_lexicon.json"), "--seed", "1", "--predictor", "http", "--predictor-url",
                               "http://127.0.0.1:9/predict", "--timeout-ms", "200", "--retries", "0",
                               "--log-level", "off", "--out", dir / "a.json"});
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST(CliTest, AttackArtifactsDeterministic) {
  TempDir dir("cli_det");
  auto run = [&](const std::string &tag, const char *jobs) {
    const CliRun r = RunCliArgs({"attack", "--tables", D("tables.json"), "--dataset", D("campus_dev.json"),
                                 "--lexicon", D("campus_lexicon.json"), "--seed", "9", "--jobs", jobs,
                                 "--augment-out", dir / (tag + ".aug.json"), "--out", dir / (tag + ".json")});
    EXPECT_EQ(r.code, 0) << r.err;
  };
  run("a", "1");
  run("b", "4");
  EXPECT_EQ(ReadTextFile(dir / "a.json"), ReadTextFile(dir / "b.json"));
  EXPECT_EQ(ReadTextFile(dir / "a.aug.json"), ReadTextFile(dir / "b.aug.json"));
  Json ra = StripMetadata(ReadJsonFile(dir / "a.json.report.json"));
  Json rb = StripMetadata(ReadJsonFile(dir / "b.json.report.json"));
  ra["config"].erase("jobs");
  rb["config"].erase("jobs");
  ra["attack"].erase("jobs");
  rb["attack"].erase("jobs");
  ra["config"].erase("out");
  rb["config"].erase("out");
  ra["config"].erase("augment-out");
  rb["config"].erase("augment-out");
  ra["augment"].erase("path");
  rb["augment"].erase("path");
  EXPECT_EQ(ra, rb);
  EXPECT_EQ(ra["success_rate"], 1.0);
}

}  // namespace
}  // namespace sqlrobust
