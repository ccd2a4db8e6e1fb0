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

#include <httplib.h>

#include <future>
#include <thread>

#include "sqlrobust/error.h"
#include "sqlrobust/eval.h"
#include "sqlrobust/predictor.h"
#include "sqlrobust/sql_parser.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

class PredictorTest : public ::testing::Test {
 protected:
  PredictorTest() : schemas_(FixtureSchemas()), dev_(LoadExamples(DataPath("campus_dev.json"))) {}
  SchemaMap schemas_;
  std::vector<Example> dev_;
};

TEST_F(PredictorTest, BaselineAnswersCampusFixture) {
  BaselinePredictor p(&schemas_, false);
  for (const Example &ex : dev_) {
    const SqlQuery pred = p.Predict(ex.db_id, ex.question);
    EXPECT_TRUE(ExactMatch(pred, ex.Gold(schemas_.at("campus")))) << ex.question;
  }
}

TEST_F(PredictorTest, BaselineHeuristics) {
  const DatabaseSchema &campus = schemas_.at("campus");
  const auto sql = [&](const char *q) { return Serialize(BaselineLexicalPredict(q, campus), campus); };
  EXPECT_EQ(sql("nothing relevant"), "SELECT count(*) FROM ledger");
  EXPECT_EQ(sql("How many course rows?"), "SELECT count(*) FROM course");
  EXPECT_EQ(sql("all instructor data"), "SELECT * FROM instructor");

  SchemaMap s = schemas_;
  AttachCellValueFile(s, ReadJsonFile(DataPath("clinic_cells.json")));
  const DatabaseSchema &clinic = s.at("clinic");
  EXPECT_EQ(Serialize(BaselineLexicalPredict("weight of each poodle", clinic), clinic),
            "SELECT weight FROM dog WHERE breed = 'poodle'");
}

TEST_F(PredictorTest, EchoNeedsSource) {
  EchoGoldPredictor echo;
  EXPECT_EQ(echo.PredictSql({"campus", "anything", &dev_[3]}), dev_[3].query);
  EXPECT_THROW(echo.PredictSql({"campus", "anything", nullptr}), ValidationError);
}

TEST_F(PredictorTest, PredictKeepsUnparseableText) {
  struct Fixed : Predictor {
    std::string PredictSql(const PredictRequest &) override { return "SELEC nonsense"; }
    Json Describe() const override { return {}; }
  } fixed;
  const Prediction p = Predict(fixed, {"campus", "q", nullptr}, schemas_.at("campus"));
  EXPECT_FALSE(p.parsed);
  EXPECT_EQ(p.sql, "SELEC nonsense");
  EXPECT_FALSE(p.parse_error.empty());
  EXPECT_FALSE(PredictionMatches(p, dev_[0].Gold(schemas_.at("campus"))));
}

TEST_F(PredictorTest, SubprocessServe) {
  SubprocessPredictor p({SQLROBUST_BIN, "serve", "--tables", DataPath("tables.json").string()},
                        std::chrono::milliseconds(10000));
  for (const Example &ex : {dev_[0], dev_[3]}) {
    const Prediction pr = Predict(p, {ex.db_id, ex.question, nullptr}, schemas_.at("campus"));
    EXPECT_TRUE(PredictionMatches(pr, ex.Gold(schemas_.at("campus")))) << pr.sql;
  }
  EXPECT_EQ(p.Describe()["kind"], "subprocess");
}

TEST_F(PredictorTest, SubprocessMatchesOutOfOrderAnswers) {
  // Reads two requests, answers them in reverse order, then echoes the rest.
  const char *script =
      "import json,sys\n"
      "a=json.loads(sys.stdin.readline()); b=json.loads(sys.stdin.readline())\n"
      "for r in (b,a):\n"
      "  print(json.dumps({'id':r['id'],'sql':'SELECT '+r['question']+' FROM course'}), flush=True)\n"
      "for line in sys.stdin:\n"
      "  r=json.loads(line); print(json.dumps({'id':r['id'],'sql':'x'}), flush=True)\n";
  SubprocessPredictor p({"python3", "-c", script}, std::chrono::milliseconds(10000));
  auto f1 = std::async(std::launch::async, [&] { return p.PredictSql({"campus", "title", nullptr}); });
  auto f2 = std::async(std::launch::async, [&] { return p.PredictSql({"campus", "credits", nullptr}); });
  EXPECT_EQ(f1.get(), "SELECT title FROM course");
  EXPECT_EQ(f2.get(), "SELECT credits FROM course");
}

TEST_F(PredictorTest, SubprocessFailures) {
  EXPECT_THROW(SubprocessPredictor({"/nonexistent/predictor"}, std::chrono::milliseconds(100)), TransportError);

  SubprocessPredictor silent({"sh", "-c", "cat > /dev/null"}, std::chrono::milliseconds(200));
  EXPECT_THROW(silent.PredictSql({"campus", "q", nullptr}), TransportError);

  SubprocessPredictor quits({"true"}, std::chrono::milliseconds(2000));
  EXPECT_THROW(quits.PredictSql({"campus", "q", nullptr}), TransportError);
  EXPECT_THROW(quits.PredictSql({"campus", "q", nullptr}), TransportError);

  SubprocessPredictor bad({"sh", "-c", "read l; echo '{\"id\": \"p0\"}'; cat > /dev/null"},
                          std::chrono::milliseconds(2000));
  EXPECT_THROW(bad.PredictSql({"campus", "q", nullptr}), ProtocolError);
}

TEST_F(PredictorTest, HttpTransport) {
  httplib::Server server;
  server.Post("/predict", [](const httplib::Request &req, httplib::Response &res) {
    const Json body = Json::parse(req.body);
    if (body["question"] == "fail") {
      res.status = 500;
      return;
    }
    res.set_content(Json{{"id", body["id"]}, {"sql", "SELECT title FROM course"}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  {
    HttpPredictor p("http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(2000), 2);
    EXPECT_EQ(p.PredictSql({"campus", "q", nullptr}), "SELECT title FROM course");
    EXPECT_THROW(p.PredictSql({"campus", "fail", nullptr}), TransportError);
  }
  server.stop();
  t.join();
  HttpPredictor dead("http://127.0.0.1:9", std::chrono::milliseconds(300), 1);
  EXPECT_THROW(dead.PredictSql({"campus", "q", nullptr}), TransportError);
}

}  // namespace
}  // namespace sqlrobust
