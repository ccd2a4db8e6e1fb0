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

#include "sqlrobust/attack.h"
#include "sqlrobust/error.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

class AttackTest : public ::testing::Test {
 protected:
  AttackTest()
      : schemas_(FixtureSchemas()),
        lexicon_(SynonymLexicon::Load(DataPath("campus_lexicon.json"))),
        dev_(LoadExamples(DataPath("campus_dev.json"))) {
    providers_.lexicon = &lexicon_;
    providers_.order = {ProviderKind::kLexicon};
  }
  SchemaMap schemas_;
  SynonymLexicon lexicon_;
  std::vector<Example> dev_;
  ProviderSet providers_;
};

TEST_F(AttackTest, ConfigValidation) {
  AttackConfig c;
  c.k = 0;
  EXPECT_THROW(c.Validate(), UsageError);
  c.k = 1;
  c.max_edits = 0;
  EXPECT_THROW(c.Validate(), UsageError);
  EXPECT_EQ(ParseSpanRanking("linking"), SpanRanking::kLinkingScore);
  EXPECT_THROW(ParseSpanRanking("random"), UsageError);
}

TEST_F(AttackTest, BreaksBaselineOnSingleExample) {
  BaselinePredictor baseline(&schemas_, false);
  const AttackResult r = AttackExample(baseline, dev_[0], schemas_.at("campus"), providers_, AttackConfig{}, 1);
  EXPECT_TRUE(r.success);
  EXPECT_FALSE(r.pre_failed);
  EXPECT_EQ(r.final_question, "Show the heading of every course.");
  EXPECT_EQ(r.check_calls, 1u);
  EXPECT_EQ(r.verify_calls, 1u);
  // Two deletion probes, then one candidate.
  EXPECT_EQ(r.queries_used, 3u);
  EXPECT_EQ(r.plan.edits.size(), 1u);
}

TEST_F(AttackTest, LinkingRankingSkipsProbes) {
  BaselinePredictor baseline(&schemas_, false);
  AttackConfig c;
  c.ranking = SpanRanking::kLinkingScore;
  const AttackResult r = AttackExample(baseline, dev_[0], schemas_.at("campus"), providers_, c, 1);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.queries_used, 1u);
}

TEST_F(AttackTest, PreFailedExamplesCostNoQueries) {
  BaselinePredictor baseline(&schemas_, false);
  Example wrong = dev_[0];
  wrong.query = "SELECT salary FROM instructor";
  const AttackResult r = AttackExample(baseline, wrong, schemas_.at("campus"), providers_, AttackConfig{}, 1);
  EXPECT_TRUE(r.pre_failed);
  EXPECT_EQ(r.queries_used, 0u);
  EXPECT_EQ(r.final_question, wrong.question);
}

TEST_F(AttackTest, EchoCannotBeBroken) {
  EchoGoldPredictor echo;
  const Campaign c = GenerateWorstcaseSet(echo, dev_, schemas_, providers_, AttackConfig{});
  EXPECT_EQ(c.successes, 0u);
  EXPECT_EQ(c.attackable, dev_.size());
  for (std::size_t i = 0; i < dev_.size(); ++i) EXPECT_EQ(c.worstcase[i].question, dev_[i].question);
}

TEST_F(AttackTest, NondeterministicPredictorFlagged) {
  // Wrong on every other call: the re-verification disagrees with the trial.
  struct Flaky : Predictor {
    std::atomic<int> n{0};
    std::string PredictSql(const PredictRequest &r) override {
      return n.fetch_add(1) % 2 == 0 ? r.source->query : "SELECT salary FROM instructor";
    }
    Json Describe() const override { return {}; }
  } flaky;
  AttackConfig c;
  c.ranking = SpanRanking::kLinkingScore;
  const AttackResult r = AttackExample(flaky, dev_[0], schemas_.at("campus"), providers_, c, 1);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.nondeterministic);
}

TEST_F(AttackTest, TransportRetriesCountedAndAllFailedThrows) {
  struct Down : Predictor {
    std::atomic<int> calls{0};
    std::string PredictSql(const PredictRequest &) override {
      ++calls;
      throw TransportError("down");
    }
    Json Describe() const override { return {}; }
  } down;
  AttackConfig c;
  c.retries = 2;
  EXPECT_THROW(GenerateWorstcaseSet(down, dev_, schemas_, providers_, c), TransportError);
  EXPECT_EQ(down.calls.load(), 3 * static_cast<int>(dev_.size()));
}

TEST_F(AttackTest, ReportAndAugment) {
  BaselinePredictor baseline(&schemas_, false);
  std::vector<Example> data(dev_.begin(), dev_.begin() + 4);
  const Campaign c = GenerateWorstcaseSet(baseline, data, schemas_, providers_, AttackConfig{});
  const Json report = c.Report();
  EXPECT_EQ(report["success_rate"], 1.0);
  EXPECT_EQ(report["per_example"].size(), 4u);
  EXPECT_EQ(report["per_example"][0]["edits"].size(), 1u);
  std::vector<Example> adversarial;
  for (std::size_t i = 0; i < data.size(); ++i) adversarial.push_back(c.worstcase[i]);
  adversarial.push_back(c.worstcase[0]);
  const auto augmented = AdversarialAugment(data, adversarial);
  EXPECT_EQ(augmented.size(), 8u);
  EXPECT_EQ(augmented[4].query, data[0].query);
}

}  // namespace
}  // namespace sqlrobust
