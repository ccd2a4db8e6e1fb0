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

#include <set>

#include "sqlrobust/error.h"
#include "sqlrobust/perturb.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

class PerturbTest : public ::testing::Test {
 protected:
  PerturbTest()
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

TEST_F(PerturbTest, SpansSkipReservedWords) {
  const LinkedQuestion l = Link("What is the pet age and weight of each pet?", schemas_.at("pets_1"));
  const auto spans = FindSubstitutableSpans(l);
  for (const auto &s : spans) EXPECT_FALSE(ContainsReservedWord(s.phrase)) << s.phrase;
  ASSERT_FALSE(spans.empty());
  EXPECT_EQ(spans[0].phrase, "weight");
}

TEST_F(PerturbTest, UniformIndexInRangeAndSeedDerivationStable) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(UniformIndex(rng, 7), 7u);
  EXPECT_EQ(DeriveSeed(5, 3), DeriveSeed(5, 3));
  EXPECT_NE(DeriveSeed(5, 3), DeriveSeed(5, 4));
  EXPECT_NE(DeriveSeed(5, 3), DeriveSeed(6, 3));
}

TEST_F(PerturbTest, BudgetBoundsEdits) {
  const DatabaseSchema &campus = schemas_.at("campus");
  const LinkedQuestion l = Link(dev_[1].question, campus);
  for (std::size_t budget : {0, 1, 2, 9}) {
    const SubstitutionPlan plan = PlanSubstitutions(l, "campus", campus, providers_, budget, 11);
    EXPECT_EQ(plan.edits.size(), std::min<std::size_t>(budget, 3));
  }
}

TEST_F(PerturbTest, ApplyPlanKeepsRestOfQuestion) {
  const DatabaseSchema &campus = schemas_.at("campus");
  const LinkedQuestion l = Link(dev_[0].question, campus);
  const SubstitutionPlan plan = PlanSubstitutions(l, "campus", campus, providers_, 5, 1);
  const PerturbedExample p = ApplyPlan(dev_[0], plan);
  EXPECT_EQ(p.perturbed_question, "Show the heading of every class.");
  EXPECT_EQ(p.AsExample().query, dev_[0].query);
  EXPECT_EQ(ApplyPlan(dev_[0], {}).perturbed_question, dev_[0].question);
}

TEST_F(PerturbTest, LeadingCapitalCarriedOver) {
  Example ex{"campus", "Instructor salary please", "SELECT salary FROM instructor"};
  const LinkedQuestion l = Link(ex.question, schemas_.at("campus"));
  const SubstitutionPlan plan = PlanSubstitutions(l, "campus", schemas_.at("campus"), providers_, 5, 1);
  EXPECT_EQ(ApplyPlan(ex, plan).perturbed_question, "Lecturer pay please");
}

TEST_F(PerturbTest, OverlappingEditsRejected) {
  SubstitutionPlan plan;
  plan.edits.push_back(Edit{0, 2, "a b", "x"});
  plan.edits.push_back(Edit{1, 3, "b c", "y"});
  EXPECT_THROW(ApplyPlan(dev_[0], plan), ValidationError);
  plan.edits = {Edit{5, 40, "x", "y"}};
  EXPECT_THROW(ApplyPlan(dev_[0], plan), ValidationError);
}

TEST_F(PerturbTest, LongReplacementsTruncated) {
  SynonymLexicon lex;
  lex.Add("campus", "salary", {"the amount of money paid every single month"});
  ProviderSet set;
  set.lexicon = &lex;
  set.order = {ProviderKind::kLexicon};
  const LinkedQuestion l = Link("What salary?", schemas_.at("campus"));
  const SubstitutionPlan plan = PlanSubstitutions(l, "campus", schemas_.at("campus"), set, 1, 1);
  ASSERT_EQ(plan.edits.size(), 1u);
  EXPECT_TRUE(plan.edits[0].truncated);
  EXPECT_EQ(plan.edits[0].replacement, "the amount of money paid");
}

TEST_F(PerturbTest, DatasetDeterministicAcrossJobs) {
  SynOptions one{2, 42, 1}, many{2, 42, 4};
  const SynResult a = GenerateSynDataset(dev_, schemas_, providers_, one);
  const SynResult b = GenerateSynDataset(dev_, schemas_, providers_, many);
  ASSERT_EQ(a.examples.size(), dev_.size());
  for (std::size_t i = 0; i < dev_.size(); ++i) {
    EXPECT_EQ(a.examples[i].ToJson(&schemas_.at("campus")), b.examples[i].ToJson(&schemas_.at("campus")));
    EXPECT_EQ(a.examples[i].original.query, dev_[i].query);
  }
  EXPECT_EQ(a.Summary(), b.Summary());
  EXPECT_EQ(a.report.ToJson(), b.report.ToJson());
  EXPECT_EQ(a.total_edits, 33u);
}

TEST_F(PerturbTest, UnknownDatabasePassesThrough) {
  std::vector<Example> data = {Example{"nowhere", "q", "SELECT 1"}};
  const SynResult r = GenerateSynDataset(data, schemas_, providers_, SynOptions{1, 1, 1});
  EXPECT_EQ(r.errors, 1u);
  EXPECT_EQ(r.examples[0].perturbed_question, "q");
  EXPECT_FALSE(r.examples[0].error.empty());
}

}  // namespace
}  // namespace sqlrobust
