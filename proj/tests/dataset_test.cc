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

#include "sqlrobust/dataset.h"
#include "sqlrobust/error.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

SchemaMap ClinicSchemas() {
  SchemaMap s = FixtureSchemas();
  AttachCellValueFile(s, ReadJsonFile(DataPath("clinic_cells.json")));
  return s;
}

TEST(ExamplesTest, LoadsAndReportsBadRows) {
  EXPECT_EQ(LoadExamples(DataPath("campus_dev.json")).size(), 20u);
  EXPECT_TRUE(ParseExamples(Json::array()).empty());
  const Json rows = Json::parse(R"([
    {"db_id": "a", "question": "q", "query": "SELECT 1"},
    {"db_id": "a", "question": "q"},
    7
  ])");
  std::vector<RowError> errors;
  EXPECT_EQ(ParseExamples(rows, &errors).size(), 1u);
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_EQ(errors[0].index, 1u);
  EXPECT_EQ(errors[1].index, 2u);
  try {
    ParseExamples(rows);
    FAIL();
  } catch (const InputError &e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseExamples(Json::object()), InputError);
}

TEST(ExamplesTest, GoldParsedLazilyAndCached) {
  const SchemaMap s = FixtureSchemas();
  const Example ex{"campus", "q", "SELECT title FROM course"};
  const SqlQuery *first = &ex.Gold(s.at("campus"));
  EXPECT_EQ(first, &ex.Gold(s.at("campus")));
  const Example bad{"campus", "q", "SELECT nope FROM course"};
  EXPECT_THROW(bad.Gold(s.at("campus")), SqlError);
  EXPECT_THROW(CheckDatabases({Example{"nowhere", "q", "x"}}, s), ValidationError);
}

TEST(AlignTest, SingleSubstitution) {
  const auto edits = AlignQuestions("What is the phone of each owner?", "What is the telephone of each owner?");
  ASSERT_EQ(edits.size(), 1u);
  EXPECT_EQ(edits[0].original, "phone");
  EXPECT_EQ(edits[0].replacement, "telephone");
  EXPECT_EQ(edits[0].orig_begin, 3u);
  EXPECT_EQ(edits[0].orig_end, 4u);
}

TEST(AlignTest, AdjacentTokensMergeAndSeparateEditsStaySeparate) {
  auto edits = AlignQuestions("show the dog breed now", "show the canine kind now");
  ASSERT_EQ(edits.size(), 1u);
  EXPECT_EQ(edits[0].original, "dog breed");
  edits = AlignQuestions("the dog and the owner", "the hound and the keeper");
  EXPECT_EQ(edits.size(), 2u);
  EXPECT_TRUE(AlignQuestions("same text", "same text").empty());
}

TEST(AlignTest, ClassifiesEdits) {
  const SchemaMap s = ClinicSchemas();
  const DatabaseSchema &clinic = s.at("clinic");
  auto classify = [&](const char *a, const char *b) {
    const auto edits = AlignQuestions(a, b);
    EXPECT_EQ(edits.size(), 1u);
    return ClassifyEdit(edits.at(0), a, clinic);
  };
  EXPECT_EQ(classify("List every phone.", "List every telephone."), EditClass::kSchemaWord);
  EXPECT_EQ(classify("List dogs of breed poodle.", "List dogs of breed doodle."), EditClass::kCellValue);
  EXPECT_EQ(classify("List every dog please.", "List every dog now."), EditClass::kUnclassified);
  EXPECT_EQ(classify("List every dog.", "List every big dog."), EditClass::kUnclassified);
}

TEST(DiffTest, FixtureNumbers) {
  const SchemaMap s = ClinicSchemas();
  const auto a = LoadExamples(DataPath("diff_original.json"));
  const auto b = LoadExamples(DataPath("diff_modified.json"));
  const DiffResult r = ComputeDiff(a, b, s);
  EXPECT_EQ(r.stats.corpus_size, 10u);
  EXPECT_EQ(r.stats.modified_count, 7u);
  EXPECT_EQ(r.stats.total_edits, 7u);
  EXPECT_DOUBLE_EQ(r.stats.mean_changes_per_question, 0.7);
  EXPECT_EQ(r.stats.schema_word_mods, 6u);
  EXPECT_EQ(r.stats.cell_value_mods, 1u);
  EXPECT_EQ(r.stats.unclassified_mods, 0u);
  EXPECT_EQ(r.stats.distinct_replacement_words, 5u);
  EXPECT_EQ(r.stats.distinct_replacement_phrases, 0u);
  EXPECT_DOUBLE_EQ(r.stats.per_domain_mean_modified, 5.0);
  EXPECT_EQ(r.report.Count("clinic", "phone", "telephone"), 3u);
  EXPECT_EQ(r.report.DistinctPairs().size(), 5u);
}

TEST(DiffTest, IdenticalCorporaGiveZeros) {
  const SchemaMap s = ClinicSchemas();
  const auto a = LoadExamples(DataPath("diff_original.json"));
  const DiffResult r = ComputeDiff(a, a, s);
  EXPECT_EQ(r.stats.modified_count, 0u);
  EXPECT_EQ(r.stats.total_edits, 0u);
  EXPECT_DOUBLE_EQ(r.stats.mean_changes_per_question, 0.0);
  EXPECT_TRUE(r.report.empty());
}

TEST(DiffTest, MisalignedCorporaRejected) {
  const SchemaMap s = ClinicSchemas();
  auto a = LoadExamples(DataPath("diff_original.json"));
  auto b = a;
  b.pop_back();
  EXPECT_THROW(ComputeDiff(a, b, s), ValidationError);
  b = a;
  b[2].db_id = "pets_1";
  EXPECT_THROW(ComputeDiff(a, b, s), ValidationError);
}

TEST(DiffTest, ReportHoldsNoQuestionText) {
  const SchemaMap s = ClinicSchemas();
  const DiffResult r =
      ComputeDiff(LoadExamples(DataPath("diff_original.json")), LoadExamples(DataPath("diff_modified.json")), s);
  const std::string dumped = r.report.ToJson().dump() + r.report.ToText();
  EXPECT_EQ(dumped.find("owner?"), std::string::npos);
  EXPECT_NE(r.report.ToText().find("telephone"), std::string::npos);
}

TEST(SplitOverlapTest, Cases) {
  SubstitutionReport train, dev, other;
  train.Add("a", "phone", "telephone");
  train.Add("a", "city", "town");
  dev.Add("b", "phone", "telephone");
  other.Add("c", "dog", "hound");
  SplitOverlap o = ComputeSplitOverlap(train, dev);
  EXPECT_EQ(o.shared, 1u);
  EXPECT_DOUBLE_EQ(o.dev_fraction, 1.0);
  o = ComputeSplitOverlap(train, other);
  EXPECT_EQ(o.shared, 0u);
  EXPECT_DOUBLE_EQ(o.dev_fraction, 0.0);
  o = ComputeSplitOverlap(train, SubstitutionReport{});
  EXPECT_DOUBLE_EQ(o.dev_fraction, 0.0);
}

}  // namespace
}  // namespace sqlrobust
