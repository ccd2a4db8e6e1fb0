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

#include "sqlrobust/error.h"
#include "sqlrobust/json_io.h"
#include "sqlrobust/sql_ir.h"
#include "sqlrobust/sql_parser.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

class SqlTest : public ::testing::Test {
 protected:
  SqlTest() : schemas_(FixtureSchemas()), pets_(schemas_.at("pets_1")) {}
  SchemaMap schemas_;
  const DatabaseSchema &pets_;
};

TEST_F(SqlTest, BindsColumnsByIndex) {
  const SqlQuery q = ParseSql("SELECT max(weight), PetType FROM Pets GROUP BY PetType", pets_);
  ASSERT_EQ(q.select.size(), 2u);
  EXPECT_EQ(q.select[0].agg, AggOp::kMax);
  EXPECT_EQ(q.select[0].column_id, 14);
  EXPECT_EQ(q.select[1].column_id, 12);
  EXPECT_EQ(q.from_tables, std::vector<int>{2});
  ASSERT_EQ(q.group_by.size(), 1u);
  EXPECT_EQ(q.group_by[0].column_id, 12);
}

TEST_F(SqlTest, CaseAndAliasesDoNotMatter) {
  const SqlQuery a = Canonicalize(ParseSql(
      "select t1.fname from student as t1 join has_pet as t2 on t1.stuid = t2.stuid where t1.age > 20", pets_));
  const SqlQuery b = Canonicalize(ParseSql(
      "SELECT S.Fname FROM Has_Pet AS H JOIN Student AS S ON H.StuID = S.StuID WHERE S.Age > 20", pets_));
  EXPECT_EQ(a, b);
}

TEST_F(SqlTest, LiteralsKeptVerbatim) {
  const SqlQuery q = ParseSql("SELECT Fname FROM Student WHERE LName = 'O''Brien' AND Age < 3.5", pets_);
  ASSERT_TRUE(q.where);
  const auto &lit = std::get<Literal>(q.where->conditions[0].right);
  EXPECT_EQ(lit.text, "O'Brien");
  EXPECT_EQ(lit.kind, Literal::Kind::kString);
  EXPECT_EQ(std::get<Literal>(q.where->conditions[1].right).kind, Literal::Kind::kNumber);
  EXPECT_EQ(Serialize(q, pets_), "SELECT Fname FROM Student WHERE LName = 'O''Brien' AND Age < 3.5");
}

TEST_F(SqlTest, NestedAndSetOperations) {
  const SqlQuery q = ParseSql(
      "SELECT Fname FROM Student WHERE StuID IN (SELECT StuID FROM Has_Pet) "
      "EXCEPT SELECT Fname FROM Student WHERE Age > 20",
      pets_);
  ASSERT_TRUE(q.set_op);
  EXPECT_EQ(q.set_op->kind, SetOpKind::kExcept);
  ASSERT_TRUE(q.where);
  EXPECT_TRUE(std::holds_alternative<Box<SqlQuery>>(q.where->conditions[0].right));
}

TEST_F(SqlTest, StructuralKeyIgnoresValuesOnly) {
  const auto key = [&](const char *s) { return StructuralKey(Canonicalize(ParseSql(s, pets_))); };
  EXPECT_EQ(key("SELECT Fname FROM Student WHERE Age > 20 LIMIT 3"),
            key("SELECT Fname FROM Student WHERE Age > 99 LIMIT 1"));
  EXPECT_NE(key("SELECT Fname FROM Student WHERE Age > 20"), key("SELECT Fname FROM Student WHERE Age < 20"));
  EXPECT_NE(key("SELECT Fname FROM Student"), key("SELECT DISTINCT Fname FROM Student"));
}

TEST_F(SqlTest, CanonicalizeIsIdempotent) {
  const SqlQuery q = ParseSql(
      "SELECT T1.Fname FROM Pets AS T3 JOIN Has_Pet AS T2 ON T3.PetID = T2.PetID JOIN Student AS T1 "
      "ON T2.StuID = T1.StuID",
      pets_);
  const SqlQuery once = Canonicalize(q);
  EXPECT_EQ(Canonicalize(once), once);
  EXPECT_EQ(once.from_tables, (std::vector<int>{0, 1, 2}));
}

TEST_F(SqlTest, ValidateAgainstSchemaCatchesBadIndices) {
  SqlQuery q = ParseSql("SELECT Fname FROM Student", pets_);
  q.select[0].column_id = 99;
  EXPECT_THROW(ValidateAgainstSchema(q, pets_), SqlError);
  q.select[0].column_id = 0;
  q.select[0].agg = AggOp::kMax;
  EXPECT_THROW(ValidateAgainstSchema(q, pets_), SqlError);
}

TEST_F(SqlTest, CorpusRoundTrips) {
  const Json corpus = ReadJsonFile(DataPath("sql_corpus.json"));
  ASSERT_GE(corpus.size(), 200u);
  for (const Json &row : corpus) {
    const DatabaseSchema &schema = schemas_.at(row["db_id"].get<std::string>());
    const std::string text = row["query"];
    const SqlQuery canon = Canonicalize(ParseSql(text, schema));
    const std::string serialized = Serialize(canon, schema);
    const SqlQuery again = Canonicalize(ParseSql(serialized, schema));
    EXPECT_EQ(again, canon) << text;
    EXPECT_EQ(Serialize(again, schema), serialized) << text;
  }
}

TEST_F(SqlTest, NegativeCorpusRaisesTypedErrors) {
  const Json corpus = ReadJsonFile(DataPath("sql_negative.json"));
  const std::map<std::string, SqlError::Kind> kinds = {
      {"lexical", SqlError::Kind::kLexical},
      {"syntax", SqlError::Kind::kSyntax},
      {"unknown_table", SqlError::Kind::kUnknownTable},
      {"unknown_column", SqlError::Kind::kUnknownColumn},
      {"unsupported", SqlError::Kind::kUnsupported},
  };
  for (const Json &row : corpus) {
    const std::string text = row["query"];
    try {
      ParseSql(text, schemas_.at(row["db_id"].get<std::string>()));
      ADD_FAILURE() << "accepted: " << text;
    } catch (const SqlError &e) {
      EXPECT_EQ(e.kind(), kinds.at(row["kind"].get<std::string>())) << text << ": " << e.what();
      EXPECT_LE(e.offset(), text.size()) << text;
    }
  }
}

TEST_F(SqlTest, SyntaxCheckedBeforeBinding) {
  try {
    ParseSql("SELECT Nope FROM Nowhere WHERE", pets_);
    FAIL();
  } catch (const SqlError &e) {
    EXPECT_EQ(e.kind(), SqlError::Kind::kSyntax);
  }
}

}  // namespace
}  // namespace sqlrobust
