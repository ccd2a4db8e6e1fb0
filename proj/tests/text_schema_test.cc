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
#include "sqlrobust/schema.h"
#include "sqlrobust/text.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

TEST(TextTest, TokenizeSplitsWordsAndPunctuation) {
  const auto tokens = Tokenize("How many dogs, in 2019?");
  ASSERT_EQ(tokens.size(), 7u);
  EXPECT_EQ(tokens[0].norm, "how");
  EXPECT_EQ(tokens[3].surface, ",");
  EXPECT_FALSE(tokens[3].is_word);
  EXPECT_TRUE(tokens[5].is_word);
  EXPECT_EQ(tokens[5].norm, "2019");
}

TEST(TextTest, DetokenizeRestoresOriginal) {
  for (const char *s : {"What is the pet's weight?", "a,b;c", ""}) {
    EXPECT_EQ(Detokenize(Tokenize(s)), s);
  }
  // Runs of whitespace collapse to one space.
  EXPECT_EQ(Detokenize(Tokenize("  two  spaces ")), "two spaces");
}

TEST(TextTest, NormalizePhraseIsFixedPoint) {
  EXPECT_EQ(NormalizePhrase("Pet_Type"), "pet type");
  EXPECT_EQ(NormalizePhrase("  City  Code "), "city code");
  const std::string once = NormalizePhrase("Hello, World!");
  EXPECT_EQ(NormalizePhrase(once), once);
}

TEST(TextTest, ReservedWords) {
  for (const char *w : {"id", "age", "name", "year"}) EXPECT_TRUE(IsReservedWord(w));
  EXPECT_FALSE(IsReservedWord("weight"));
  EXPECT_TRUE(ContainsReservedWord("pet age"));
  EXPECT_FALSE(ContainsReservedWord("pet type"));
}

TEST(AnnotationSetTest, DefaultFirstAndNoDuplicates) {
  AnnotationSet set = AnnotationSet::FromDefault("Pet Type");
  EXPECT_EQ(set.default_phrase(), "pet type");
  EXPECT_TRUE(set.Add("Animal Kind"));
  EXPECT_FALSE(set.Add("animal   kind"));
  EXPECT_EQ(set.All(), (std::vector<std::string>{"pet type", "animal kind"}));
  EXPECT_THROW(set.Add("  ,"), ValidationError);
}

TEST(SchemaTest, LoadsFixture) {
  const SchemaMap schemas = FixtureSchemas();
  ASSERT_EQ(schemas.count("pets_1"), 1u);
  const DatabaseSchema &pets = schemas.at("pets_1");
  EXPECT_EQ(pets.tables.size(), 3u);
  EXPECT_EQ(pets.columns.size(), 15u);
  EXPECT_TRUE(pets.columns[0].is_star());
  ASSERT_NE(pets.FindTable("has_pet"), nullptr);
  EXPECT_EQ(pets.FindTable("has_pet")->id, 1);
  ASSERT_NE(pets.FindColumn(2, "PETTYPE"), nullptr);
  EXPECT_EQ(pets.ItemPath({SchemaItem::Kind::kColumn, 12}), "Pets.PetType");
  EXPECT_EQ(pets.annotations({SchemaItem::Kind::kColumn, 12}).default_phrase(), "pet type");
}

TEST(SchemaTest, SerializeRoundTrips) {
  const SchemaMap schemas = FixtureSchemas();
  for (const auto &[db, schema] : schemas) {
    EXPECT_EQ(ParseSchema(SerializeSchema(schema)), schema) << db;
  }
}

TEST(SchemaTest, RejectsBrokenEntries) {
  Json entry = SerializeSchema(FixtureSchemas().at("clinic"));
  Json bad = entry;
  bad["column_types"].erase(bad["column_types"].begin());
  EXPECT_THROW(ParseSchema(bad), Error);

  bad = entry;
  bad["foreign_keys"] = Json::array({Json::array({7, 99})});
  EXPECT_THROW(ParseSchema(bad), ValidationError);

  bad = entry;
  bad["foreign_keys"] = Json::array({Json::array({6, 5})});
  EXPECT_THROW(ParseSchema(bad), ValidationError);
  SchemaLoadOptions lenient;
  lenient.strict_foreign_keys = false;
  EXPECT_NO_THROW(ParseSchema(bad, lenient));

  bad = entry;
  bad.erase("db_id");
  EXPECT_THROW(ParseSchema(bad), InputError);
}

TEST(SchemaTest, AttachAnnotationsIsIdempotent) {
  DatabaseSchema campus = FixtureSchemas().at("campus");
  const Json file = ReadJsonFile(DataPath("campus_annotations.json"));
  DatabaseSchema once = AttachAnnotations(campus, file);
  DatabaseSchema twice = AttachAnnotations(once, file);
  EXPECT_EQ(once, twice);
  const Table *course = once.FindTable("course");
  ASSERT_NE(course, nullptr);
  EXPECT_EQ(course->annotations.All(), (std::vector<std::string>{"course", "class"}));

  EXPECT_THROW(AttachAnnotations(campus, Json{{"nowhere", {"x"}}}), ValidationError);
  EXPECT_THROW(AttachAnnotations(campus, Json{{"course", {"lesson", "lesson"}}}), ValidationError);
}

TEST(SchemaTest, FlatAnnotationFileNeedsTargetWithSeveralSchemas) {
  SchemaMap schemas = FixtureSchemas();
  const Json file = ReadJsonFile(DataPath("campus_annotations.json"));
  EXPECT_THROW(AttachAnnotationFile(schemas, file), Error);
  AttachAnnotationFile(schemas, file, "campus");
  EXPECT_TRUE(schemas.at("campus").FindTable("instructor")->annotations.Contains("lecturer"));
  AttachAnnotationFile(schemas, Json{{"clinic", {{"dog", {"hound"}}}}});
  EXPECT_TRUE(schemas.at("clinic").FindTable("dog")->annotations.Contains("hound"));
}

TEST(SchemaTest, CellValuesAreCapped) {
  DatabaseSchema clinic = FixtureSchemas().at("clinic");
  clinic = AttachCellValues(clinic, Json{{"dog.breed", {"poodle", "beagle", "collie"}}}, 2);
  EXPECT_EQ(clinic.columns[5].cell_values, (std::vector<std::string>{"poodle", "beagle"}));
}

TEST(JsonIoTest, AtomicWriteReplacesFile) {
  testing::TempDir dir("jsonio");
  const std::string path = dir / "x.json";
  WriteJsonFile(path, Json{{"a", 1}});
  WriteJsonFile(path, Json{{"a", 2}});
  EXPECT_EQ(ReadJsonFile(path)["a"], 2);
  EXPECT_THROW(ReadJsonFile(dir / "missing.json"), InputError);
  WriteFileAtomic(dir / "bad.json", "{nope");
  EXPECT_THROW(ReadJsonFile(dir / "bad.json"), InputError);
}

}  // namespace
}  // namespace sqlrobust
