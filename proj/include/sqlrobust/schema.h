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

#ifndef SQLROBUST_SCHEMA_H_
#define SQLROBUST_SCHEMA_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlrobust/json_io.h"

namespace sqlrobust {

// Natural-language surface forms for one schema item: a default plus ordered
// synonyms. All phrases are stored normalized (see NormalizePhrase). The
// order is significant: it is the tie-break order for annotation selection.
class AnnotationSet {
 public:
  AnnotationSet() = default;

  // Throws ValidationError if the phrase normalizes to nothing. The star
  // column's "*" is kept verbatim.
  static AnnotationSet FromDefault(std::string_view phrase);

  const std::string &default_phrase() const { return default_; }
  const std::vector<std::string> &synonyms() const { return synonyms_; }

  // Default first, then synonyms in order.
  std::vector<std::string> All() const;
  std::size_t size() const { return 1 + synonyms_.size(); }

  bool Contains(std::string_view normalized_phrase) const;

  // Normalizes and appends. Returns false (and leaves the set unchanged) when
  // the phrase is already present. Throws ValidationError on empty phrases.
  bool Add(std::string_view phrase);

  bool operator==(const AnnotationSet &) const = default;

 private:
  std::string default_;
  std::vector<std::string> synonyms_;
};

enum class ColumnType { kText, kNumber, kTime, kBoolean, kOther };

std::string_view ColumnTypeName(ColumnType type);
ColumnType ParseColumnType(std::string_view name);

inline constexpr int kStarTable = -1;

struct Column {
  int id = 0;
  int table_id = kStarTable;
  std::string name;
  ColumnType type = ColumnType::kOther;
  AnnotationSet annotations;
  std::vector<std::string> cell_values;

  bool is_star() const { return table_id == kStarTable; }
  bool operator==(const Column &) const = default;
};

struct Table {
  int id = 0;
  std::string name;
  AnnotationSet annotations;
  std::vector<int> column_ids;

  bool operator==(const Table &) const = default;
};

// A table or a column, addressed by index into the owning schema.
struct SchemaItem {
  enum class Kind { kTable, kColumn };
  Kind kind = Kind::kTable;
  int id = 0;

  bool operator==(const SchemaItem &) const = default;
  auto operator<=>(const SchemaItem &) const = default;
};

struct DatabaseSchema {
  std::string db_id;
  std::vector<Table> tables;
  std::vector<Column> columns;
  std::vector<int> primary_keys;
  std::vector<std::pair<int, int>> foreign_keys;

  // Case-insensitive lookups; nullptr when absent.
  const Table *FindTable(std::string_view name) const;
  const Column *FindColumn(int table_id, std::string_view name) const;

  int star_column_id() const;

  const AnnotationSet &annotations(SchemaItem item) const;
  AnnotationSet &mutable_annotations(SchemaItem item);

  // "table" or "table.column" using original identifiers.
  std::string ItemPath(SchemaItem item) const;

  // Tables first, then non-star columns, in id order.
  std::vector<SchemaItem> Items() const;

  // Throws ValidationError naming db_id and the offending item.
  void Validate(bool strict_foreign_keys = true) const;

  bool operator==(const DatabaseSchema &) const = default;
};

using SchemaMap = std::map<std::string, DatabaseSchema>;

struct SchemaLoadOptions {
  // Spider contains a handful of self-referencing foreign keys; strict mode
  // rejects them.
  bool strict_foreign_keys = true;
};

// Parses one tables.json entry.
DatabaseSchema ParseSchema(const Json &entry, const SchemaLoadOptions &options = {});

std::vector<DatabaseSchema> ParseSchemas(const Json &array, const SchemaLoadOptions &options = {});

std::vector<DatabaseSchema> LoadSchemas(const std::filesystem::path &path,
                                        const SchemaLoadOptions &options = {});

// Emits the tables.json layout; human-readable names are the default
// annotations.
Json SerializeSchema(const DatabaseSchema &schema);
Json SerializeSchemas(const std::vector<DatabaseSchema> &schemas);

SchemaMap IndexSchemas(std::vector<DatabaseSchema> schemas);

// Extends annotation sets from {"table": [...], "table.column": [...]}.
// Phrases already present in a set are skipped so reapplying a file is a
// no-op; a phrase repeated within one list of the file is an error.
DatabaseSchema AttachAnnotations(DatabaseSchema schema, const Json &annotations);
DatabaseSchema AttachAnnotations(DatabaseSchema schema, const std::filesystem::path &path);

// Annotation files may also be keyed by db_id: {"db": {"table": [...]}}.
// A flat file is applied to every schema in the map that the file names
// items of; with more than one schema loaded, `db_id` selects the target.
void AttachAnnotationFile(SchemaMap &schemas, const Json &annotations,
                          const std::string &db_id = "");

inline constexpr std::size_t kDefaultCellValueCap = 1000;

// Loads cell-value samples from {"table.column": [value, ...]}, keeping at
// most `cap` per column.
DatabaseSchema AttachCellValues(DatabaseSchema schema, const Json &values,
                                std::size_t cap = kDefaultCellValueCap);

// Cell-value sidecars keyed by db_id, or flat when `db_id` is given.
void AttachCellValueFile(SchemaMap &schemas, const Json &values, const std::string &db_id = "",
                         std::size_t cap = kDefaultCellValueCap);

}  // namespace sqlrobust

#endif  // SQLROBUST_SCHEMA_H_
