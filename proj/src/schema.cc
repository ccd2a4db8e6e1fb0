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

#include "sqlrobust/schema.h"

#include <algorithm>
#include <set>

#include "sqlrobust/error.h"
#include "sqlrobust/text.h"

namespace sqlrobust {
namespace {

std::string Describe(const DatabaseSchema &schema) { return "database '" + schema.db_id + "'"; }

const Json &RequireField(const Json &entry, const char *field, const std::string &where) {
  auto it = entry.find(field);
  if (it == entry.end()) throw InputError(where + ": missing field '" + field + "'");
  return *it;
}

int AsIndex(const Json &value, const std::string &where) {
  if (!value.is_number_integer()) throw InputError(where + ": expected an integer index");
  return value.get<int>();
}

void FlattenKeys(const Json &value, std::vector<int> &out, const std::string &where) {
  if (value.is_array()) {
    for (const Json &v : value) FlattenKeys(v, out, where);
  } else {
    out.push_back(AsIndex(value, where));
  }
}

std::string CheckedPhrase(const Json &value, const std::string &where) {
  if (!value.is_string()) throw InputError(where + ": expected a string phrase");
  return value.get<std::string>();
}

}  // namespace

AnnotationSet AnnotationSet::FromDefault(std::string_view phrase) {
  AnnotationSet set;
  if (phrase == "*") {
    set.default_ = "*";
    return set;
  }
  set.default_ = NormalizePhrase(phrase);
  if (set.default_.empty()) {
    throw ValidationError("annotation '" + std::string(phrase) + "' normalizes to an empty phrase");
  }
  return set;
}

std::vector<std::string> AnnotationSet::All() const {
  std::vector<std::string> all;
  all.reserve(size());
  all.push_back(default_);
  all.insert(all.end(), synonyms_.begin(), synonyms_.end());
  return all;
}

bool AnnotationSet::Contains(std::string_view normalized_phrase) const {
  if (default_ == normalized_phrase) return true;
  return std::find(synonyms_.begin(), synonyms_.end(), normalized_phrase) != synonyms_.end();
}

bool AnnotationSet::Add(std::string_view phrase) {
  std::string normalized = NormalizePhrase(phrase);
  if (normalized.empty()) {
    throw ValidationError("annotation '" + std::string(phrase) + "' normalizes to an empty phrase");
  }
  if (Contains(normalized)) return false;
  synonyms_.push_back(std::move(normalized));
  return true;
}

std::string_view ColumnTypeName(ColumnType type) {
  switch (type) {
    case ColumnType::kText: return "text";
    case ColumnType::kNumber: return "number";
    case ColumnType::kTime: return "time";
    case ColumnType::kBoolean: return "boolean";
    case ColumnType::kOther: return "others";
  }
  return "others";
}

ColumnType ParseColumnType(std::string_view name) {
  const std::string lower = ToLower(name);
  if (lower == "text") return ColumnType::kText;
  if (lower == "number") return ColumnType::kNumber;
  if (lower == "time") return ColumnType::kTime;
  if (lower == "boolean") return ColumnType::kBoolean;
  return ColumnType::kOther;
}

const Table *DatabaseSchema::FindTable(std::string_view name) const {
  const std::string lower = ToLower(name);
  for (const Table &table : tables) {
    if (ToLower(table.name) == lower) return &table;
  }
  return nullptr;
}

const Column *DatabaseSchema::FindColumn(int table_id, std::string_view name) const {
  if (table_id < 0 || table_id >= static_cast<int>(tables.size())) return nullptr;
  const std::string lower = ToLower(name);
  for (int id : tables[table_id].column_ids) {
    if (ToLower(columns[id].name) == lower) return &columns[id];
  }
  return nullptr;
}

int DatabaseSchema::star_column_id() const {
  for (const Column &column : columns) {
    if (column.is_star()) return column.id;
  }
  return -1;
}

const AnnotationSet &DatabaseSchema::annotations(SchemaItem item) const {
  return item.kind == SchemaItem::Kind::kTable ? tables.at(item.id).annotations
                                               : columns.at(item.id).annotations;
}

AnnotationSet &DatabaseSchema::mutable_annotations(SchemaItem item) {
  return item.kind == SchemaItem::Kind::kTable ? tables.at(item.id).annotations
                                               : columns.at(item.id).annotations;
}

std::string DatabaseSchema::ItemPath(SchemaItem item) const {
  if (item.kind == SchemaItem::Kind::kTable) return tables.at(item.id).name;
  const Column &column = columns.at(item.id);
  if (column.is_star()) return "*";
  return tables.at(column.table_id).name + "." + column.name;
}

std::vector<SchemaItem> DatabaseSchema::Items() const {
  std::vector<SchemaItem> items;
  for (const Table &table : tables) items.push_back({SchemaItem::Kind::kTable, table.id});
  for (const Column &column : columns) {
    if (!column.is_star()) items.push_back({SchemaItem::Kind::kColumn, column.id});
  }
  return items;
}

void DatabaseSchema::Validate(bool strict_foreign_keys) const {
  const std::string where = Describe(*this);
  int stars = 0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const Column &column = columns[i];
    if (column.id != static_cast<int>(i)) {
      throw ValidationError(where + ": column index mismatch at " + std::to_string(i));
    }
    if (column.is_star()) {
      ++stars;
      continue;
    }
    if (column.table_id < 0 || column.table_id >= static_cast<int>(tables.size())) {
      throw ValidationError(where + ": column '" + column.name + "' references table index " +
                            std::to_string(column.table_id));
    }
  }
  if (stars != 1) {
    throw ValidationError(where + ": expected exactly one star column, found " +
                          std::to_string(stars));
  }

  std::set<std::string> table_names;
  for (const Table &table : tables) {
    if (!table_names.insert(ToLower(table.name)).second) {
      throw ValidationError(where + ": duplicate table name '" + table.name + "'");
    }
    std::set<std::string> column_names;
    for (int id : table.column_ids) {
      if (!column_names.insert(ToLower(columns[id].name)).second) {
        throw ValidationError(where + ": duplicate column '" + table.name + "." +
                              columns[id].name + "'");
      }
    }
  }

  for (SchemaItem item : Items()) {
    const AnnotationSet &set = annotations(item);
    if (set.default_phrase().empty()) {
      throw ValidationError(where + ": empty default annotation for '" + ItemPath(item) + "'");
    }
    std::set<std::string> seen;
    for (const std::string &phrase : set.All()) {
      if (phrase.empty() || !seen.insert(phrase).second) {
        throw ValidationError(where + ": invalid or duplicate annotation '" + phrase +
                              "' for '" + ItemPath(item) + "'");
      }
    }
  }

  const int n = static_cast<int>(columns.size());
  for (int key : primary_keys) {
    if (key < 0 || key >= n || columns[key].is_star()) {
      throw ValidationError(where + ": primary key references invalid column " +
                            std::to_string(key));
    }
  }
  for (const auto &[from, to] : foreign_keys) {
    const std::string pair = "(" + std::to_string(from) + ", " + std::to_string(to) + ")";
    if (from < 0 || from >= n || to < 0 || to >= n || columns[from].is_star() ||
        columns[to].is_star()) {
      throw ValidationError(where + ": foreign key " + pair + " references a nonexistent column");
    }
    if (strict_foreign_keys && columns[from].table_id == columns[to].table_id) {
      throw ValidationError(where + ": foreign key " + pair + " stays within table '" +
                            tables[columns[from].table_id].name + "'");
    }
  }
}

DatabaseSchema ParseSchema(const Json &entry, const SchemaLoadOptions &options) {
  if (!entry.is_object()) throw InputError("schema entry is not an object");
  DatabaseSchema schema;
  const Json &db_id = RequireField(entry, "db_id", "schema entry");
  if (!db_id.is_string()) throw InputError("schema entry: db_id must be a string");
  schema.db_id = db_id.get<std::string>();
  const std::string where = Describe(schema);

  const Json &table_originals = RequireField(entry, "table_names_original", where);
  const Json *table_readable = entry.contains("table_names") ? &entry["table_names"] : nullptr;
  for (std::size_t i = 0; i < table_originals.size(); ++i) {
    Table table;
    table.id = static_cast<int>(i);
    table.name = CheckedPhrase(table_originals[i], where);
    std::string readable = table.name;
    if (table_readable && i < table_readable->size()) {
      readable = CheckedPhrase((*table_readable)[i], where);
    }
    try {
      table.annotations = AnnotationSet::FromDefault(readable);
    } catch (const ValidationError &e) {
      throw ValidationError(where + ": table '" + table.name + "': " + e.what());
    }
    schema.tables.push_back(std::move(table));
  }

  const Json &column_originals = RequireField(entry, "column_names_original", where);
  const Json *column_readable = entry.contains("column_names") ? &entry["column_names"] : nullptr;
  const Json *column_types = entry.contains("column_types") ? &entry["column_types"] : nullptr;
  for (const Json *side : {column_readable, column_types}) {
    if (side && (!side->is_array() || side->size() != column_originals.size())) {
      throw InputError(where + ": column_names/column_types do not match column_names_original in length");
    }
  }
  for (std::size_t i = 0; i < column_originals.size(); ++i) {
    const Json &pair = column_originals[i];
    if (!pair.is_array() || pair.size() != 2) {
      throw InputError(where + ": column " + std::to_string(i) + " is not a [table, name] pair");
    }
    Column column;
    column.id = static_cast<int>(i);
    column.table_id = AsIndex(pair[0], where);
    column.name = CheckedPhrase(pair[1], where);
    std::string readable = column.name;
    if (column_readable && i < column_readable->size() && (*column_readable)[i].is_array() &&
        (*column_readable)[i].size() == 2) {
      readable = CheckedPhrase((*column_readable)[i][1], where);
    }
    if (column.table_id == kStarTable) readable = "*";
    try {
      column.annotations = AnnotationSet::FromDefault(readable);
    } catch (const ValidationError &e) {
      throw ValidationError(where + ": column '" + column.name + "': " + e.what());
    }
    if (column_types && i < column_types->size()) {
      column.type = ParseColumnType(CheckedPhrase((*column_types)[i], where));
    } else if (column.table_id == kStarTable) {
      column.type = ColumnType::kText;
    }
    if (column.table_id >= 0 && column.table_id < static_cast<int>(schema.tables.size())) {
      schema.tables[column.table_id].column_ids.push_back(column.id);
    }
    schema.columns.push_back(std::move(column));
  }

  if (entry.contains("primary_keys")) FlattenKeys(entry["primary_keys"], schema.primary_keys, where);
  if (entry.contains("foreign_keys")) {
    for (const Json &pair : entry["foreign_keys"]) {
      if (!pair.is_array() || pair.size() != 2) {
        throw InputError(where + ": foreign key entry is not a pair");
      }
      schema.foreign_keys.emplace_back(AsIndex(pair[0], where), AsIndex(pair[1], where));
    }
  }
  schema.Validate(options.strict_foreign_keys);
  return schema;
}

std::vector<DatabaseSchema> ParseSchemas(const Json &array, const SchemaLoadOptions &options) {
  if (!array.is_array()) throw InputError("schema file must hold a JSON array");
  std::vector<DatabaseSchema> schemas;
  schemas.reserve(array.size());
  for (const Json &entry : array) schemas.push_back(ParseSchema(entry, options));
  return schemas;
}

std::vector<DatabaseSchema> LoadSchemas(const std::filesystem::path &path,
                                        const SchemaLoadOptions &options) {
  const Json json = ReadJsonFile(path);
  try {
    return ParseSchemas(json, options);
  } catch (const InputError &e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Json SerializeSchema(const DatabaseSchema &schema) {
  Json out = Json::object();
  out["db_id"] = schema.db_id;
  Json table_names = Json::array();
  Json table_originals = Json::array();
  for (const Table &table : schema.tables) {
    table_names.push_back(table.annotations.default_phrase());
    table_originals.push_back(table.name);
  }
  Json column_names = Json::array();
  Json column_originals = Json::array();
  Json column_types = Json::array();
  for (const Column &column : schema.columns) {
    column_names.push_back(Json::array({column.table_id, column.annotations.default_phrase()}));
    column_originals.push_back(Json::array({column.table_id, column.name}));
    column_types.push_back(ColumnTypeName(column.type));
  }
  Json foreign_keys = Json::array();
  for (const auto &[from, to] : schema.foreign_keys) foreign_keys.push_back(Json::array({from, to}));
  out["table_names_original"] = std::move(table_originals);
  out["table_names"] = std::move(table_names);
  out["column_names_original"] = std::move(column_originals);
  out["column_names"] = std::move(column_names);
  out["column_types"] = std::move(column_types);
  out["primary_keys"] = schema.primary_keys;
  out["foreign_keys"] = std::move(foreign_keys);
  return out;
}

Json SerializeSchemas(const std::vector<DatabaseSchema> &schemas) {
  Json out = Json::array();
  for (const DatabaseSchema &schema : schemas) out.push_back(SerializeSchema(schema));
  return out;
}

SchemaMap IndexSchemas(std::vector<DatabaseSchema> schemas) {
  SchemaMap map;
  for (DatabaseSchema &schema : schemas) {
    std::string key = schema.db_id;
    if (!map.emplace(key, std::move(schema)).second) {
      throw ValidationError("duplicate db_id '" + key + "'");
    }
  }
  return map;
}

namespace {

SchemaItem ResolveItemPath(const DatabaseSchema &schema, const std::string &path) {
  const std::string where = Describe(schema);
  const auto dot = path.find('.');
  const std::string table_name = path.substr(0, dot);
  const Table *table = schema.FindTable(table_name);
  if (!table) throw ValidationError(where + ": annotation names unknown table '" + table_name + "'");
  if (dot == std::string::npos) return {SchemaItem::Kind::kTable, table->id};
  const std::string column_name = path.substr(dot + 1);
  const Column *column = schema.FindColumn(table->id, column_name);
  if (!column) throw ValidationError(where + ": annotation names unknown column '" + path + "'");
  return {SchemaItem::Kind::kColumn, column->id};
}

bool IsFlatFile(const Json &json) {
  for (const auto &[key, value] : json.items()) {
    if (value.is_object()) return false;
  }
  return true;
}

template <typename Fn>
void ApplyPerDatabase(SchemaMap &schemas, const Json &file, const std::string &db_id,
                      const char *what, Fn &&apply) {
  if (!file.is_object()) throw InputError(std::string(what) + " file must hold a JSON object");
  if (IsFlatFile(file)) {
    if (!db_id.empty()) {
      auto it = schemas.find(db_id);
      if (it == schemas.end()) throw ValidationError("unknown db_id '" + db_id + "'");
      it->second = apply(std::move(it->second), file);
      return;
    }
    if (schemas.size() != 1) {
      throw ValidationError(std::string("flat ") + what +
                            " file needs a target db_id when several schemas are loaded");
    }
    auto &schema = schemas.begin()->second;
    schema = apply(std::move(schema), file);
    return;
  }
  for (const auto &[key, value] : file.items()) {
    auto it = schemas.find(key);
    if (it == schemas.end()) throw ValidationError(std::string(what) + " file names unknown db_id '" + key + "'");
    it->second = apply(std::move(it->second), value);
  }
}

}  // namespace

DatabaseSchema AttachAnnotations(DatabaseSchema schema, const Json &annotations) {
  if (!annotations.is_object()) throw InputError("annotation file must hold a JSON object");
  const std::string where = Describe(schema);
  for (const auto &[path, phrases] : annotations.items()) {
    const SchemaItem item = ResolveItemPath(schema, path);
    if (!phrases.is_array()) throw InputError(where + ": annotations for '" + path + "' must be a list");
    std::set<std::string> in_file;
    for (const Json &phrase : phrases) {
      const std::string normalized = NormalizePhrase(CheckedPhrase(phrase, where));
      if (normalized.empty()) {
        throw ValidationError(where + ": empty annotation for '" + path + "'");
      }
      if (!in_file.insert(normalized).second) {
        throw ValidationError(where + ": duplicate annotation '" + normalized + "' for '" + path + "'");
      }
      schema.mutable_annotations(item).Add(normalized);
    }
  }
  return schema;
}

DatabaseSchema AttachAnnotations(DatabaseSchema schema, const std::filesystem::path &path) {
  return AttachAnnotations(std::move(schema), ReadJsonFile(path));
}

void AttachAnnotationFile(SchemaMap &schemas, const Json &annotations, const std::string &db_id) {
  ApplyPerDatabase(schemas, annotations, db_id, "annotation",
                   [](DatabaseSchema schema, const Json &file) {
                     return AttachAnnotations(std::move(schema), file);
                   });
}

DatabaseSchema AttachCellValues(DatabaseSchema schema, const Json &values, std::size_t cap) {
  if (!values.is_object()) throw InputError("cell-value file must hold a JSON object");
  const std::string where = Describe(schema);
  for (const auto &[path, list] : values.items()) {
    const SchemaItem item = ResolveItemPath(schema, path);
    if (item.kind != SchemaItem::Kind::kColumn) {
      throw ValidationError(where + ": cell values must name a column, got '" + path + "'");
    }
    if (!list.is_array()) throw InputError(where + ": cell values for '" + path + "' must be a list");
    Column &column = schema.columns[item.id];
    for (const Json &value : list) {
      if (column.cell_values.size() >= cap) break;
      if (value.is_string()) {
        column.cell_values.push_back(value.get<std::string>());
      } else if (value.is_number() || value.is_boolean()) {
        column.cell_values.push_back(value.dump());
      }
    }
  }
  return schema;
}

void AttachCellValueFile(SchemaMap &schemas, const Json &values, const std::string &db_id,
                         std::size_t cap) {
  ApplyPerDatabase(schemas, values, db_id, "cell-value",
                   [cap](DatabaseSchema schema, const Json &file) {
                     return AttachCellValues(std::move(schema), file, cap);
                   });
}

}  // namespace sqlrobust
