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

#ifndef SQLROBUST_LINKING_H_
#define SQLROBUST_LINKING_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "sqlrobust/json_io.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/text.h"

namespace sqlrobust {

inline constexpr std::size_t kMaxLinkNgram = 5;

enum class LinkKind { kExactTable, kPartialTable, kExactColumn, kPartialColumn, kCellValue };

std::string_view LinkKindName(LinkKind kind);
bool IsExact(LinkKind kind);

struct LinkTarget {
  enum class Kind { kTable, kColumn, kCellValue };
  Kind kind = Kind::kTable;
  int id = 0;           // table id, or column id for columns and cell values
  std::string literal;  // cell value as stored; empty otherwise

  bool operator==(const LinkTarget &) const = default;
};

// `begin`/`end` index into LinkedQuestion::tokens (end exclusive). Spans
// never cross punctuation.
struct LinkTag {
  std::size_t begin = 0;
  std::size_t end = 0;
  LinkTarget target;
  LinkKind kind = LinkKind::kExactTable;
  std::string matched_annotation;
  // Other targets the same span matched with the same kind, in schema order.
  std::vector<LinkTarget> also_matches;

  bool operator==(const LinkTag &) const = default;
};

struct LinkedQuestion {
  std::vector<Token> tokens;
  std::vector<LinkTag> tags;  // non-overlapping, sorted by begin

  std::string SpanText(std::size_t begin, std::size_t end) const;
};

// Matches every n-gram (5 down to 1 words) against all annotations and cell
// values. Overlaps are resolved by: longer span, exact over partial, earlier
// span, then table before column before cell value.
LinkedQuestion Link(std::string_view question, const DatabaseSchema &schema);

// Word-token runs of `tokens` as [begin, end) pairs, split at punctuation.
std::vector<std::pair<std::size_t, std::size_t>> WordRuns(const std::vector<Token> &tokens);

struct MasCollision {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<SchemaItem> items;
};

struct ResolvedSchema {
  DatabaseSchema base;
  std::vector<std::string> table_selected;   // indexed by table id
  std::vector<std::string> column_selected;  // indexed by column id
  std::vector<MasCollision> collisions;

  const std::string &selected(SchemaItem item) const;
};

// Per item, the annotation with the longest occurrence (in tokens) in the
// question; ties go to the earlier annotation, the default when none occurs.
ResolvedSchema MasSelect(std::string_view question, const DatabaseSchema &schema);

// Identity resolution: every item keeps its default.
ResolvedSchema DefaultResolution(const DatabaseSchema &schema);

// The schema as a model sees it: singleton annotation sets holding the
// selected phrases.
DatabaseSchema ModelView(const ResolvedSchema &resolved);

// tables.json-shaped entry with surface names replaced by the selections.
Json ResolveForModel(const ResolvedSchema &resolved);

// "table", "table.column", or {"column", "value"} for cell values.
Json LinkTargetToJson(const LinkTarget &target, const DatabaseSchema &schema);
Json LinkedQuestionToJson(const LinkedQuestion &linked, const DatabaseSchema &schema);
Json ResolvedSchemaToJson(const ResolvedSchema &resolved);

}  // namespace sqlrobust

#endif  // SQLROBUST_LINKING_H_
