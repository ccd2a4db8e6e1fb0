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

#ifndef SQLROBUST_EVAL_H_
#define SQLROBUST_EVAL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlrobust/json_io.h"
#include "sqlrobust/sql_ir.h"

namespace sqlrobust {

// The ten component categories of the Spider partial-match breakdown.
enum class Component {
  kSelect,
  kSelectNoAgg,
  kWhere,
  kWhereNoOp,
  kGroupByNoHaving,
  kGroupBy,
  kOrderBy,
  kAndOr,
  kIue,
  kKeywords,
};

inline constexpr std::size_t kComponentCount = 10;

std::string_view ComponentName(Component c);
inline Component ComponentAt(std::size_t i) { return static_cast<Component>(i); }

// Per-category multisets of normalized units (sorted), plus the FROM table
// multiset, which exact match also compares.
struct ComponentUnits {
  std::array<std::vector<std::string>, kComponentCount> units;
  std::vector<int> from_tables;

  const std::vector<std::string> &operator[](Component c) const {
    return units[static_cast<std::size_t>(c)];
  }
};

// Units per category:
//   SELECT            aggregated column refs, e.g. "count(0)"
//   SELECT (no AGG)   the same refs with aggregators and DISTINCT removed
//   WHERE             (column ref, operator, operand shape); literals dropped
//   WHERE (no OP)     the condition's column, aggregators removed
//   GROUP BY (no HAVING)  grouped columns
//   GROUP BY          one unit: grouped columns together with HAVING
//   ORDER BY          one unit: (items, direction, LIMIT presence)
//   AND/OR            connectors of WHERE and HAVING
//   IUE               (set-op kind, operand structure)
//   KEYWORDS          set of clause keywords, including "select" and "distinct"
// The operand of a set operation contributes its own units to every
// category except IUE.
ComponentUnits ExtractComponents(const SqlQuery &query);

struct ComponentCounts {
  std::int64_t pred_total = 0;
  std::int64_t gold_total = 0;
  std::int64_t matched = 0;

  // 2 * matched / (pred_total + gold_total); 1 when both totals are zero.
  double f1() const;

  ComponentCounts &operator+=(const ComponentCounts &other);
  bool operator==(const ComponentCounts &) const = default;
};

struct ComponentScores {
  std::array<ComponentCounts, kComponentCount> counts;

  const ComponentCounts &operator[](Component c) const {
    return counts[static_cast<std::size_t>(c)];
  }
  ComponentCounts &operator[](Component c) { return counts[static_cast<std::size_t>(c)]; }
  double f1(Component c) const { return (*this)[c].f1(); }

  ComponentScores &operator+=(const ComponentScores &other);
};

struct EvalResult {
  bool exact_match = false;
  ComponentScores components;
};

// Multiset intersection counts for one (pred, gold) pair.
ComponentScores CompareComponents(const ComponentUnits &pred, const ComponentUnits &gold);

// Inputs are canonicalized internally.
EvalResult Evaluate(const SqlQuery &pred, const SqlQuery &gold);

// True iff every component multiset and the FROM tables agree; literal
// values are ignored.
bool ExactMatch(const SqlQuery &pred, const SqlQuery &gold);

// Corpus-level scores from summed counts. An empty list yields all-zero
// counts, hence F1 = 1 everywhere.
ComponentScores ComponentF1(std::span<const std::pair<SqlQuery, SqlQuery>> pairs);

// Fraction of exact matches. Throws ValidationError on an empty list.
double Accuracy(std::span<const EvalResult> results);

Json ComponentScoresToJson(const ComponentScores &scores);

}  // namespace sqlrobust

#endif  // SQLROBUST_EVAL_H_
