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

#include "sqlrobust/eval.h"

#include <algorithm>
#include <set>

#include "sqlrobust/error.h"
#include "sqlrobust/text.h"

namespace sqlrobust {
namespace {

std::string ColumnsOnly(const ColumnRef &ref) {
  std::string out = std::to_string(ref.column_id);
  if (ref.arithmetic) {
    out += ArithSymbol(ref.arithmetic->op);
    out += std::to_string(ref.arithmetic->rhs.column_id);
  }
  return out;
}

std::string OperandShape(const Condition &cond) {
  if (std::holds_alternative<Literal>(cond.right)) return "value";
  if (const auto *ref = std::get_if<ColumnRef>(&cond.right)) return StructuralKey(*ref);
  return "{" + StructuralKey(*std::get<Box<SqlQuery>>(cond.right)) + "}";
}

std::string ConditionUnit(const Condition &cond) {
  std::string out = StructuralKey(cond.left);
  out += cond.negated ? " not " : " ";
  out += CompareOpName(cond.op);
  out += " " + OperandShape(cond);
  return out;
}

std::string TreeUnit(const std::optional<ConditionTree> &tree) {
  if (!tree) return "none";
  std::vector<std::string> conds;
  for (const Condition &cond : tree->conditions) conds.push_back(ConditionUnit(cond));
  std::vector<std::string> connectors;
  for (Connector c : tree->connectors) connectors.emplace_back(ConnectorName(c));
  std::sort(conds.begin(), conds.end());
  std::sort(connectors.begin(), connectors.end());
  std::string out;
  for (const auto &c : conds) out += "[" + c + "]";
  for (const auto &c : connectors) out += " " + c;
  return out;
}

void Collect(const SqlQuery &q, ComponentUnits &out, std::set<std::string> &keywords) {
  auto add = [&](Component c, std::string unit) {
    out.units[static_cast<std::size_t>(c)].push_back(std::move(unit));
  };

  keywords.insert("select");
  if (q.select_distinct) keywords.insert("distinct");
  for (const ColumnRef &ref : q.select) {
    add(Component::kSelect, StructuralKey(ref));
    add(Component::kSelectNoAgg, ColumnsOnly(ref));
    if (ref.distinct || (ref.arithmetic && ref.arithmetic->rhs.distinct)) keywords.insert("distinct");
  }

  auto scan_tree = [&](const ConditionTree &tree) {
    for (Connector c : tree.connectors) {
      add(Component::kAndOr, std::string(ConnectorName(c)));
      if (c == Connector::kOr) keywords.insert("or");
    }
    for (const Condition &cond : tree.conditions) {
      if (cond.negated || cond.op == CompareOp::kNotIn || cond.op == CompareOp::kNotLike) {
        keywords.insert("not");
      }
      if (cond.op == CompareOp::kIn || cond.op == CompareOp::kNotIn) keywords.insert("in");
      if (cond.op == CompareOp::kLike || cond.op == CompareOp::kNotLike) keywords.insert("like");
    }
  };

  if (q.where) {
    keywords.insert("where");
    for (const Condition &cond : q.where->conditions) {
      add(Component::kWhere, ConditionUnit(cond));
      add(Component::kWhereNoOp, ColumnsOnly(cond.left));
    }
    scan_tree(*q.where);
  }

  if (!q.group_by.empty()) {
    keywords.insert("group");
    for (const ColumnRef &ref : q.group_by) add(Component::kGroupByNoHaving, ColumnsOnly(ref));
  }
  if (q.having) {
    keywords.insert("having");
    scan_tree(*q.having);
  }
  if (!q.group_by.empty() || q.having) {
    std::vector<std::string> cols;
    for (const ColumnRef &ref : q.group_by) cols.push_back(ColumnsOnly(ref));
    std::sort(cols.begin(), cols.end());
    std::string unit = "group";
    for (const auto &c : cols) unit += " " + c;
    unit += " having " + TreeUnit(q.having);
    add(Component::kGroupBy, std::move(unit));
  }

  if (q.order_by) {
    keywords.insert("order");
    const bool desc = q.order_by->direction == OrderDirection::kDesc;
    keywords.insert(desc ? "desc" : "asc");
    std::string unit = "order";
    for (const ColumnRef &ref : q.order_by->items) unit += " " + StructuralKey(ref);
    unit += desc ? " desc" : " asc";
    unit += q.limit ? " limit" : " nolimit";
    add(Component::kOrderBy, std::move(unit));
  }
  if (q.limit) keywords.insert("limit");

  if (q.set_op) {
    std::string kind = ToLower(SetOpName(q.set_op->kind));
    keywords.insert(kind);
    add(Component::kIue, kind + " {" + StructuralKey(*q.set_op->operand) + "}");
    Collect(*q.set_op->operand, out, keywords);
  }
}

std::int64_t MultisetIntersection(const std::vector<std::string> &a, const std::vector<std::string> &b) {
  // Both sorted.
  std::int64_t n = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++n;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return n;
}

}  // namespace

std::string_view ComponentName(Component c) {
  switch (c) {
    case Component::kSelect: return "SELECT";
    case Component::kSelectNoAgg: return "SELECT (no AGG)";
    case Component::kWhere: return "WHERE";
    case Component::kWhereNoOp: return "WHERE (no OP)";
    case Component::kGroupByNoHaving: return "GROUP BY (no HAVING)";
    case Component::kGroupBy: return "GROUP BY";
    case Component::kOrderBy: return "ORDER BY";
    case Component::kAndOr: return "AND/OR";
    case Component::kIue: return "IUE";
    case Component::kKeywords: return "KEYWORDS";
  }
  return "";
}

ComponentUnits ExtractComponents(const SqlQuery &query) {
  ComponentUnits out;
  std::set<std::string> keywords;
  Collect(query, out, keywords);
  out.units[static_cast<std::size_t>(Component::kKeywords)].assign(keywords.begin(), keywords.end());
  for (auto &units : out.units) std::sort(units.begin(), units.end());
  out.from_tables = query.from_tables;
  std::sort(out.from_tables.begin(), out.from_tables.end());
  return out;
}

double ComponentCounts::f1() const {
  const std::int64_t denom = pred_total + gold_total;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(matched) / static_cast<double>(denom);
}

ComponentCounts &ComponentCounts::operator+=(const ComponentCounts &other) {
  pred_total += other.pred_total;
  gold_total += other.gold_total;
  matched += other.matched;
  return *this;
}

ComponentScores &ComponentScores::operator+=(const ComponentScores &other) {
  for (std::size_t i = 0; i < kComponentCount; ++i) counts[i] += other.counts[i];
  return *this;
}

ComponentScores CompareComponents(const ComponentUnits &pred, const ComponentUnits &gold) {
  ComponentScores scores;
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    ComponentCounts &c = scores.counts[i];
    c.pred_total = static_cast<std::int64_t>(pred.units[i].size());
    c.gold_total = static_cast<std::int64_t>(gold.units[i].size());
    c.matched = MultisetIntersection(pred.units[i], gold.units[i]);
  }
  return scores;
}

EvalResult Evaluate(const SqlQuery &pred, const SqlQuery &gold) {
  const ComponentUnits p = ExtractComponents(Canonicalize(pred));
  const ComponentUnits g = ExtractComponents(Canonicalize(gold));
  EvalResult result;
  result.components = CompareComponents(p, g);
  result.exact_match = p.units == g.units && p.from_tables == g.from_tables;
  return result;
}

bool ExactMatch(const SqlQuery &pred, const SqlQuery &gold) { return Evaluate(pred, gold).exact_match; }

ComponentScores ComponentF1(std::span<const std::pair<SqlQuery, SqlQuery>> pairs) {
  ComponentScores total;
  for (const auto &[pred, gold] : pairs) total += Evaluate(pred, gold).components;
  return total;
}

double Accuracy(std::span<const EvalResult> results) {
  if (results.empty()) throw ValidationError("accuracy of an empty result list is undefined");
  std::size_t hits = 0;
  for (const EvalResult &r : results) hits += r.exact_match ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(results.size());
}

Json ComponentScoresToJson(const ComponentScores &scores) {
  Json out = Json::object();
  for (std::size_t i = 0; i < kComponentCount; ++i) {
    const ComponentCounts &c = scores.counts[i];
    out[std::string(ComponentName(ComponentAt(i)))] = {
        {"f1", c.f1()}, {"pred_total", c.pred_total}, {"gold_total", c.gold_total}, {"matched", c.matched}};
  }
  return out;
}

}  // namespace sqlrobust
