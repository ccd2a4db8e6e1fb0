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

#include "sqlrobust/sql_ir.h"

#include <algorithm>
#include <cctype>

#include "sqlrobust/error.h"
#include "sqlrobust/text.h"

namespace sqlrobust {

std::string_view AggName(AggOp op) {
  switch (op) {
    case AggOp::kNone: return "";
    case AggOp::kMax: return "max";
    case AggOp::kMin: return "min";
    case AggOp::kCount: return "count";
    case AggOp::kSum: return "sum";
    case AggOp::kAvg: return "avg";
  }
  return "";
}

std::string_view ArithSymbol(ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return "+";
    case ArithOp::kSub: return "-";
    case ArithOp::kMul: return "*";
    case ArithOp::kDiv: return "/";
  }
  return "+";
}

std::string_view CompareOpName(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kGt: return ">";
    case CompareOp::kLt: return "<";
    case CompareOp::kGe: return ">=";
    case CompareOp::kLe: return "<=";
    case CompareOp::kBetween: return "BETWEEN";
    case CompareOp::kLike: return "LIKE";
    case CompareOp::kNotLike: return "NOT LIKE";
    case CompareOp::kIn: return "IN";
    case CompareOp::kNotIn: return "NOT IN";
  }
  return "=";
}

std::string_view ConnectorName(Connector c) { return c == Connector::kAnd ? "AND" : "OR"; }

std::string_view SetOpName(SetOpKind kind) {
  switch (kind) {
    case SetOpKind::kIntersect: return "INTERSECT";
    case SetOpKind::kUnion: return "UNION";
    case SetOpKind::kExcept: return "EXCEPT";
  }
  return "UNION";
}

// ---------------------------------------------------------------------------
// Canonicalization

namespace {

CompareOp Mirror(CompareOp op) {
  switch (op) {
    case CompareOp::kGt: return CompareOp::kLt;
    case CompareOp::kLt: return CompareOp::kGt;
    case CompareOp::kGe: return CompareOp::kLe;
    case CompareOp::kLe: return CompareOp::kGe;
    default: return op;
  }
}

bool IsOrientable(CompareOp op) {
  switch (op) {
    case CompareOp::kEq:
    case CompareOp::kNe:
    case CompareOp::kGt:
    case CompareOp::kLt:
    case CompareOp::kGe:
    case CompareOp::kLe:
      return true;
    default:
      return false;
  }
}

void CanonicalizeInPlace(SqlQuery &query);

void CanonicalizeCondition(Condition &cond) {
  if (auto *sub = std::get_if<Box<SqlQuery>>(&cond.right)) CanonicalizeInPlace(**sub);
}

void CanonicalizeTree(std::optional<ConditionTree> &tree) {
  if (!tree) return;
  for (Condition &cond : tree->conditions) CanonicalizeCondition(cond);
}

void CanonicalizeInPlace(SqlQuery &query) {
  std::sort(query.from_tables.begin(), query.from_tables.end());

  for (Condition &cond : query.join_conditions) {
    CanonicalizeCondition(cond);
    auto *rhs = std::get_if<ColumnRef>(&cond.right);
    if (rhs && IsOrientable(cond.op) && *rhs < cond.left) {
      std::swap(cond.left, *rhs);
      cond.op = Mirror(cond.op);
    }
  }
  auto join_key = [](const Condition &c) {
    const auto *rhs = std::get_if<ColumnRef>(&c.right);
    return std::make_tuple(c.left, static_cast<int>(c.op), rhs ? *rhs : ColumnRef{},
                           rhs == nullptr);
  };
  std::stable_sort(query.join_conditions.begin(), query.join_conditions.end(),
                   [&](const Condition &a, const Condition &b) { return join_key(a) < join_key(b); });

  CanonicalizeTree(query.where);
  CanonicalizeTree(query.having);
  if (query.set_op) CanonicalizeInPlace(*query.set_op->operand);
}

}  // namespace

SqlQuery Canonicalize(SqlQuery query) {
  CanonicalizeInPlace(query);
  return query;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

bool IsSqlKeyword(const std::string &upper) {
  static const char *const kKeywords[] = {
      "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT", "ASC",
      "DESC", "AND", "OR", "NOT", "IN", "LIKE", "BETWEEN", "JOIN", "ON", "AS",
      "DISTINCT", "INTERSECT", "UNION", "EXCEPT", "INNER", "LEFT", "RIGHT", "OUTER",
      "CROSS", "NATURAL", "IS", "NULL", "EXISTS", "CASE", "WITH", "OVER", "ALL"};
  for (const char *kw : kKeywords) {
    if (upper == kw) return true;
  }
  return false;
}

std::string QuoteIdentifier(const std::string &name) {
  bool plain = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_');
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  }
  std::string upper = name;
  for (char &c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (plain && !IsSqlKeyword(upper)) return name;
  return "`" + name + "`";
}

std::string QuoteLiteral(const Literal &lit) {
  if (lit.kind == Literal::Kind::kNumber) return lit.text;
  std::string out = "'";
  for (char c : lit.text) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

struct Scope {
  const std::vector<int> *tables;
  bool aliased;
  const Scope *parent;
};

class Serializer {
 public:
  explicit Serializer(const DatabaseSchema &schema) : schema_(schema) {}

  std::string Query(const SqlQuery &q, const Scope *parent) {
    Scope scope{&q.from_tables, q.from_tables.size() > 1, parent};
    std::string out = "SELECT ";
    if (q.select_distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < q.select.size(); ++i) {
      if (i) out += ", ";
      out += Ref(q.select[i], scope);
    }
    out += " FROM ";
    for (std::size_t i = 0; i < q.from_tables.size(); ++i) {
      if (i) out += " JOIN ";
      out += QuoteIdentifier(TableName(q.from_tables[i]));
      if (scope.aliased) out += " AS T" + std::to_string(i + 1);
    }
    if (!q.join_conditions.empty()) {
      out += " ON ";
      for (std::size_t i = 0; i < q.join_conditions.size(); ++i) {
        if (i) out += " AND ";
        out += Cond(q.join_conditions[i], scope);
      }
    }
    if (q.where) out += " WHERE " + Tree(*q.where, scope);
    if (!q.group_by.empty()) {
      out += " GROUP BY ";
      for (std::size_t i = 0; i < q.group_by.size(); ++i) {
        if (i) out += ", ";
        out += Ref(q.group_by[i], scope);
      }
    }
    if (q.having) out += " HAVING " + Tree(*q.having, scope);
    if (q.order_by) {
      out += " ORDER BY ";
      for (std::size_t i = 0; i < q.order_by->items.size(); ++i) {
        if (i) out += ", ";
        out += Ref(q.order_by->items[i], scope);
      }
      if (q.order_by->direction == OrderDirection::kDesc) out += " DESC";
    }
    if (q.limit) out += " LIMIT " + std::to_string(*q.limit);
    if (q.set_op) {
      out += " ";
      out += SetOpName(q.set_op->kind);
      out += " " + Query(*q.set_op->operand, parent);
    }
    return out;
  }

 private:
  std::string TableName(int table_id) const {
    if (table_id < 0 || table_id >= static_cast<int>(schema_.tables.size())) {
      return "table_" + std::to_string(table_id);
    }
    return schema_.tables[table_id].name;
  }

  std::string Column(int column_id, const Scope &scope) const {
    if (column_id < 0 || column_id >= static_cast<int>(schema_.columns.size())) {
      return "column_" + std::to_string(column_id);
    }
    const sqlrobust::Column &col = schema_.columns[column_id];
    if (col.is_star()) return "*";
    const std::string name = QuoteIdentifier(col.name);
    auto index_in = [&](const Scope &s) -> int {
      const auto it = std::find(s.tables->begin(), s.tables->end(), col.table_id);
      return it == s.tables->end() ? -1 : static_cast<int>(it - s.tables->begin());
    };
    const int local = index_in(scope);
    if (local >= 0) {
      return scope.aliased ? "T" + std::to_string(local + 1) + "." + name : name;
    }
    return QuoteIdentifier(TableName(col.table_id)) + "." + name;
  }

  std::string Operand(const ColumnOperand &op, const Scope &scope) const {
    std::string inner = Column(op.column_id, scope);
    if (op.distinct) inner = "DISTINCT " + inner;
    if (op.agg == AggOp::kNone) return inner;
    return std::string(AggName(op.agg)) + "(" + inner + ")";
  }

  std::string Ref(const ColumnRef &ref, const Scope &scope) const {
    std::string out = Operand(ref.operand(), scope);
    if (ref.arithmetic) {
      out += " ";
      out += ArithSymbol(ref.arithmetic->op);
      out += " " + Operand(ref.arithmetic->rhs, scope);
    }
    return out;
  }

  std::string Cond(const Condition &cond, const Scope &scope) {
    std::string out = Ref(cond.left, scope) + " ";
    if (cond.op == CompareOp::kBetween) {
      if (cond.negated) out += "NOT ";
      out += "BETWEEN ";
      out += RightOperand(cond.right, scope);
      out += " AND " + (cond.upper ? QuoteLiteral(*cond.upper) : std::string("''"));
      return out;
    }
    out += CompareOpName(cond.op);
    out += " " + RightOperand(cond.right, scope);
    return out;
  }

  std::string RightOperand(const Condition::Operand &operand, const Scope &scope) {
    if (const auto *lit = std::get_if<Literal>(&operand)) return QuoteLiteral(*lit);
    if (const auto *ref = std::get_if<ColumnRef>(&operand)) return Ref(*ref, scope);
    const auto &sub = std::get<Box<SqlQuery>>(operand);
    return "(" + Query(*sub, &scope) + ")";
  }

  std::string Tree(const ConditionTree &tree, const Scope &scope) {
    std::string out;
    for (std::size_t i = 0; i < tree.conditions.size(); ++i) {
      if (i) {
        out += " ";
        out += ConnectorName(i - 1 < tree.connectors.size() ? tree.connectors[i - 1] : Connector::kAnd);
        out += " ";
      }
      out += Cond(tree.conditions[i], scope);
    }
    return out;
  }

  const DatabaseSchema &schema_;
};

}  // namespace

std::string Serialize(const SqlQuery &query, const DatabaseSchema &schema) {
  return Serializer(schema).Query(query, nullptr);
}

// ---------------------------------------------------------------------------
// Structural keys

namespace {

std::string OperandKey(const ColumnOperand &op) {
  std::string out(AggName(op.agg));
  out += "(";
  if (op.distinct) out += "distinct ";
  out += std::to_string(op.column_id) + ")";
  return out;
}

std::string ConditionKey(const Condition &cond);

std::string TreeKey(const ConditionTree &tree) {
  std::string out;
  for (std::size_t i = 0; i < tree.conditions.size(); ++i) {
    if (i) {
      out += ' ';
      out += ConnectorName(tree.connectors[i - 1]);
      out += ' ';
    }
    out += ConditionKey(tree.conditions[i]);
  }
  return out;
}

std::string ConditionKey(const Condition &cond) {
  std::string out = StructuralKey(cond.left);
  out += cond.negated ? " not " : " ";
  out += CompareOpName(cond.op);
  out += " ";
  if (std::holds_alternative<Literal>(cond.right)) {
    out += "value";
  } else if (const auto *ref = std::get_if<ColumnRef>(&cond.right)) {
    out += StructuralKey(*ref);
  } else {
    out += "{" + StructuralKey(*std::get<Box<SqlQuery>>(cond.right)) + "}";
  }
  return out;
}

}  // namespace

std::string StructuralKey(const ColumnRef &ref) {
  std::string out = OperandKey(ref.operand());
  if (ref.arithmetic) {
    out += ArithSymbol(ref.arithmetic->op);
    out += OperandKey(ref.arithmetic->rhs);
  }
  return out;
}

std::string StructuralKey(const SqlQuery &query) {
  std::string out = query.select_distinct ? "select distinct" : "select";
  std::vector<std::string> select;
  for (const ColumnRef &ref : query.select) select.push_back(StructuralKey(ref));
  std::sort(select.begin(), select.end());
  for (const auto &s : select) out += " " + s;
  std::vector<int> tables = query.from_tables;
  std::sort(tables.begin(), tables.end());
  out += " from";
  for (int t : tables) out += " " + std::to_string(t);
  if (query.where) out += " where " + TreeKey(*query.where);
  if (!query.group_by.empty()) {
    std::vector<std::string> group;
    for (const ColumnRef &ref : query.group_by) group.push_back(StructuralKey(ref));
    std::sort(group.begin(), group.end());
    out += " group";
    for (const auto &g : group) out += " " + g;
  }
  if (query.having) out += " having " + TreeKey(*query.having);
  if (query.order_by) {
    out += " order";
    for (const ColumnRef &ref : query.order_by->items) out += " " + StructuralKey(ref);
    out += query.order_by->direction == OrderDirection::kDesc ? " desc" : " asc";
  }
  if (query.limit) out += " limit";
  if (query.set_op) {
    out += " ";
    out += SetOpName(query.set_op->kind);
    out += " {" + StructuralKey(*query.set_op->operand) + "}";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void ValidateOperand(const ColumnOperand &op, const DatabaseSchema &schema) {
  if (op.column_id < 0 || op.column_id >= static_cast<int>(schema.columns.size())) {
    throw SqlError(SqlError::Kind::kInvalid, 0,
                   "column index " + std::to_string(op.column_id) + " out of range");
  }
  if (schema.columns[op.column_id].is_star() && op.agg != AggOp::kNone && op.agg != AggOp::kCount) {
    throw SqlError(SqlError::Kind::kInvalid, 0,
                   "star column only admits count, got " + std::string(AggName(op.agg)));
  }
}

void ValidateRef(const ColumnRef &ref, const DatabaseSchema &schema) {
  ValidateOperand(ref.operand(), schema);
  if (ref.arithmetic) ValidateOperand(ref.arithmetic->rhs, schema);
}

void ValidateTree(const std::optional<ConditionTree> &tree, const DatabaseSchema &schema);

void ValidateCond(const Condition &cond, const DatabaseSchema &schema) {
  ValidateRef(cond.left, schema);
  if (const auto *ref = std::get_if<ColumnRef>(&cond.right)) ValidateRef(*ref, schema);
  if (const auto *sub = std::get_if<Box<SqlQuery>>(&cond.right)) {
    switch (cond.op) {
      case CompareOp::kBetween:
      case CompareOp::kLike:
      case CompareOp::kNotLike:
        throw SqlError(SqlError::Kind::kInvalid, 0,
                       std::string("subquery operand not allowed with ") +
                           std::string(CompareOpName(cond.op)));
      default:
        break;
    }
    ValidateAgainstSchema(**sub, schema);
  }
  if (cond.op == CompareOp::kBetween &&
      (!std::holds_alternative<Literal>(cond.right) || !cond.upper)) {
    throw SqlError(SqlError::Kind::kInvalid, 0, "BETWEEN requires two literals");
  }
}

void ValidateTree(const std::optional<ConditionTree> &tree, const DatabaseSchema &schema) {
  if (!tree) return;
  if (tree->conditions.empty() || tree->connectors.size() + 1 != tree->conditions.size()) {
    throw SqlError(SqlError::Kind::kInvalid, 0, "connector count must be condition count - 1");
  }
  for (const Condition &cond : tree->conditions) ValidateCond(cond, schema);
}

}  // namespace

void ValidateAgainstSchema(const SqlQuery &query, const DatabaseSchema &schema) {
  if (query.select.empty()) throw SqlError(SqlError::Kind::kInvalid, 0, "empty SELECT list");
  if (query.from_tables.empty()) throw SqlError(SqlError::Kind::kInvalid, 0, "empty FROM clause");
  for (int t : query.from_tables) {
    if (t < 0 || t >= static_cast<int>(schema.tables.size())) {
      throw SqlError(SqlError::Kind::kInvalid, 0, "table index " + std::to_string(t) + " out of range");
    }
  }
  for (const ColumnRef &ref : query.select) ValidateRef(ref, schema);
  for (const Condition &cond : query.join_conditions) ValidateCond(cond, schema);
  ValidateTree(query.where, schema);
  for (const ColumnRef &ref : query.group_by) ValidateRef(ref, schema);
  ValidateTree(query.having, schema);
  if (query.order_by) {
    for (const ColumnRef &ref : query.order_by->items) ValidateRef(ref, schema);
  }
  if (query.limit && *query.limit < 0) throw SqlError(SqlError::Kind::kInvalid, 0, "negative LIMIT");
  if (query.set_op) {
    if (query.set_op->operand->set_op) {
      throw SqlError(SqlError::Kind::kUnsupported, 0, "set-operation chain longer than one");
    }
    ValidateAgainstSchema(*query.set_op->operand, schema);
  }
}

}  // namespace sqlrobust
