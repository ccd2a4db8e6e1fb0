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

#ifndef SQLROBUST_SQL_IR_H_
#define SQLROBUST_SQL_IR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlrobust/schema.h"

// Bound intermediate representation for the Spider SQL subset. Every
// identifier is resolved to a schema index, so aliases do not survive
// parsing; literals are kept verbatim.

namespace sqlrobust {

enum class AggOp { kNone, kMax, kMin, kCount, kSum, kAvg };
enum class ArithOp { kAdd, kSub, kMul, kDiv };
enum class CompareOp { kEq, kNe, kGt, kLt, kGe, kLe, kBetween, kLike, kNotLike, kIn, kNotIn };
enum class Connector { kAnd, kOr };
enum class SetOpKind { kIntersect, kUnion, kExcept };
enum class OrderDirection { kAsc, kDesc };

std::string_view AggName(AggOp op);  // "" for kNone
std::string_view ArithSymbol(ArithOp op);
std::string_view CompareOpName(CompareOp op);  // SQL spelling, e.g. "NOT LIKE"
std::string_view ConnectorName(Connector c);
std::string_view SetOpName(SetOpKind kind);

// Heap cell with value semantics, for the recursive parts of the IR.
template <typename T>
class Box {
 public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box &other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box &&other) noexcept = default;
  Box &operator=(const Box &other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box &operator=(Box &&other) noexcept = default;

  const T &operator*() const { return *ptr_; }
  T &operator*() { return *ptr_; }
  const T *operator->() const { return ptr_.get(); }
  T *operator->() { return ptr_.get(); }

  friend bool operator==(const Box &a, const Box &b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

struct ColumnOperand {
  AggOp agg = AggOp::kNone;
  int column_id = 0;
  bool distinct = false;

  bool operator==(const ColumnOperand &) const = default;
  auto operator<=>(const ColumnOperand &) const = default;
};

// A column with optional aggregator, optionally combined arithmetically with
// a second column operand: `max(a) - min(b)`, `count(DISTINCT a)`, `a + b`.
struct ColumnRef {
  struct Arithmetic {
    ArithOp op = ArithOp::kAdd;
    ColumnOperand rhs;
    bool operator==(const Arithmetic &) const = default;
    auto operator<=>(const Arithmetic &) const = default;
  };

  AggOp agg = AggOp::kNone;
  int column_id = 0;
  bool distinct = false;
  std::optional<Arithmetic> arithmetic;

  ColumnOperand operand() const { return {agg, column_id, distinct}; }
  bool is_plain_column() const { return agg == AggOp::kNone && !distinct && !arithmetic; }

  bool operator==(const ColumnRef &) const = default;
  auto operator<=>(const ColumnRef &) const = default;
};

struct Literal {
  enum class Kind { kNumber, kString };
  Kind kind = Kind::kString;
  std::string text;  // unquoted

  bool operator==(const Literal &) const = default;
};

struct SqlQuery;

struct Condition {
  using Operand = std::variant<Literal, ColumnRef, Box<SqlQuery>>;

  ColumnRef left;
  CompareOp op = CompareOp::kEq;
  bool negated = false;  // NOT BETWEEN
  Operand right;
  std::optional<Literal> upper;  // second BETWEEN bound

  bool operator==(const Condition &) const = default;
};

struct ConditionTree {
  std::vector<Condition> conditions;
  std::vector<Connector> connectors;  // size() == conditions.size() - 1

  bool operator==(const ConditionTree &) const = default;
};

struct OrderBy {
  std::vector<ColumnRef> items;
  OrderDirection direction = OrderDirection::kAsc;

  bool operator==(const OrderBy &) const = default;
};

struct SetOperation {
  SetOpKind kind = SetOpKind::kUnion;
  Box<SqlQuery> operand;

  bool operator==(const SetOperation &) const = default;
};

struct SqlQuery {
  bool select_distinct = false;
  std::vector<ColumnRef> select;
  std::vector<int> from_tables;  // multiset; self-joins repeat an id
  std::vector<Condition> join_conditions;  // implicitly AND-connected
  std::optional<ConditionTree> where;
  std::vector<ColumnRef> group_by;
  std::optional<ConditionTree> having;
  std::optional<OrderBy> order_by;
  std::optional<std::int64_t> limit;
  std::optional<SetOperation> set_op;

  bool operator==(const SqlQuery &) const = default;
};

// Representation-independent form: FROM tables sorted, join conditions
// oriented by column id and sorted, applied recursively. Idempotent.
SqlQuery Canonicalize(SqlQuery query);

// Spider-style SQL text. Single-table scopes use bare column names; multi-
// table scopes alias tables T1..Tn in FROM order.
std::string Serialize(const SqlQuery &query, const DatabaseSchema &schema);

// Schema-free structural fingerprint with literal values and the LIMIT value
// erased. Two queries share a key iff they agree on everything but values.
std::string StructuralKey(const SqlQuery &query);
std::string StructuralKey(const ColumnRef &ref);

// Throws SqlError(kInvalid) when an index is out of range for `schema` or a
// star column carries an aggregator other than count.
void ValidateAgainstSchema(const SqlQuery &query, const DatabaseSchema &schema);

}  // namespace sqlrobust

#endif  // SQLROBUST_SQL_IR_H_
