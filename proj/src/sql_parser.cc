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

#include "sqlrobust/sql_parser.h"

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqlrobust/error.h"
#include "sqlrobust/text.h"

namespace sqlrobust {
namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class TokKind { kIdent, kQuotedIdent, kNumber, kString, kSymbol, kEnd };

struct Tok {
  TokKind kind = TokKind::kEnd;
  std::string text;
  std::string upper;
  std::size_t offset = 0;
};

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<Tok> Lex(std::string_view text) {
  std::vector<Tok> toks;
  std::size_t i = 0;
  auto push = [&](TokKind kind, std::string value, std::size_t offset) {
    Tok t;
    t.kind = kind;
    t.upper = Upper(value);
    t.text = std::move(value);
    t.offset = offset;
    toks.push_back(std::move(t));
  };
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      push(TokKind::kIdent, std::string(text.substr(i, j - i)), i);
      i = j;
    } else if (std::isdigit(c) ||
               (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i;
      bool seen_dot = false;
      while (j < text.size()) {
        const auto d = static_cast<unsigned char>(text[j]);
        if (std::isdigit(d)) {
          ++j;
        } else if (d == '.' && !seen_dot) {
          seen_dot = true;
          ++j;
        } else {
          break;
        }
      }
      push(TokKind::kNumber, std::string(text.substr(i, j - i)), i);
      i = j;
    } else if (c == '\'' || c == '"') {
      const char quote = static_cast<char>(c);
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        if (text[j] == quote) {
          if (j + 1 < text.size() && text[j + 1] == quote) {
            value += quote;
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        value += text[j++];
      }
      if (!closed) throw SqlError(SqlError::Kind::kLexical, i, "unterminated string literal");
      push(TokKind::kString, std::move(value), i);
      i = j;
    } else if (c == '`') {
      const std::size_t close = text.find('`', i + 1);
      if (close == std::string_view::npos) {
        throw SqlError(SqlError::Kind::kLexical, i, "unterminated quoted identifier");
      }
      push(TokKind::kQuotedIdent, std::string(text.substr(i + 1, close - i - 1)), i);
      i = close + 1;
    } else {
      static const char *const kTwoChar[] = {"!=", "<>", "<=", ">="};
      bool matched = false;
      for (const char *sym : kTwoChar) {
        if (text.substr(i, 2) == sym) {
          push(TokKind::kSymbol, sym, i);
          i += 2;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string_view("(),.;*+-/=<>").find(static_cast<char>(c)) != std::string_view::npos) {
        push(TokKind::kSymbol, std::string(1, static_cast<char>(c)), i);
        ++i;
        continue;
      }
      throw SqlError(SqlError::Kind::kLexical, i,
                     std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
  }
  push(TokKind::kEnd, "", text.size());
  return toks;
}

bool IsReservedKeyword(const std::string &upper) {
  static const char *const kKeywords[] = {
      "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT", "ASC",
      "DESC", "AND", "OR", "NOT", "IN", "LIKE", "BETWEEN", "JOIN", "ON", "AS",
      "DISTINCT", "INTERSECT", "UNION", "EXCEPT", "INNER", "LEFT", "RIGHT", "OUTER",
      "CROSS", "NATURAL", "FULL", "IS", "NULL", "EXISTS", "CASE", "WITH", "OVER", "ALL"};
  for (const char *kw : kKeywords) {
    if (upper == kw) return true;
  }
  return false;
}

std::optional<AggOp> AggFromName(const std::string &upper) {
  if (upper == "MAX") return AggOp::kMax;
  if (upper == "MIN") return AggOp::kMin;
  if (upper == "COUNT") return AggOp::kCount;
  if (upper == "SUM") return AggOp::kSum;
  if (upper == "AVG") return AggOp::kAvg;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Unbound syntax tree

struct AstColumn {
  std::string qualifier;
  std::string name;
  bool star = false;
  std::size_t offset = 0;
};

struct AstOperand {
  AggOp agg = AggOp::kNone;
  bool distinct = false;
  AstColumn column;
};

struct AstValue {
  AstOperand first;
  std::optional<std::pair<ArithOp, AstOperand>> arith;
  std::size_t offset = 0;
};

struct AstQuery;

struct AstCondition {
  enum class RightKind { kLiteral, kColumn, kSubquery };
  AstValue left;
  CompareOp op = CompareOp::kEq;
  bool negated = false;
  RightKind right_kind = RightKind::kLiteral;
  Literal literal;
  AstValue column;
  std::unique_ptr<AstQuery> subquery;
  std::optional<Literal> upper;
};

struct AstTree {
  std::vector<AstCondition> conditions;
  std::vector<Connector> connectors;
};

struct AstTable {
  std::string name;
  std::string alias;
  std::size_t offset = 0;
};

struct AstQuery {
  bool select_distinct = false;
  std::vector<AstValue> select;
  std::vector<AstTable> from;
  std::vector<AstCondition> joins;
  std::optional<AstTree> where;
  std::vector<AstValue> group_by;
  std::optional<AstTree> having;
  std::vector<AstValue> order_items;
  std::optional<OrderDirection> order_direction;
  std::optional<std::int64_t> limit;
  std::optional<SetOpKind> set_kind;
  std::unique_ptr<AstQuery> set_operand;
  std::size_t offset = 0;
};

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::vector<Tok> toks) : toks_(std::move(toks)) {}

  std::unique_ptr<AstQuery> ParseStatement() {
    if (PeekKeyword("WITH")) Unsupported("common table expressions");
    auto query = ParseQuery();
    if (PeekSymbol(";")) Advance();
    if (Peek().kind != TokKind::kEnd) SyntaxError("unexpected '" + Peek().text + "'");
    return query;
  }

 private:
  const Tok &Peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Tok &Advance() {
    const Tok &t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool PeekKeyword(const char *kw, std::size_t ahead = 0) const {
    const Tok &t = Peek(ahead);
    return t.kind == TokKind::kIdent && t.upper == kw;
  }
  bool PeekSymbol(const char *sym, std::size_t ahead = 0) const {
    const Tok &t = Peek(ahead);
    return t.kind == TokKind::kSymbol && t.text == sym;
  }
  bool AcceptKeyword(const char *kw) {
    if (!PeekKeyword(kw)) return false;
    Advance();
    return true;
  }
  void ExpectKeyword(const char *kw) {
    if (!AcceptKeyword(kw)) SyntaxError(std::string("expected ") + kw);
  }
  void ExpectSymbol(const char *sym) {
    if (!PeekSymbol(sym)) SyntaxError(std::string("expected '") + sym + "'");
    Advance();
  }

  [[noreturn]] void SyntaxError(const std::string &message) const {
    const Tok &t = Peek();
    std::string where = t.kind == TokKind::kEnd ? " (end of input)" : "";
    throw SqlError(SqlError::Kind::kSyntax, t.offset, message + where);
  }
  [[noreturn]] void Unsupported(const std::string &what) const {
    throw SqlError(SqlError::Kind::kUnsupported, Peek().offset, "unsupported construct: " + what);
  }

  void RejectUnsupportedKeyword() const {
    const Tok &t = Peek();
    if (t.kind != TokKind::kIdent) return;
    if (t.upper == "OVER") Unsupported("window functions");
    if (t.upper == "CASE") Unsupported("CASE expressions");
    if (t.upper == "EXISTS") Unsupported("EXISTS");
    if (t.upper == "IS") Unsupported("IS [NOT] NULL");
    if (t.upper == "WITH") Unsupported("common table expressions");
  }

  std::unique_ptr<AstQuery> ParseQuery() {
    auto query = ParseCore();
    std::optional<SetOpKind> kind;
    if (PeekKeyword("INTERSECT")) kind = SetOpKind::kIntersect;
    if (PeekKeyword("UNION")) kind = SetOpKind::kUnion;
    if (PeekKeyword("EXCEPT")) kind = SetOpKind::kExcept;
    if (kind) {
      Advance();
      if (PeekKeyword("ALL")) Unsupported("UNION ALL");
      const std::size_t operand_offset = Peek().offset;
      query->set_kind = kind;
      query->set_operand = ParseQuery();
      if (query->set_operand->set_kind) {
        throw SqlError(SqlError::Kind::kUnsupported, operand_offset,
                       "unsupported construct: set-operation chain longer than one");
      }
    }
    return query;
  }

  std::unique_ptr<AstQuery> ParseCore() {
    auto query = std::make_unique<AstQuery>();
    query->offset = Peek().offset;
    if (PeekSymbol("(")) Unsupported("parenthesized query");
    ExpectKeyword("SELECT");
    if (AcceptKeyword("DISTINCT")) query->select_distinct = true;
    if (PeekKeyword("ALL")) Unsupported("SELECT ALL");
    do {
      query->select.push_back(ParseValue(/*allow_star=*/true));
    } while (PeekSymbol(",") && (Advance(), true));
    RejectUnsupportedKeyword();
    ExpectKeyword("FROM");
    ParseFrom(*query);
    RejectUnsupportedKeyword();
    if (AcceptKeyword("WHERE")) query->where = ParseTree();
    RejectUnsupportedKeyword();
    if (AcceptKeyword("GROUP")) {
      ExpectKeyword("BY");
      do {
        query->group_by.push_back(ParseValue(false));
      } while (PeekSymbol(",") && (Advance(), true));
    }
    if (AcceptKeyword("HAVING")) query->having = ParseTree();
    RejectUnsupportedKeyword();
    if (AcceptKeyword("ORDER")) {
      ExpectKeyword("BY");
      do {
        query->order_items.push_back(ParseValue(false));
        std::optional<OrderDirection> dir;
        if (AcceptKeyword("ASC")) dir = OrderDirection::kAsc;
        else if (AcceptKeyword("DESC")) dir = OrderDirection::kDesc;
        if (dir) {
          if (query->order_direction && *query->order_direction != *dir) {
            Unsupported("mixed ORDER BY directions");
          }
          query->order_direction = dir;
        }
      } while (PeekSymbol(",") && (Advance(), true));
      if (!query->order_direction) query->order_direction = OrderDirection::kAsc;
    }
    if (AcceptKeyword("LIMIT")) {
      const Tok &t = Peek();
      if (t.kind != TokKind::kNumber || t.text.find('.') != std::string::npos) {
        SyntaxError("expected a non-negative integer after LIMIT");
      }
      query->limit = std::stoll(t.text);
      Advance();
    }
    RejectUnsupportedKeyword();
    return query;
  }

  void ParseFrom(AstQuery &query) {
    query.from.push_back(ParseTableRef());
    while (true) {
      if (PeekKeyword("LEFT") || PeekKeyword("RIGHT") || PeekKeyword("OUTER") ||
          PeekKeyword("CROSS") || PeekKeyword("NATURAL") || PeekKeyword("FULL")) {
        Unsupported(Peek().upper + " JOIN");
      }
      if (AcceptKeyword("INNER")) {
        if (!PeekKeyword("JOIN")) SyntaxError("expected JOIN");
      }
      if (AcceptKeyword("JOIN")) {
        query.from.push_back(ParseTableRef());
        if (AcceptKeyword("ON")) {
          query.joins.push_back(ParseCondition());
          while (PeekKeyword("AND")) {
            Advance();
            query.joins.push_back(ParseCondition());
          }
          if (PeekKeyword("OR")) Unsupported("OR in join conditions");
        }
      } else if (PeekSymbol(",")) {
        Advance();
        query.from.push_back(ParseTableRef());
      } else {
        break;
      }
    }
  }

  AstTable ParseTableRef() {
    if (PeekSymbol("(")) Unsupported("subquery in FROM");
    AstTable table;
    table.offset = Peek().offset;
    table.name = ParseIdentifier("table name");
    if (AcceptKeyword("AS")) {
      table.alias = ParseIdentifier("alias");
    } else if ((Peek().kind == TokKind::kIdent && !IsReservedKeyword(Peek().upper)) ||
               Peek().kind == TokKind::kQuotedIdent) {
      table.alias = ParseIdentifier("alias");
    }
    return table;
  }

  std::string ParseIdentifier(const char *what) {
    const Tok &t = Peek();
    if (t.kind == TokKind::kQuotedIdent || (t.kind == TokKind::kIdent && !IsReservedKeyword(t.upper))) {
      Advance();
      return t.text;
    }
    SyntaxError(std::string("expected ") + what);
  }

  AstColumn ParseColumn(bool allow_star) {
    AstColumn column;
    column.offset = Peek().offset;
    if (PeekSymbol("*")) {
      if (!allow_star) SyntaxError("'*' not allowed here");
      Advance();
      column.star = true;
      return column;
    }
    RejectUnsupportedKeyword();
    std::string first = ParseIdentifier("column");
    if (PeekSymbol(".")) {
      Advance();
      column.qualifier = std::move(first);
      if (PeekSymbol("*")) {
        if (!allow_star) SyntaxError("'*' not allowed here");
        Advance();
        column.star = true;
        return column;
      }
      column.name = ParseIdentifier("column");
    } else {
      column.name = std::move(first);
    }
    return column;
  }

  AstOperand ParseOperand(bool allow_star) {
    AstOperand operand;
    const Tok &t = Peek();
    if (t.kind == TokKind::kIdent && PeekSymbol("(", 1)) {
      const auto agg = AggFromName(t.upper);
      if (!agg) {
        throw SqlError(SqlError::Kind::kUnsupported, t.offset,
                       "unsupported construct: function " + t.text);
      }
      Advance();
      Advance();
      operand.agg = *agg;
      if (AcceptKeyword("DISTINCT")) operand.distinct = true;
      operand.column = ParseColumn(/*allow_star=*/*agg == AggOp::kCount || allow_star);
      if (PeekSymbol("+") || PeekSymbol("-") || PeekSymbol("*") || PeekSymbol("/")) {
        Unsupported("arithmetic inside an aggregate");
      }
      ExpectSymbol(")");
      if (PeekKeyword("OVER")) Unsupported("window functions");
      return operand;
    }
    if (AcceptKeyword("DISTINCT")) operand.distinct = true;
    operand.column = ParseColumn(allow_star);
    return operand;
  }

  std::optional<ArithOp> PeekArith() const {
    if (PeekSymbol("+")) return ArithOp::kAdd;
    if (PeekSymbol("-")) return ArithOp::kSub;
    if (PeekSymbol("*")) return ArithOp::kMul;
    if (PeekSymbol("/")) return ArithOp::kDiv;
    return std::nullopt;
  }

  AstValue ParseValue(bool allow_star) {
    AstValue value;
    value.offset = Peek().offset;
    if (Peek().kind == TokKind::kNumber || Peek().kind == TokKind::kString) {
      Unsupported("literal where a column was expected");
    }
    value.first = ParseOperand(allow_star);
    if (const auto op = PeekArith(); op && !value.first.column.star) {
      Advance();
      if (Peek().kind == TokKind::kNumber || Peek().kind == TokKind::kString) {
        Unsupported("arithmetic with a literal");
      }
      AstOperand rhs = ParseOperand(false);
      if (PeekArith()) Unsupported("arithmetic with more than two operands");
      value.arith = std::make_pair(*op, std::move(rhs));
    }
    return value;
  }

  bool PeekLiteral() const {
    const Tok &t = Peek();
    if (t.kind == TokKind::kNumber || t.kind == TokKind::kString) return true;
    return t.kind == TokKind::kSymbol && t.text == "-" && Peek(1).kind == TokKind::kNumber;
  }

  Literal ParseLiteral() {
    Literal lit;
    if (PeekSymbol("-")) {
      Advance();
      lit.kind = Literal::Kind::kNumber;
      lit.text = "-" + Advance().text;
      return lit;
    }
    const Tok &t = Peek();
    if (t.kind == TokKind::kNumber) {
      lit.kind = Literal::Kind::kNumber;
    } else if (t.kind == TokKind::kString) {
      lit.kind = Literal::Kind::kString;
    } else {
      if (t.kind == TokKind::kIdent && t.upper == "NULL") Unsupported("NULL literal");
      SyntaxError("expected a literal");
    }
    lit.text = t.text;
    Advance();
    return lit;
  }

  std::unique_ptr<AstQuery> ParseSubquery() {
    ExpectSymbol("(");
    if (!PeekKeyword("SELECT")) {
      if (PeekLiteral()) Unsupported("literal value list");
      SyntaxError("expected SELECT");
    }
    auto sub = ParseQuery();
    ExpectSymbol(")");
    return sub;
  }

  AstCondition ParseCondition() {
    RejectUnsupportedKeyword();
    if (PeekKeyword("NOT")) Unsupported("NOT before a condition");
    if (PeekSymbol("(")) Unsupported("parenthesized condition");
    AstCondition cond;
    cond.left = ParseValue(false);
    RejectUnsupportedKeyword();
    bool negated_keyword = AcceptKeyword("NOT");
    const Tok &t = Peek();
    if (t.kind == TokKind::kIdent && t.upper == "BETWEEN") {
      Advance();
      cond.op = CompareOp::kBetween;
      cond.negated = negated_keyword;
      if (!PeekLiteral()) Unsupported("non-literal BETWEEN bound");
      cond.literal = ParseLiteral();
      ExpectKeyword("AND");
      if (!PeekLiteral()) Unsupported("non-literal BETWEEN bound");
      cond.upper = ParseLiteral();
      cond.right_kind = AstCondition::RightKind::kLiteral;
      return cond;
    }
    if (t.kind == TokKind::kIdent && t.upper == "IN") {
      Advance();
      cond.op = negated_keyword ? CompareOp::kNotIn : CompareOp::kIn;
      cond.right_kind = AstCondition::RightKind::kSubquery;
      cond.subquery = ParseSubquery();
      return cond;
    }
    if (t.kind == TokKind::kIdent && t.upper == "LIKE") {
      Advance();
      cond.op = negated_keyword ? CompareOp::kNotLike : CompareOp::kLike;
      cond.right_kind = AstCondition::RightKind::kLiteral;
      cond.literal = ParseLiteral();
      return cond;
    }
    if (negated_keyword) SyntaxError("expected IN, LIKE or BETWEEN after NOT");
    if (t.kind != TokKind::kSymbol) SyntaxError("expected a comparison operator");
    if (t.text == "=") cond.op = CompareOp::kEq;
    else if (t.text == "!=" || t.text == "<>") cond.op = CompareOp::kNe;
    else if (t.text == ">") cond.op = CompareOp::kGt;
    else if (t.text == "<") cond.op = CompareOp::kLt;
    else if (t.text == ">=") cond.op = CompareOp::kGe;
    else if (t.text == "<=") cond.op = CompareOp::kLe;
    else SyntaxError("expected a comparison operator");
    Advance();
    if (PeekSymbol("(")) {
      cond.right_kind = AstCondition::RightKind::kSubquery;
      cond.subquery = ParseSubquery();
    } else if (PeekLiteral()) {
      cond.right_kind = AstCondition::RightKind::kLiteral;
      cond.literal = ParseLiteral();
    } else {
      cond.right_kind = AstCondition::RightKind::kColumn;
      cond.column = ParseValue(false);
    }
    return cond;
  }

  AstTree ParseTree() {
    AstTree tree;
    tree.conditions.push_back(ParseCondition());
    while (PeekKeyword("AND") || PeekKeyword("OR")) {
      tree.connectors.push_back(Advance().upper == "AND" ? Connector::kAnd : Connector::kOr);
      tree.conditions.push_back(ParseCondition());
    }
    return tree;
  }

  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Binder

struct BindScope {
  std::vector<int> tables;
  std::vector<std::string> aliases;  // lowercased, parallel to tables
  const BindScope *parent = nullptr;
};

class Binder {
 public:
  explicit Binder(const DatabaseSchema &schema) : schema_(schema) {}

  SqlQuery Bind(const AstQuery &ast, const BindScope *parent) {
    SqlQuery query;
    BindScope scope;
    scope.parent = parent;
    for (const AstTable &table : ast.from) {
      const Table *resolved = schema_.FindTable(table.name);
      if (!resolved) {
        throw SqlError(SqlError::Kind::kUnknownTable, table.offset, "unknown table '" + table.name + "'");
      }
      scope.tables.push_back(resolved->id);
      scope.aliases.push_back(ToLower(table.alias));
      query.from_tables.push_back(resolved->id);
    }
    query.select_distinct = ast.select_distinct;
    for (const AstValue &value : ast.select) query.select.push_back(BindValue(value, scope));
    for (const AstCondition &cond : ast.joins) query.join_conditions.push_back(BindCondition(cond, scope));
    if (ast.where) query.where = BindTree(*ast.where, scope);
    for (const AstValue &value : ast.group_by) query.group_by.push_back(BindValue(value, scope));
    if (ast.having) {
      query.having = BindTree(*ast.having, scope);
      CheckHaving(*ast.having, *query.having, query.group_by);
    }
    if (!ast.order_items.empty()) {
      OrderBy order;
      for (const AstValue &value : ast.order_items) order.items.push_back(BindValue(value, scope));
      order.direction = ast.order_direction.value_or(OrderDirection::kAsc);
      query.order_by = std::move(order);
    }
    query.limit = ast.limit;
    if (ast.set_kind) {
      query.set_op = SetOperation{*ast.set_kind, Box<SqlQuery>(Bind(*ast.set_operand, parent))};
    }
    return query;
  }

 private:
  int ResolveQualifier(const AstColumn &column, const BindScope &scope) const {
    const std::string lower = ToLower(column.qualifier);
    for (const BindScope *s = &scope; s; s = s->parent) {
      for (std::size_t i = 0; i < s->tables.size(); ++i) {
        if (!s->aliases[i].empty() && s->aliases[i] == lower) return s->tables[i];
      }
      for (std::size_t i = 0; i < s->tables.size(); ++i) {
        if (ToLower(schema_.tables[s->tables[i]].name) == lower) return s->tables[i];
      }
    }
    throw SqlError(SqlError::Kind::kUnknownTable, column.offset,
                   "unknown table or alias '" + column.qualifier + "'");
  }

  int ResolveColumn(const AstColumn &column, const BindScope &scope) const {
    if (column.star) {
      if (!column.qualifier.empty()) ResolveQualifier(column, scope);
      return schema_.star_column_id();
    }
    if (!column.qualifier.empty()) {
      const int table = ResolveQualifier(column, scope);
      const Column *resolved = schema_.FindColumn(table, column.name);
      if (!resolved) {
        throw SqlError(SqlError::Kind::kUnknownColumn, column.offset,
                       "unknown column '" + column.qualifier + "." + column.name + "'");
      }
      return resolved->id;
    }
    for (const BindScope *s = &scope; s; s = s->parent) {
      for (int table : s->tables) {
        if (const Column *resolved = schema_.FindColumn(table, column.name)) return resolved->id;
      }
    }
    throw SqlError(SqlError::Kind::kUnknownColumn, column.offset, "unknown column '" + column.name + "'");
  }

  ColumnOperand BindOperand(const AstOperand &operand, const BindScope &scope) const {
    ColumnOperand out;
    out.agg = operand.agg;
    out.distinct = operand.distinct;
    out.column_id = ResolveColumn(operand.column, scope);
    if (operand.column.star && out.agg != AggOp::kNone && out.agg != AggOp::kCount) {
      throw SqlError(SqlError::Kind::kInvalid, operand.column.offset,
                     "star column only admits count, got " + std::string(AggName(out.agg)));
    }
    return out;
  }

  ColumnRef BindValue(const AstValue &value, const BindScope &scope) const {
    const ColumnOperand first = BindOperand(value.first, scope);
    ColumnRef ref;
    ref.agg = first.agg;
    ref.column_id = first.column_id;
    ref.distinct = first.distinct;
    if (value.arith) {
      ref.arithmetic = ColumnRef::Arithmetic{value.arith->first, BindOperand(value.arith->second, scope)};
    }
    return ref;
  }

  Condition BindCondition(const AstCondition &ast, const BindScope &scope) {
    Condition cond;
    cond.left = BindValue(ast.left, scope);
    cond.op = ast.op;
    cond.negated = ast.negated;
    switch (ast.right_kind) {
      case AstCondition::RightKind::kLiteral:
        cond.right = ast.literal;
        break;
      case AstCondition::RightKind::kColumn:
        cond.right = BindValue(ast.column, scope);
        break;
      case AstCondition::RightKind::kSubquery:
        cond.right = Box<SqlQuery>(Bind(*ast.subquery, &scope));
        break;
    }
    cond.upper = ast.upper;
    return cond;
  }

  ConditionTree BindTree(const AstTree &ast, const BindScope &scope) {
    ConditionTree tree;
    for (const AstCondition &cond : ast.conditions) tree.conditions.push_back(BindCondition(cond, scope));
    tree.connectors = ast.connectors;
    return tree;
  }

  // HAVING may only reference aggregated or grouped columns.
  static void CheckHaving(const AstTree &ast, const ConditionTree &having,
                          const std::vector<ColumnRef> &group_by) {
    auto grouped = [&](int column_id) {
      for (const ColumnRef &g : group_by) {
        if (g.column_id == column_id) return true;
      }
      return false;
    };
    for (std::size_t i = 0; i < having.conditions.size(); ++i) {
      const ColumnRef &left = having.conditions[i].left;
      bool ok = left.agg != AggOp::kNone || grouped(left.column_id);
      if (left.arithmetic && left.arithmetic->rhs.agg == AggOp::kNone &&
          !grouped(left.arithmetic->rhs.column_id)) {
        ok = false;
      }
      if (!ok) {
        throw SqlError(SqlError::Kind::kInvalid, ast.conditions[i].left.offset,
                       "HAVING references a column that is neither aggregated nor grouped");
      }
    }
  }

  const DatabaseSchema &schema_;
};

}  // namespace

SqlQuery ParseSql(std::string_view text, const DatabaseSchema &schema) {
  Parser parser(Lex(text));
  const auto ast = parser.ParseStatement();
  SqlQuery query = Binder(schema).Bind(*ast, nullptr);
  ValidateAgainstSchema(query, schema);
  return query;
}

}  // namespace sqlrobust
