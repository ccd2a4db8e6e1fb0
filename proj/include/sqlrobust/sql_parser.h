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

#ifndef SQLROBUST_SQL_PARSER_H_
#define SQLROBUST_SQL_PARSER_H_

#include <string_view>

#include "sqlrobust/error.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/sql_ir.h"

namespace sqlrobust {

// Parses a query in the Spider SQL subset and binds it against `schema`.
// Syntax is checked for the whole text before any identifier is resolved, so
// a syntax error is reported even when names are also wrong.
//
// Throws SqlError with a byte offset: kLexical/kSyntax for malformed text,
// kUnknownTable/kUnknownColumn for unresolvable identifiers, kUnsupported
// for constructs outside the subset (window functions, CTEs, outer joins,
// IS NULL, FROM-subqueries, set-operation chains longer than one), and
// kInvalid for bound queries that break an IR invariant.
SqlQuery ParseSql(std::string_view text, const DatabaseSchema &schema);

}  // namespace sqlrobust

#endif  // SQLROBUST_SQL_PARSER_H_
