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

#ifndef SQLROBUST_DATASET_H_
#define SQLROBUST_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sqlrobust/json_io.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/sql_ir.h"

namespace sqlrobust {

struct Example {
  Example() = default;
  Example(std::string db, std::string q, std::string sql)
      : db_id(std::move(db)), question(std::move(q)), query(std::move(sql)) {}

  std::string db_id;
  std::string question;
  std::string query;

  // Parsed on first use and cached. Not safe to call concurrently on the same
  // Example. Throws SqlError.
  const SqlQuery &Gold(const DatabaseSchema &schema) const;

  Json ToJson() const;

 private:
  mutable std::shared_ptr<const SqlQuery> gold_;
};

struct RowError {
  std::size_t index = 0;
  std::string message;
};

// Rows that are not objects with string db_id/question/query are collected in
// `errors` (when given) and skipped. Without `errors`, the first bad row
// throws InputError naming its index.
std::vector<Example> ParseExamples(const Json &array, std::vector<RowError> *errors = nullptr);
std::vector<Example> LoadExamples(const std::filesystem::path &path, std::vector<RowError> *errors = nullptr);

// Throws ValidationError naming the first example whose db_id is unknown.
void CheckDatabases(const std::vector<Example> &examples, const SchemaMap &schemas);

enum class EditClass { kSchemaWord, kCellValue, kUnclassified };
std::string_view EditClassName(EditClass c);

// One contiguous difference between an aligned question pair. Token indices
// refer to each side's own Tokenize() output.
struct AlignedEdit {
  std::size_t orig_begin = 0;
  std::size_t orig_end = 0;
  std::size_t mod_begin = 0;
  std::size_t mod_end = 0;
  std::string original;     // normalized, space-joined
  std::string replacement;  // normalized, space-joined
};

// Token-level LCS alignment; adjacent unmatched tokens form one edit.
std::vector<AlignedEdit> AlignQuestions(std::string_view original, std::string_view modified);

// Classifies against links found in the original question: any overlapping
// table or column tag makes a schema-word edit, otherwise any overlapping
// cell-value tag makes a cell-value edit.
EditClass ClassifyEdit(const AlignedEdit &edit, std::string_view original_question, const DatabaseSchema &schema);

struct DiffStats {
  std::size_t corpus_size = 0;
  std::size_t modified_count = 0;
  std::size_t total_edits = 0;
  std::size_t schema_word_mods = 0;
  std::size_t cell_value_mods = 0;
  std::size_t unclassified_mods = 0;
  // Distinct replacement strings, single-word and multi-word.
  std::size_t distinct_replacement_words = 0;
  std::size_t distinct_replacement_phrases = 0;
  // total_edits / corpus_size.
  double mean_changes_per_question = 0.0;
  // Mean over databases in the corpus of distinct modified original phrases.
  double per_domain_mean_modified = 0.0;

  Json ToJson() const;
};

// Deduplicated (original -> replacement) pairs per db_id with counts. Holds no
// question text.
class SubstitutionReport {
 public:
  using Pair = std::pair<std::string, std::string>;

  void Add(const std::string &db_id, const std::string &original, const std::string &replacement,
           std::size_t count = 1);
  void Merge(const SubstitutionReport &other);

  const std::map<std::string, std::map<Pair, std::size_t>> &domains() const { return domains_; }
  bool empty() const { return domains_.empty(); }
  std::size_t Count(const std::string &db_id, const std::string &original, const std::string &replacement) const;

  // Distinct pairs across all domains.
  std::vector<Pair> DistinctPairs() const;

  Json ToJson() const;
  std::string ToText() const;

 private:
  std::map<std::string, std::map<Pair, std::size_t>> domains_;
};

struct DiffResult {
  DiffStats stats;
  SubstitutionReport report;
};

// `original` and `modified` must be index-aligned with equal db_ids; throws
// ValidationError otherwise. Unknown db_ids leave edits unclassified.
DiffResult ComputeDiff(const std::vector<Example> &original, const std::vector<Example> &modified,
                       const SchemaMap &schemas);

inline DiffStats ComputeDiffStats(const std::vector<Example> &original, const std::vector<Example> &modified,
                                  const SchemaMap &schemas) {
  return ComputeDiff(original, modified, schemas).stats;
}

inline SubstitutionReport BuildSubstitutionReport(const std::vector<Example> &original,
                                                  const std::vector<Example> &modified, const SchemaMap &schemas) {
  return ComputeDiff(original, modified, schemas).report;
}

struct SplitOverlap {
  std::size_t shared = 0;
  double dev_fraction = 0.0;
};

// Pairs are compared across domains. The fraction is over the dev report's
// distinct pairs, 0 when it has none.
SplitOverlap ComputeSplitOverlap(const SubstitutionReport &train, const SubstitutionReport &dev);

}  // namespace sqlrobust

#endif  // SQLROBUST_DATASET_H_
