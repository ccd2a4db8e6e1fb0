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

#include "sqlrobust/dataset.h"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "sqlrobust/error.h"
#include "sqlrobust/linking.h"
#include "sqlrobust/sql_parser.h"
#include "sqlrobust/text.h"

namespace sqlrobust {

const SqlQuery &Example::Gold(const DatabaseSchema &schema) const {
  if (!gold_) gold_ = std::make_shared<const SqlQuery>(ParseSql(query, schema));
  return *gold_;
}

Json Example::ToJson() const { return {{"db_id", db_id}, {"question", question}, {"query", query}}; }

std::vector<Example> ParseExamples(const Json &array, std::vector<RowError> *errors) {
  if (!array.is_array()) throw InputError("dataset must be a JSON array");
  std::vector<Example> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    const Json &row = array[i];
    std::string problem;
    if (!row.is_object()) {
      problem = "not an object";
    } else {
      for (const char *field : {"db_id", "question", "query"}) {
        if (!row.contains(field)) {
          problem = std::string("missing \"") + field + "\"";
          break;
        }
        if (!row[field].is_string()) {
          problem = std::string("\"") + field + "\" is not a string";
          break;
        }
      }
    }
    if (!problem.empty()) {
      if (!errors) throw InputError("row " + std::to_string(i) + ": " + problem);
      errors->push_back({i, problem});
      continue;
    }
    Example ex;
    ex.db_id = row["db_id"].get<std::string>();
    ex.question = row["question"].get<std::string>();
    ex.query = row["query"].get<std::string>();
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<Example> LoadExamples(const std::filesystem::path &path, std::vector<RowError> *errors) {
  const Json json = ReadJsonFile(path);
  try {
    return ParseExamples(json, errors);
  } catch (const InputError &e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void CheckDatabases(const std::vector<Example> &examples, const SchemaMap &schemas) {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!schemas.count(examples[i].db_id)) {
      throw ValidationError("example " + std::to_string(i) + ": unknown db_id '" + examples[i].db_id + "'");
    }
  }
}

std::string_view EditClassName(EditClass c) {
  switch (c) {
    case EditClass::kSchemaWord: return "schema-word";
    case EditClass::kCellValue: return "cell-value";
    case EditClass::kUnclassified: return "unclassified";
  }
  return "";
}

namespace {

std::string Key(const Token &t) { return t.is_word ? t.norm : t.surface; }

std::string JoinKeys(const std::vector<Token> &tokens, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) out += ' ';
    out += Key(tokens[i]);
  }
  return out;
}

}  // namespace

std::vector<AlignedEdit> AlignQuestions(std::string_view original, std::string_view modified) {
  const std::vector<Token> a = Tokenize(original);
  const std::vector<Token> b = Tokenize(modified);
  const std::size_t n = a.size(), m = b.size();
  // lcs[i][j] = LCS length of a[i..] and b[j..].
  std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = Key(a[i]) == Key(b[j]) ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<AlignedEdit> edits;
  std::size_t i = 0, j = 0;
  std::optional<AlignedEdit> open;
  auto close = [&] {
    if (!open) return;
    open->orig_end = i;
    open->mod_end = j;
    open->original = JoinKeys(a, open->orig_begin, open->orig_end);
    open->replacement = JoinKeys(b, open->mod_begin, open->mod_end);
    edits.push_back(*open);
    open.reset();
  };
  while (i < n || j < m) {
    if (i < n && j < m && Key(a[i]) == Key(b[j]) && lcs[i][j] == lcs[i + 1][j + 1] + 1) {
      close();
      ++i;
      ++j;
      continue;
    }
    if (!open) {
      open = AlignedEdit{};
      open->orig_begin = i;
      open->mod_begin = j;
    }
    if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
      ++j;
    } else {
      ++i;
    }
  }
  close();
  return edits;
}

EditClass ClassifyEdit(const AlignedEdit &edit, std::string_view original_question, const DatabaseSchema &schema) {
  if (edit.orig_begin == edit.orig_end) return EditClass::kUnclassified;
  const LinkedQuestion linked = Link(original_question, schema);
  bool cell = false;
  for (const LinkTag &tag : linked.tags) {
    if (tag.end <= edit.orig_begin || tag.begin >= edit.orig_end) continue;
    if (tag.kind == LinkKind::kCellValue) {
      cell = true;
    } else {
      return EditClass::kSchemaWord;
    }
  }
  return cell ? EditClass::kCellValue : EditClass::kUnclassified;
}

Json DiffStats::ToJson() const {
  return {{"corpus_size", corpus_size},
          {"modified_count", modified_count},
          {"total_edits", total_edits},
          {"schema_word_mods", schema_word_mods},
          {"cell_value_mods", cell_value_mods},
          {"unclassified_mods", unclassified_mods},
          {"distinct_replacement_words", distinct_replacement_words},
          {"distinct_replacement_phrases", distinct_replacement_phrases},
          {"mean_changes_per_question", mean_changes_per_question},
          {"per_domain_mean_modified", per_domain_mean_modified}};
}

void SubstitutionReport::Add(const std::string &db_id, const std::string &original, const std::string &replacement,
                             std::size_t count) {
  domains_[db_id][{original, replacement}] += count;
}

void SubstitutionReport::Merge(const SubstitutionReport &other) {
  for (const auto &[db_id, pairs] : other.domains_) {
    for (const auto &[pair, count] : pairs) domains_[db_id][pair] += count;
  }
}

std::size_t SubstitutionReport::Count(const std::string &db_id, const std::string &original,
                                      const std::string &replacement) const {
  auto d = domains_.find(db_id);
  if (d == domains_.end()) return 0;
  auto it = d->second.find({original, replacement});
  return it == d->second.end() ? 0 : it->second;
}

std::vector<SubstitutionReport::Pair> SubstitutionReport::DistinctPairs() const {
  std::set<Pair> pairs;
  for (const auto &[db_id, entries] : domains_) {
    for (const auto &[pair, count] : entries) pairs.insert(pair);
  }
  return {pairs.begin(), pairs.end()};
}

Json SubstitutionReport::ToJson() const {
  Json out = Json::object();
  for (const auto &[db_id, entries] : domains_) {
    Json list = Json::array();
    for (const auto &[pair, count] : entries) {
      list.push_back({{"original", pair.first}, {"replacement", pair.second}, {"count", count}});
    }
    out[db_id] = std::move(list);
  }
  return out;
}

std::string SubstitutionReport::ToText() const {
  std::size_t w_orig = 8, w_repl = 11;
  for (const auto &[db_id, entries] : domains_) {
    for (const auto &[pair, count] : entries) {
      w_orig = std::max(w_orig, pair.first.size());
      w_repl = std::max(w_repl, pair.second.size());
    }
  }
  std::ostringstream os;
  for (const auto &[db_id, entries] : domains_) {
    os << "== " << db_id << " (" << entries.size() << " pairs)\n";
    os << std::left << std::setw(static_cast<int>(w_orig)) << "original" << "  "
       << std::setw(static_cast<int>(w_repl)) << "replacement" << "  count\n";
    for (const auto &[pair, count] : entries) {
      os << std::left << std::setw(static_cast<int>(w_orig)) << pair.first << "  "
         << std::setw(static_cast<int>(w_repl)) << pair.second << "  " << count << "\n";
    }
    os << "\n";
  }
  return os.str();
}

DiffResult ComputeDiff(const std::vector<Example> &original, const std::vector<Example> &modified,
                       const SchemaMap &schemas) {
  if (original.size() != modified.size()) {
    throw ValidationError("cannot align corpora of sizes " + std::to_string(original.size()) + " and " +
                          std::to_string(modified.size()));
  }
  DiffResult result;
  DiffStats &s = result.stats;
  s.corpus_size = original.size();
  std::set<std::string> words, phrases;
  std::map<std::string, std::set<std::string>> per_domain;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const Example &o = original[i];
    const Example &m = modified[i];
    if (o.db_id != m.db_id) {
      throw ValidationError("row " + std::to_string(i) + ": db_id '" + o.db_id + "' vs '" + m.db_id + "'");
    }
    per_domain[o.db_id];
    const std::vector<AlignedEdit> edits = AlignQuestions(o.question, m.question);
    if (edits.empty()) continue;
    ++s.modified_count;
    s.total_edits += edits.size();
    auto schema = schemas.find(o.db_id);
    for (const AlignedEdit &e : edits) {
      const EditClass c = schema == schemas.end() ? EditClass::kUnclassified
                                                  : ClassifyEdit(e, o.question, schema->second);
      switch (c) {
        case EditClass::kSchemaWord: ++s.schema_word_mods; break;
        case EditClass::kCellValue: ++s.cell_value_mods; break;
        case EditClass::kUnclassified: ++s.unclassified_mods; break;
      }
      if (!e.replacement.empty()) {
        (e.replacement.find(' ') == std::string::npos ? words : phrases).insert(e.replacement);
      }
      if (!e.original.empty()) per_domain[o.db_id].insert(e.original);
      result.report.Add(o.db_id, e.original, e.replacement);
    }
  }
  s.distinct_replacement_words = words.size();
  s.distinct_replacement_phrases = phrases.size();
  if (s.corpus_size > 0) {
    s.mean_changes_per_question = static_cast<double>(s.total_edits) / static_cast<double>(s.corpus_size);
  }
  if (!per_domain.empty()) {
    std::size_t total = 0;
    for (const auto &[db, set] : per_domain) total += set.size();
    s.per_domain_mean_modified = static_cast<double>(total) / static_cast<double>(per_domain.size());
  }
  return result;
}

SplitOverlap ComputeSplitOverlap(const SubstitutionReport &train, const SubstitutionReport &dev) {
  const auto train_pairs = train.DistinctPairs();
  const auto dev_pairs = dev.DistinctPairs();
  const std::set<SubstitutionReport::Pair> train_set(train_pairs.begin(), train_pairs.end());
  SplitOverlap out;
  for (const auto &p : dev_pairs) out.shared += train_set.count(p);
  if (!dev_pairs.empty()) out.dev_fraction = static_cast<double>(out.shared) / static_cast<double>(dev_pairs.size());
  return out;
}

}  // namespace sqlrobust
