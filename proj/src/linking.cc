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

#include "sqlrobust/linking.h"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_set>

namespace sqlrobust {
namespace {

const std::unordered_set<std::string> &Stopwords() {
  static const std::unordered_set<std::string> kWords = {
      "a",     "an",  "the",  "of",   "in",    "on",   "at",  "to",   "for",   "from", "by",
      "with",  "and", "or",   "is",   "are",   "was",  "were", "be",  "what",  "which", "who",
      "whom",  "how", "many", "much", "all",   "each", "every", "that", "this", "those", "these",
      "their", "its", "his",  "her",  "there", "do",   "does", "did",  "me",   "give", "show",
      "list",  "find", "as",  "than", "more",  "most", "less", "least"};
  return kWords;
}

bool AllStopwords(const std::vector<std::string> &words) {
  return std::all_of(words.begin(), words.end(),
                     [](const std::string &w) { return Stopwords().count(w) > 0; });
}

struct Entry {
  LinkTarget target;
  std::string annotation;
};

int TargetRank(LinkTarget::Kind kind) { return static_cast<int>(kind); }

// Exact phrase index plus an index of strict contiguous sub-sequences of each
// annotation, for partial matches.
struct PhraseIndex {
  std::map<std::string, std::vector<Entry>> exact;
  std::map<std::string, std::vector<Entry>> partial;

  void AddAnnotation(const LinkTarget &target, const std::string &phrase) {
    exact[phrase].push_back({target, phrase});
    const std::vector<std::string> words = NormalizeTokens(phrase);
    for (std::size_t b = 0; b < words.size(); ++b) {
      for (std::size_t e = b + 1; e <= words.size(); ++e) {
        if (e - b == words.size()) continue;
        std::vector<std::string> sub(words.begin() + b, words.begin() + e);
        if (AllStopwords(sub)) continue;
        auto &list = partial[JoinTokens(words, b, e)];
        const bool seen = std::any_of(list.begin(), list.end(), [&](const Entry &x) { return x.target == target; });
        if (!seen) list.push_back({target, phrase});
      }
    }
  }
};

PhraseIndex BuildIndex(const DatabaseSchema &schema) {
  PhraseIndex index;
  for (const Table &table : schema.tables) {
    for (const std::string &phrase : table.annotations.All()) {
      index.AddAnnotation({LinkTarget::Kind::kTable, table.id, ""}, phrase);
    }
  }
  for (const Column &column : schema.columns) {
    if (column.is_star()) continue;
    for (const std::string &phrase : column.annotations.All()) {
      index.AddAnnotation({LinkTarget::Kind::kColumn, column.id, ""}, phrase);
    }
  }
  for (const Column &column : schema.columns) {
    for (const std::string &value : column.cell_values) {
      const std::string norm = NormalizePhrase(value);
      if (norm.empty()) continue;
      index.exact[norm].push_back({{LinkTarget::Kind::kCellValue, column.id, value}, norm});
    }
  }
  return index;
}

LinkKind KindFor(LinkTarget::Kind target, bool exact) {
  switch (target) {
    case LinkTarget::Kind::kTable: return exact ? LinkKind::kExactTable : LinkKind::kPartialTable;
    case LinkTarget::Kind::kColumn: return exact ? LinkKind::kExactColumn : LinkKind::kPartialColumn;
    case LinkTarget::Kind::kCellValue: return LinkKind::kCellValue;
  }
  return LinkKind::kCellValue;
}

struct Candidate {
  std::size_t begin;
  std::size_t end;
  bool exact;
  Entry entry;

  auto Key() const {
    return std::make_tuple(-static_cast<long>(end - begin), exact ? 0 : 1, begin,
                           TargetRank(entry.target.kind), entry.target.id, entry.target.literal);
  }
};

// First occurrence of `needle` inside one of the word runs.
std::optional<std::pair<std::size_t, std::size_t>> FindOccurrence(
    const std::vector<Token> &tokens, const std::vector<std::pair<std::size_t, std::size_t>> &runs,
    const std::vector<std::string> &needle) {
  if (needle.empty()) return std::nullopt;
  for (const auto &[rb, re] : runs) {
    if (re - rb < needle.size()) continue;
    for (std::size_t s = rb; s + needle.size() <= re; ++s) {
      bool match = true;
      for (std::size_t k = 0; k < needle.size() && match; ++k) match = tokens[s + k].norm == needle[k];
      if (match) return std::make_pair(s, s + needle.size());
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view LinkKindName(LinkKind kind) {
  switch (kind) {
    case LinkKind::kExactTable: return "exact-table";
    case LinkKind::kPartialTable: return "partial-table";
    case LinkKind::kExactColumn: return "exact-column";
    case LinkKind::kPartialColumn: return "partial-column";
    case LinkKind::kCellValue: return "cell-value";
  }
  return "";
}

bool IsExact(LinkKind kind) { return kind != LinkKind::kPartialTable && kind != LinkKind::kPartialColumn; }

std::string LinkedQuestion::SpanText(std::size_t begin, std::size_t end) const {
  std::string out;
  for (std::size_t i = begin; i < end && i < tokens.size(); ++i) {
    if (i > begin && tokens[i].space_before) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> WordRuns(const std::vector<Token> &tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (!tokens[i].is_word) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < tokens.size() && tokens[j].is_word) ++j;
    runs.emplace_back(i, j);
    i = j;
  }
  return runs;
}

LinkedQuestion Link(std::string_view question, const DatabaseSchema &schema) {
  LinkedQuestion linked;
  linked.tokens = Tokenize(question);
  const PhraseIndex index = BuildIndex(schema);

  std::vector<Candidate> candidates;
  for (const auto &[rb, re] : WordRuns(linked.tokens)) {
    for (std::size_t b = rb; b < re; ++b) {
      for (std::size_t n = 1; n <= kMaxLinkNgram && b + n <= re; ++n) {
        std::string phrase;
        for (std::size_t k = b; k < b + n; ++k) {
          if (k > b) phrase += ' ';
          phrase += linked.tokens[k].norm;
        }
        if (auto it = index.exact.find(phrase); it != index.exact.end()) {
          for (const Entry &e : it->second) candidates.push_back({b, b + n, true, e});
        }
        if (auto it = index.partial.find(phrase); it != index.partial.end()) {
          for (const Entry &e : it->second) candidates.push_back({b, b + n, false, e});
        }
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate &a, const Candidate &b) { return a.Key() < b.Key(); });

  std::vector<char> taken(linked.tokens.size(), 0);
  for (const Candidate &c : candidates) {
    const LinkKind kind = KindFor(c.entry.target.kind, c.exact);
    auto same = std::find_if(linked.tags.begin(), linked.tags.end(), [&](const LinkTag &t) {
      return t.begin == c.begin && t.end == c.end && t.kind == kind;
    });
    if (same != linked.tags.end()) {
      const bool dup = same->target == c.entry.target ||
                       std::find(same->also_matches.begin(), same->also_matches.end(), c.entry.target) !=
                           same->also_matches.end();
      if (!dup) same->also_matches.push_back(c.entry.target);
      continue;
    }
    bool free = true;
    for (std::size_t k = c.begin; k < c.end && free; ++k) free = !taken[k];
    if (!free) continue;
    for (std::size_t k = c.begin; k < c.end; ++k) taken[k] = 1;
    LinkTag tag;
    tag.begin = c.begin;
    tag.end = c.end;
    tag.target = c.entry.target;
    tag.kind = kind;
    tag.matched_annotation = c.entry.annotation;
    linked.tags.push_back(std::move(tag));
  }
  std::sort(linked.tags.begin(), linked.tags.end(),
            [](const LinkTag &a, const LinkTag &b) { return a.begin < b.begin; });
  return linked;
}

const std::string &ResolvedSchema::selected(SchemaItem item) const {
  return item.kind == SchemaItem::Kind::kTable ? table_selected.at(static_cast<std::size_t>(item.id))
                                               : column_selected.at(static_cast<std::size_t>(item.id));
}

ResolvedSchema DefaultResolution(const DatabaseSchema &schema) {
  ResolvedSchema resolved;
  resolved.base = schema;
  for (const Table &table : schema.tables) resolved.table_selected.push_back(table.annotations.default_phrase());
  for (const Column &column : schema.columns) {
    resolved.column_selected.push_back(column.annotations.default_phrase());
  }
  return resolved;
}

ResolvedSchema MasSelect(std::string_view question, const DatabaseSchema &schema) {
  ResolvedSchema resolved = DefaultResolution(schema);
  const std::vector<Token> tokens = Tokenize(question);
  const auto runs = WordRuns(tokens);

  std::map<std::pair<std::size_t, std::size_t>, std::vector<SchemaItem>> by_span;
  for (const SchemaItem &item : schema.Items()) {
    std::size_t best_len = 0;
    std::optional<std::pair<std::size_t, std::size_t>> best_span;
    std::optional<std::string> best;
    for (const std::string &phrase : schema.annotations(item).All()) {
      const std::vector<std::string> words = NormalizeTokens(phrase);
      auto span = FindOccurrence(tokens, runs, words);
      if (span && words.size() > best_len) {
        best_len = words.size();
        best_span = span;
        best = phrase;
      }
    }
    if (!best) continue;
    (item.kind == SchemaItem::Kind::kTable ? resolved.table_selected : resolved.column_selected)
        [static_cast<std::size_t>(item.id)] = *best;
    by_span[*best_span].push_back(item);
  }
  for (auto &[span, items] : by_span) {
    if (items.size() > 1) resolved.collisions.push_back({span.first, span.second, items});
  }
  return resolved;
}

DatabaseSchema ModelView(const ResolvedSchema &resolved) {
  DatabaseSchema view = resolved.base;
  for (Table &table : view.tables) {
    table.annotations = AnnotationSet::FromDefault(resolved.table_selected.at(static_cast<std::size_t>(table.id)));
  }
  for (Column &column : view.columns) {
    column.annotations =
        AnnotationSet::FromDefault(resolved.column_selected.at(static_cast<std::size_t>(column.id)));
  }
  return view;
}

Json ResolveForModel(const ResolvedSchema &resolved) { return SerializeSchema(ModelView(resolved)); }

Json LinkTargetToJson(const LinkTarget &target, const DatabaseSchema &schema) {
  switch (target.kind) {
    case LinkTarget::Kind::kTable:
      return schema.ItemPath({SchemaItem::Kind::kTable, target.id});
    case LinkTarget::Kind::kColumn:
      return schema.ItemPath({SchemaItem::Kind::kColumn, target.id});
    case LinkTarget::Kind::kCellValue:
      return {{"column", schema.ItemPath({SchemaItem::Kind::kColumn, target.id})}, {"value", target.literal}};
  }
  return nullptr;
}

Json LinkedQuestionToJson(const LinkedQuestion &linked, const DatabaseSchema &schema) {
  Json tokens = Json::array();
  for (const Token &t : linked.tokens) tokens.push_back(t.surface);
  Json tags = Json::array();
  for (const LinkTag &tag : linked.tags) {
    Json also = Json::array();
    for (const LinkTarget &t : tag.also_matches) also.push_back(LinkTargetToJson(t, schema));
    tags.push_back({{"span", {tag.begin, tag.end}},
                    {"text", linked.SpanText(tag.begin, tag.end)},
                    {"kind", LinkKindName(tag.kind)},
                    {"target", LinkTargetToJson(tag.target, schema)},
                    {"matched_annotation", tag.matched_annotation},
                    {"also_matches", std::move(also)}});
  }
  return {{"tokens", std::move(tokens)}, {"tags", std::move(tags)}};
}

Json ResolvedSchemaToJson(const ResolvedSchema &resolved) {
  const DatabaseSchema &schema = resolved.base;
  Json selected = Json::object();
  for (const SchemaItem &item : schema.Items()) {
    const std::string &phrase = resolved.selected(item);
    selected[schema.ItemPath(item)] = {{"selected", phrase},
                                       {"is_default", phrase == schema.annotations(item).default_phrase()}};
  }
  Json collisions = Json::array();
  for (const MasCollision &c : resolved.collisions) {
    Json items = Json::array();
    for (const SchemaItem &item : c.items) items.push_back(schema.ItemPath(item));
    collisions.push_back({{"span", {c.begin, c.end}}, {"items", std::move(items)}});
  }
  return {{"db_id", schema.db_id},
          {"selected", std::move(selected)},
          {"collisions", std::move(collisions)},
          {"schema", ResolveForModel(resolved)}};
}

}  // namespace sqlrobust
