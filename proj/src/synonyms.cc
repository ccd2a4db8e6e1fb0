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

#include "sqlrobust/synonyms.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "sqlrobust/error.h"
#include "sqlrobust/text.h"

namespace sqlrobust {
namespace {

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool ParseDouble(const std::string &s, double &out) {
  const char *end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

bool ContainsWords(const std::vector<std::string> &hay, const std::vector<std::string> &needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<long>(s))) return true;
  }
  return false;
}

// Also accepts a plural or singular form of the last word.
bool ContainsTarget(const std::vector<std::string> &hay, const std::vector<std::string> &target) {
  if (ContainsWords(hay, target)) return true;
  if (target.empty()) return false;
  std::vector<std::string> variant = target;
  for (const char *suffix : {"s", "es"}) {
    variant.back() = target.back() + suffix;
    if (ContainsWords(hay, variant)) return true;
  }
  if (target.back().size() > 1 && target.back().back() == 's') {
    variant.back() = target.back().substr(0, target.back().size() - 1);
    if (ContainsWords(hay, variant)) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- lexicon

void SynonymLexicon::Insert(Entries &entries, std::string_view phrase, std::vector<std::string> replacements) {
  const std::string key = NormalizePhrase(phrase);
  if (key.empty()) throw ValidationError("lexicon key is empty");
  if (IsReservedWord(key)) throw ValidationError("lexicon key '" + key + "' is a reserved word");
  std::vector<std::string> &list = entries[key];
  for (const std::string &raw : replacements) {
    const std::string repl = NormalizePhrase(raw);
    if (repl.empty()) throw ValidationError("lexicon entry '" + key + "' has an empty replacement");
    if (repl == key) throw ValidationError("lexicon entry '" + key + "' maps to itself");
    if (std::find(list.begin(), list.end(), repl) == list.end()) list.push_back(repl);
  }
}

void SynonymLexicon::Add(const std::string &db_id, std::string_view phrase,
                         std::vector<std::string> replacements) {
  Insert(db_id.empty() ? global_ : domains_[db_id], phrase, std::move(replacements));
}

SynonymLexicon SynonymLexicon::FromJson(const Json &json) {
  if (!json.is_object()) throw ValidationError("lexicon must be a JSON object");
  SynonymLexicon lexicon;
  auto read_entries = [](const Json &obj, Entries &entries, const std::string &where) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
    for (const auto &[key, value] : obj.items()) {
      if (!value.is_array() || value.empty()) {
        throw ValidationError(where + "['" + key + "'] must be a non-empty list");
      }
      std::vector<std::string> repl;
      for (const Json &v : value) {
        if (!v.is_string()) throw ValidationError(where + "['" + key + "'] holds a non-string");
        repl.push_back(v.get<std::string>());
      }
      Insert(entries, key, std::move(repl));
    }
  };
  for (const auto &[key, value] : json.items()) {
    if (key == "global") {
      read_entries(value, lexicon.global_, "global");
    } else if (key == "domains") {
      if (!value.is_object()) throw ValidationError("domains must be an object");
      for (const auto &[db_id, entries] : value.items()) {
        read_entries(entries, lexicon.domains_[db_id], "domains." + db_id);
      }
    } else {
      throw ValidationError("unknown lexicon section '" + key + "'");
    }
  }
  return lexicon;
}

SynonymLexicon SynonymLexicon::Load(const std::filesystem::path &path) {
  try {
    return FromJson(ReadJsonFile(path));
  } catch (const ValidationError &e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> SynonymLexicon::Lookup(std::string_view phrase, const std::string &db_id) const {
  const std::string key = NormalizePhrase(phrase);
  if (key.empty() || IsReservedWord(key)) return {};
  const std::vector<std::string> *found = nullptr;
  if (auto d = domains_.find(db_id); d != domains_.end()) {
    if (auto it = d->second.find(key); it != d->second.end()) found = &it->second;
  }
  if (!found) {
    if (auto it = global_.find(key); it != global_.end()) found = &it->second;
  }
  if (!found) return {};
  std::vector<std::string> out;
  for (const std::string &s : *found) {
    if (!IsReservedWord(s) && s != key) out.push_back(s);
  }
  return out;
}

Json SynonymLexicon::ToJson() const {
  Json domains = Json::object();
  for (const auto &[db_id, entries] : domains_) domains[db_id] = entries;
  return {{"global", global_}, {"domains", std::move(domains)}};
}

// -------------------------------------------------------------- embeddings

EmbeddingTable::EmbeddingTable(EmbeddingTable &&other) noexcept
    : dim_(other.dim_),
      words_(std::move(other.words_)),
      vectors_(std::move(other.vectors_)),
      norms_(std::move(other.norms_)),
      index_(std::move(other.index_)),
      misses_(other.misses_.load()) {}

EmbeddingTable &EmbeddingTable::operator=(EmbeddingTable &&other) noexcept {
  dim_ = other.dim_;
  words_ = std::move(other.words_);
  vectors_ = std::move(other.vectors_);
  norms_ = std::move(other.norms_);
  index_ = std::move(other.index_);
  misses_.store(other.misses_.load());
  return *this;
}

EmbeddingTable EmbeddingTable::Parse(std::string_view text, const std::string &source) {
  EmbeddingTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    double tmp = 0;
    if (line_no == 1 && fields.size() == 2 && ParseDouble(fields[0], tmp) && ParseDouble(fields[1], tmp)) {
      continue;
    }
    if (fields.size() < 2) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected a word and a vector");
    }
    std::vector<double> vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0;
      if (!ParseDouble(fields[i], v)) {
        throw InputError(source + ":" + std::to_string(line_no) + ": bad number '" + fields[i] + "'");
      }
      vec.push_back(v);
    }
    if (table.dim_ == 0) {
      table.dim_ = vec.size();
    } else if (vec.size() != table.dim_) {
      throw InputError(source + ":" + std::to_string(line_no) + ": dimension " + std::to_string(vec.size()) +
                       " differs from " + std::to_string(table.dim_));
    }
    std::string word = ToLower(fields[0]);
    if (table.index_.count(word)) continue;  // first casing wins
    double norm = 0;
    for (double v : vec) norm += v * v;
    table.index_.emplace(word, table.words_.size());
    table.words_.push_back(std::move(word));
    table.vectors_.push_back(std::move(vec));
    table.norms_.push_back(std::sqrt(norm));
  }
  return table;
}

EmbeddingTable EmbeddingTable::Load(const std::filesystem::path &path) {
  return Parse(ReadTextFile(path), path.string());
}

bool EmbeddingTable::Contains(std::string_view word) const { return index_.count(ToLower(word)) > 0; }

std::vector<std::pair<std::string, double>> EmbeddingTable::Neighbors(std::string_view word, std::size_t k,
                                                                      double min_similarity) const {
  const std::string key = ToLower(word);
  auto it = index_.find(key);
  if (it == index_.end()) {
    misses_.fetch_add(1);
    spdlog::debug("embedding miss for '{}'", key);
    return {};
  }
  const std::size_t self = it->second;
  const std::vector<double> &q = vectors_[self];
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (i == self || IsReservedWord(words_[i])) continue;
    double sim = 0;
    if (norms_[i] > 0 && norms_[self] > 0) {
      double dot = 0;
      for (std::size_t d = 0; d < dim_; ++d) dot += q[d] * vectors_[i][d];
      sim = dot / (norms_[i] * norms_[self]);
    }
    if (sim < min_similarity) continue;
    scored.emplace_back(words_[i], sim);
  }
  std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

// ---------------------------------------------------------- domain context

DomainContext BuildDomainContext(std::string_view target_phrase, const std::string &db_id,
                                 const std::vector<PoolQuestion> &pool, const DatabaseSchema &schema,
                                 std::size_t n, std::string_view exclude) {
  DomainContext context;
  if (n == 0) return context;
  const std::vector<std::string> target = NormalizeTokens(target_phrase);
  const std::string target_norm = NormalizePhrase(target_phrase);
  const std::string exclude_norm = NormalizePhrase(exclude);

  std::set<std::string> phrases;
  for (const SchemaItem &item : schema.Items()) {
    for (const std::string &p : schema.annotations(item).All()) {
      if (p != target_norm) phrases.insert(p);
    }
  }

  struct Ranked {
    bool has_target;
    std::size_t others;
    std::size_t length;
    std::size_t order;
    const std::string *text;
  };
  std::vector<Ranked> ranked;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const PoolQuestion &q = pool[i];
    if (q.db_id != db_id) continue;
    const std::string norm = NormalizePhrase(q.question);
    if (norm == exclude_norm || !seen.insert(norm).second) continue;
    const std::vector<std::string> words = NormalizeTokens(q.question);
    const bool has_target = ContainsTarget(words, target);
    std::size_t others = 0;
    for (const std::string &p : phrases) others += ContainsWords(words, NormalizeTokens(p)) ? 1 : 0;
    if (!has_target && others == 0) continue;
    ranked.push_back({has_target, others, q.question.size(), i, &q.question});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked &a, const Ranked &b) {
    if (a.has_target != b.has_target) return a.has_target;
    if (a.others != b.others) return a.others > b.others;
    if (a.length != b.length) return a.length < b.length;
    return a.order < b.order;
  });
  for (std::size_t i = 0; i < ranked.size() && i < n; ++i) context.sentences.push_back(*ranked[i].text);
  return context;
}

// ------------------------------------------------------ contextual proposer

Json ProposalRequest::ToJson() const {
  return {{"id", id},
          {"context", context},
          {"question", question},
          {"mask_span", {mask_begin, mask_end}},
          {"top_k", top_k}};
}

namespace {

std::vector<Proposal> ParseProposalResponse(const std::string &body, const std::string &expected_id) {
  Json json;
  try {
    json = Json::parse(body);
  } catch (const Json::exception &e) {
    throw ProtocolError(std::string("proposer response is not JSON: ") + e.what());
  }
  if (!json.is_object() || !json.contains("id") || !json.contains("candidates") ||
      !json["candidates"].is_array()) {
    throw ProtocolError("proposer response lacks id or candidates");
  }
  const Json &id = json["id"];
  if (!id.is_string() || id.get<std::string>() != expected_id) {
    throw ProtocolError("proposer response id does not match request '" + expected_id + "'");
  }
  std::vector<Proposal> out;
  for (const Json &c : json["candidates"]) {
    if (!c.is_object() || !c.contains("phrase") || !c["phrase"].is_string()) {
      throw ProtocolError("proposer candidate lacks a phrase");
    }
    Proposal p;
    p.phrase = c["phrase"].get<std::string>();
    if (c.contains("score")) {
      if (!c["score"].is_number()) throw ProtocolError("proposer candidate score is not a number");
      p.score = c["score"].get<double>();
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

HttpProposer::HttpProposer(std::string url, std::chrono::milliseconds timeout, std::ptrdiff_t max_in_flight)
    : timeout_(timeout), in_flight_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) {
    base_ = url;
    path_ = "/propose";
  } else {
    base_ = url.substr(0, path_start);
    path_ = url.substr(path_start);
  }
}

std::vector<Proposal> HttpProposer::Propose(const ProposalRequest &request) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024> &sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  httplib::Client client(base_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  auto res = client.Post(path_, request.ToJson().dump(), "application/json");
  if (!res) {
    throw TransportError("proposer " + base_ + path_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("proposer " + base_ + path_ + " returned HTTP " + std::to_string(res->status));
  }
  return ParseProposalResponse(res->body, request.id);
}

StubProposer::StubProposer(std::map<std::string, std::vector<std::string>> table, std::vector<std::string> fallback)
    : fallback_(std::move(fallback)) {
  for (auto &[k, v] : table) table_[NormalizePhrase(k)] = std::move(v);
}

std::unique_ptr<StubProposer> StubProposer::FromJson(const Json &json) {
  std::map<std::string, std::vector<std::string>> table;
  std::vector<std::string> fallback;
  try {
    if (json.contains("table")) table = json["table"].get<std::map<std::string, std::vector<std::string>>>();
    if (json.contains("fallback")) fallback = json["fallback"].get<std::vector<std::string>>();
  } catch (const Json::exception &e) {
    throw ValidationError(std::string("stub proposer config: ") + e.what());
  }
  return std::make_unique<StubProposer>(std::move(table), std::move(fallback));
}

std::vector<Proposal> StubProposer::Propose(const ProposalRequest &request) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    log_.push_back(request);
  }
  const std::vector<std::string> words = SplitWhitespace(request.question);
  if (request.mask_begin >= request.mask_end || request.mask_end > words.size()) {
    throw ProtocolError("mask span out of range");
  }
  std::string phrase;
  for (std::size_t i = request.mask_begin; i < request.mask_end; ++i) {
    if (i > request.mask_begin) phrase += ' ';
    phrase += words[i];
  }
  auto it = table_.find(NormalizePhrase(phrase));
  const std::vector<std::string> &list = it == table_.end() ? fallback_ : it->second;
  std::vector<Proposal> out;
  double score = 1.0;
  for (const std::string &s : list) {
    if (static_cast<int>(out.size()) >= request.top_k) break;
    out.push_back({s, score});
    score /= 2;
  }
  return out;
}

std::vector<ProposalRequest> StubProposer::requests() const {
  std::lock_guard<std::mutex> lock(mu_);
  return log_;
}

std::vector<std::string> ContextualCandidates(const std::vector<Token> &tokens, std::size_t begin,
                                              std::size_t end, const DomainContext &context,
                                              ContextualProposer &proposer, int top_k,
                                              const std::string &request_id) {
  if (begin >= end || end > tokens.size()) throw ValidationError("mask span out of range");
  ProposalRequest request;
  request.id = request_id;
  request.context = context.sentences;
  request.top_k = top_k;
  request.mask_begin = begin;
  request.mask_end = end;
  std::string original;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) request.question += ' ';
    request.question += tokens[i].surface;
    if (i >= begin && i < end) {
      if (i > begin) original += ' ';
      original += tokens[i].norm.empty() ? tokens[i].surface : tokens[i].norm;
    }
  }
  std::vector<std::string> out;
  for (const Proposal &p : proposer.Propose(request)) {
    const std::string phrase = NormalizePhrase(p.phrase);
    if (phrase.empty() || IsReservedWord(phrase) || phrase == original) continue;
    if (std::find(out.begin(), out.end(), phrase) == out.end()) out.push_back(phrase);
  }
  return out;
}

// --------------------------------------------------------------- providers

std::string_view ProviderName(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kLexicon: return "lexicon";
    case ProviderKind::kContextual: return "contextual";
    case ProviderKind::kEmbedding: return "embedding";
  }
  return "";
}

ProviderKind ParseProviderKind(std::string_view name) {
  const std::string lower = ToLower(name);
  if (lower == "lexicon") return ProviderKind::kLexicon;
  if (lower == "contextual") return ProviderKind::kContextual;
  if (lower == "embedding") return ProviderKind::kEmbedding;
  throw UsageError("unknown provider '" + std::string(name) + "'");
}

std::vector<ProviderKind> DefaultProviderOrder() {
  return {ProviderKind::kLexicon, ProviderKind::kContextual, ProviderKind::kEmbedding};
}

std::vector<ProviderCandidate> ProviderSet::Candidates(ProviderKind kind, const SpanQuery &query) const {
  const LinkedQuestion &linked = *query.linked;
  std::vector<std::string> words;
  for (std::size_t i = query.begin; i < query.end; ++i) words.push_back(linked.tokens[i].norm);
  const std::string phrase = JoinTokens(words, 0, words.size());

  std::vector<std::string> found;
  switch (kind) {
    case ProviderKind::kLexicon:
      if (lexicon) found = lexicon->Lookup(phrase, query.db_id);
      break;
    case ProviderKind::kEmbedding:
      if (embedding && words.size() == 1) {
        for (auto &[w, sim] : embedding->Neighbors(phrase, embedding_k, min_similarity)) {
          if (w != phrase) found.push_back(w);
        }
      }
      break;
    case ProviderKind::kContextual:
      if (contextual) {
        DomainContext context;
        if (pool && query.schema) {
          context = BuildDomainContext(phrase, query.db_id, *pool, *query.schema, context_size,
                                       Detokenize(linked.tokens));
        }
        try {
          found = ContextualCandidates(linked.tokens, query.begin, query.end, context, *contextual,
                                       contextual_top_k, query.request_id);
        } catch (const Error &e) {
          if (e.code() != ErrorCode::kTransport) throw;
          contextual_errors_.fetch_add(1);
          spdlog::warn("contextual request {} failed: {}", query.request_id, e.what());
        }
      }
      break;
  }
  std::vector<ProviderCandidate> out;
  for (std::string &s : found) out.push_back({std::move(s), kind});
  return out;
}

ProviderStats ProviderSet::stats() const {
  ProviderStats s;
  s.embedding_misses = embedding ? embedding->misses() : 0;
  s.contextual_errors = contextual_errors_.load();
  return s;
}

Json ProviderSet::Describe() const {
  Json names = Json::array();
  for (ProviderKind k : order) names.push_back(ProviderName(k));
  return {{"order", std::move(names)},
          {"lexicon", lexicon != nullptr},
          {"embedding", embedding != nullptr},
          {"contextual", contextual != nullptr},
          {"context_size", context_size},
          {"embedding_k", embedding_k},
          {"min_similarity", min_similarity},
          {"contextual_top_k", contextual_top_k}};
}

}  // namespace sqlrobust
