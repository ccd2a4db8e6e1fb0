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

#ifndef SQLROBUST_SYNONYMS_H_
#define SQLROBUST_SYNONYMS_H_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sqlrobust/json_io.h"
#include "sqlrobust/linking.h"
#include "sqlrobust/schema.h"

namespace sqlrobust {

// Curated phrase -> replacements map, global plus per-database. Keys and
// replacements are normalized on load.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // {"global": {phrase: [syn, ...]}, "domains": {db_id: {phrase: [...]}}}.
  // Throws ValidationError for reserved-word keys, self mappings and empty
  // replacements.
  static SynonymLexicon FromJson(const Json &json);
  static SynonymLexicon Load(const std::filesystem::path &path);

  void Add(const std::string &db_id, std::string_view phrase, std::vector<std::string> replacements);

  // Per-database entries shadow global ones entirely. Never returns a reserved
  // word or `phrase` itself.
  std::vector<std::string> Lookup(std::string_view phrase, const std::string &db_id) const;

  bool empty() const { return global_.empty() && domains_.empty(); }
  Json ToJson() const;

 private:
  using Entries = std::map<std::string, std::vector<std::string>>;
  static void Insert(Entries &entries, std::string_view phrase, std::vector<std::string> replacements);

  Entries global_;
  std::map<std::string, Entries> domains_;
};

// Whitespace-separated text vectors, one "word v1 ... vd" per line. A leading
// "count dim" header line is accepted and skipped.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(EmbeddingTable &&other) noexcept;
  EmbeddingTable &operator=(EmbeddingTable &&other) noexcept;

  static EmbeddingTable Parse(std::string_view text, const std::string &source = "<memory>");
  static EmbeddingTable Load(const std::filesystem::path &path);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool Contains(std::string_view word) const;

  // Up to k neighbours by descending cosine, ties broken lexicographically.
  // Excludes the word itself and reserved words. Out-of-vocabulary words
  // yield an empty list and bump misses().
  std::vector<std::pair<std::string, double>> Neighbors(std::string_view word, std::size_t k,
                                                        double min_similarity = 0.0) const;

  std::size_t misses() const { return misses_.load(); }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<std::vector<double>> vectors_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
  mutable std::atomic<std::size_t> misses_{0};
};

struct PoolQuestion {
  std::string db_id;
  std::string question;
};

struct DomainContext {
  std::vector<std::string> sentences;
};

inline constexpr std::size_t kDefaultContextSize = 3;

// Up to n same-database questions ranked by (contains the target phrase,
// number of distinct other schema phrases, shorter first). Questions with
// neither are dropped; `exclude` (the question being perturbed) never
// appears.
DomainContext BuildDomainContext(std::string_view target_phrase, const std::string &db_id,
                                 const std::vector<PoolQuestion> &pool, const DatabaseSchema &schema,
                                 std::size_t n, std::string_view exclude);

struct ProposalRequest {
  std::string id;
  std::vector<std::string> context;
  std::string question;  // space-joined tokens
  std::size_t mask_begin = 0;
  std::size_t mask_end = 0;
  int top_k = 5;

  Json ToJson() const;
};

struct Proposal {
  std::string phrase;
  double score = 0.0;
};

// Masked-span proposer behind the JSON contract. Implementations must be
// safe to call from several threads.
class ContextualProposer {
 public:
  virtual ~ContextualProposer() = default;
  // Throws TransportError or ProtocolError.
  virtual std::vector<Proposal> Propose(const ProposalRequest &request) = 0;
};

// POSTs each request to `url` and matches the response by id.
class HttpProposer : public ContextualProposer {
 public:
  HttpProposer(std::string url, std::chrono::milliseconds timeout, std::ptrdiff_t max_in_flight);
  std::vector<Proposal> Propose(const ProposalRequest &request) override;

 private:
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::counting_semaphore<1024> in_flight_;
};

// Offline stand-in: answers from a phrase -> candidates table, falling back
// to `fallback` for unknown phrases.
class StubProposer : public ContextualProposer {
 public:
  StubProposer(std::map<std::string, std::vector<std::string>> table, std::vector<std::string> fallback = {});
  static std::unique_ptr<StubProposer> FromJson(const Json &json);

  std::vector<Proposal> Propose(const ProposalRequest &request) override;
  std::vector<ProposalRequest> requests() const;

 private:
  std::map<std::string, std::vector<std::string>> table_;
  std::vector<std::string> fallback_;
  mutable std::mutex mu_;
  std::vector<ProposalRequest> log_;
};

// Candidates for tokens[begin, end) of `tokens`, minus reserved words and
// the original phrase, deduplicated in service order.
std::vector<std::string> ContextualCandidates(const std::vector<Token> &tokens, std::size_t begin,
                                              std::size_t end, const DomainContext &context,
                                              ContextualProposer &proposer, int top_k,
                                              const std::string &request_id);

enum class ProviderKind { kLexicon, kContextual, kEmbedding };

std::string_view ProviderName(ProviderKind kind);
ProviderKind ParseProviderKind(std::string_view name);
std::vector<ProviderKind> DefaultProviderOrder();

struct ProviderCandidate {
  std::string phrase;
  ProviderKind provider = ProviderKind::kLexicon;
};

struct SpanQuery {
  const LinkedQuestion *linked = nullptr;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string db_id;
  const DatabaseSchema *schema = nullptr;
  std::string request_id;
};

struct ProviderStats {
  std::size_t embedding_misses = 0;
  std::size_t contextual_errors = 0;
};

// The configured providers. Missing providers are skipped. Contextual
// transport and protocol failures are logged and counted, and the request
// yields no candidates.
class ProviderSet {
 public:
  const SynonymLexicon *lexicon = nullptr;
  const EmbeddingTable *embedding = nullptr;
  ContextualProposer *contextual = nullptr;
  const std::vector<PoolQuestion> *pool = nullptr;
  std::vector<ProviderKind> order = DefaultProviderOrder();
  std::size_t context_size = kDefaultContextSize;
  std::size_t embedding_k = 5;
  double min_similarity = 0.0;
  int contextual_top_k = 5;

  std::vector<ProviderCandidate> Candidates(ProviderKind kind, const SpanQuery &query) const;
  ProviderStats stats() const;
  Json Describe() const;

 private:
  mutable std::atomic<std::size_t> contextual_errors_{0};
};

}  // namespace sqlrobust

#endif  // SQLROBUST_SYNONYMS_H_
