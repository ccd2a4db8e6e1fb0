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

#ifndef SQLROBUST_ATTACK_H_
#define SQLROBUST_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqlrobust/dataset.h"
#include "sqlrobust/json_io.h"
#include "sqlrobust/perturb.h"
#include "sqlrobust/predictor.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/synonyms.h"

namespace sqlrobust {

enum class SpanRanking { kDeletionImpact, kLinkingScore };

std::string_view SpanRankingName(SpanRanking r);
SpanRanking ParseSpanRanking(std::string_view name);

struct AttackConfig {
  std::size_t max_edits = 1;
  std::size_t k = 5;  // candidates per provider per span
  SpanRanking ranking = SpanRanking::kDeletionImpact;
  std::uint64_t seed = 0;
  std::size_t retries = 1;  // extra attempts after a transport failure
  std::size_t jobs = 1;

  // Throws UsageError when max_edits or k is zero.
  void Validate() const;
  Json ToJson() const;
};

struct AttackTrial {
  std::string question;
  bool matched = false;
  bool parse_failed = false;
  std::string phase;  // "deletion" or "candidate"
};

struct AttackResult {
  bool success = false;
  bool pre_failed = false;
  bool nondeterministic = false;  // success did not survive re-verification
  std::string final_question;
  SubstitutionPlan plan;
  // Predict calls made by the attack itself: deletion probes and candidate
  // trials. The clean check and the re-verification are counted apart.
  std::size_t queries_used = 0;
  std::size_t check_calls = 0;
  std::size_t verify_calls = 0;
  std::size_t attackable_spans = 0;
  std::vector<AttackTrial> trials;
  std::string error;

  std::size_t predict_calls() const { return check_calls + queries_used + verify_calls; }
};

// Checks the clean prediction first (pre-failed examples stop there). Spans
// are ranked once; then, span by span, up to k candidates per provider are
// tried and the first that breaks exact match ends the attack. When none
// does, the span's first candidate is kept and the next span is attacked on
// top of it, for at most max_edits spans. Successes are re-verified with one
// fresh call.
AttackResult AttackExample(Predictor &predictor, const Example &example, const DatabaseSchema &schema,
                           const ProviderSet &providers, const AttackConfig &config, std::uint64_t seed);

struct Campaign {
  std::vector<AttackResult> results;  // input order
  std::vector<Example> worstcase;     // successful question or the original
  std::size_t successes = 0;
  std::size_t pre_failed = 0;
  std::size_t attackable = 0;  // not pre-failed, no error, and at least one span
  std::size_t errors = 0;
  std::size_t nondeterministic = 0;
  double mean_queries = 0.0;  // over examples that were attacked

  // {success_rate, n, attackable, ..., per_example}.
  Json Report() const;
};

// Per-example errors are recorded and the campaign carries on. Throws
// TransportError when every example failed on transport.
Campaign GenerateWorstcaseSet(Predictor &predictor, const std::vector<Example> &dataset, const SchemaMap &schemas,
                              const ProviderSet &providers, const AttackConfig &config);

// Originals followed by the successful adversarial questions, dropping
// repeated (db_id, question) pairs.
std::vector<Example> AdversarialAugment(const std::vector<Example> &originals,
                                        const std::vector<Example> &adversarial);

}  // namespace sqlrobust

#endif  // SQLROBUST_ATTACK_H_
