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

#ifndef SQLROBUST_PERTURB_H_
#define SQLROBUST_PERTURB_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sqlrobust/dataset.h"
#include "sqlrobust/json_io.h"
#include "sqlrobust/linking.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/synonyms.h"

namespace sqlrobust {

inline constexpr std::size_t kMaxReplacementTokens = 5;

struct SubstitutableSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string phrase;  // normalized
  LinkTag tag;
};

// Tagged spans, minus any span holding a reserved word, in position order.
std::vector<SubstitutableSpan> FindSubstitutableSpans(const LinkedQuestion &linked);

struct Edit {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string original;
  std::string replacement;
  LinkTarget target;
  LinkKind link_kind = LinkKind::kExactTable;
  ProviderKind provider = ProviderKind::kLexicon;
  bool truncated = false;
};

struct SubstitutionPlan {
  std::vector<Edit> edits;  // sorted by begin

  bool empty() const { return edits.empty(); }
};

// Seed for the example at `index`; independent of processing order.
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

// Unbiased draw from [0, n) that is identical across standard libraries.
std::uint64_t UniformIndex(std::mt19937_64 &rng, std::uint64_t n);

// Picks up to `budget` spans uniformly at random (seeded); each takes the
// first candidate of the first provider in `providers.order` that has one.
// Replacements longer than five tokens are truncated and flagged.
SubstitutionPlan PlanSubstitutions(const LinkedQuestion &linked, const std::string &db_id,
                                   const DatabaseSchema &schema, const ProviderSet &providers,
                                   std::size_t budget, std::uint64_t seed);

struct PerturbedExample {
  Example original;
  std::string perturbed_question;
  SubstitutionPlan plan;
  std::string error;  // set when the example was passed through on error

  // {db_id, question, query, original_question, edits}.
  Json ToJson(const DatabaseSchema *schema) const;
  Example AsExample() const;
};

// Applies edits right to left. A replacement at the first word of the
// question takes that word's leading capital. Throws ValidationError on
// overlapping or out-of-range edits.
PerturbedExample ApplyPlan(const Example &example, const SubstitutionPlan &plan);

// Plan edits as JSON.
Json PlanToJson(const SubstitutionPlan &plan, const DatabaseSchema *schema);

struct SynOptions {
  std::size_t budget = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct SynResult {
  std::vector<PerturbedExample> examples;  // input order
  SubstitutionReport report;
  std::size_t total_edits = 0;
  std::size_t modified = 0;
  std::size_t truncations = 0;
  std::size_t errors = 0;

  Json Summary() const;
};

SynResult GenerateSynDataset(const std::vector<Example> &dataset, const SchemaMap &schemas,
                             const ProviderSet &providers, const SynOptions &options);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &fn);

}  // namespace sqlrobust

#endif  // SQLROBUST_PERTURB_H_
