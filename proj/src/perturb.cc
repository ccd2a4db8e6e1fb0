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

#include "sqlrobust/perturb.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <exception>
#include <mutex>
#include <thread>

#include <spdlog/spdlog.h>

#include "sqlrobust/error.h"
#include "sqlrobust/text.h"

namespace sqlrobust {

std::vector<SubstitutableSpan> FindSubstitutableSpans(const LinkedQuestion &linked) {
  std::vector<SubstitutableSpan> spans;
  for (const LinkTag &tag : linked.tags) {
    if (tag.begin >= tag.end || tag.end > linked.tokens.size()) continue;
    std::vector<std::string> words;
    bool reserved = false;
    for (std::size_t i = tag.begin; i < tag.end; ++i) {
      words.push_back(linked.tokens[i].norm);
      reserved = reserved || IsReservedWord(linked.tokens[i].norm);
    }
    if (reserved) continue;
    spans.push_back({tag.begin, tag.end, JoinTokens(words, 0, words.size()), tag});
  }
  std::sort(spans.begin(), spans.end(),
            [](const SubstitutableSpan &a, const SubstitutableSpan &b) { return a.begin < b.begin; });
  return spans;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ index);
}

std::uint64_t UniformIndex(std::mt19937_64 &rng, std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling; std::uniform_int_distribution differs across vendors.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

SubstitutionPlan PlanSubstitutions(const LinkedQuestion &linked, const std::string &db_id,
                                   const DatabaseSchema &schema, const ProviderSet &providers,
                                   std::size_t budget, std::uint64_t seed) {
  SubstitutionPlan plan;
  if (budget == 0) return plan;
  std::vector<SubstitutableSpan> spans = FindSubstitutableSpans(linked);
  std::mt19937_64 rng(seed);
  std::size_t request = 0;
  while (plan.edits.size() < budget && !spans.empty()) {
    const std::size_t pick = UniformIndex(rng, spans.size());
    const SubstitutableSpan span = spans[pick];
    spans.erase(spans.begin() + static_cast<long>(pick));

    SpanQuery query;
    query.linked = &linked;
    query.begin = span.begin;
    query.end = span.end;
    query.db_id = db_id;
    query.schema = &schema;
    for (ProviderKind kind : providers.order) {
      query.request_id = db_id + ":" + std::to_string(seed) + ":" + std::to_string(request++);
      std::vector<ProviderCandidate> found = providers.Candidates(kind, query);
      if (found.empty()) continue;
      Edit edit;
      edit.begin = span.begin;
      edit.end = span.end;
      edit.original = span.phrase;
      edit.target = span.tag.target;
      edit.link_kind = span.tag.kind;
      edit.provider = kind;
      std::vector<std::string> words = NormalizeTokens(found.front().phrase);
      if (words.size() > kMaxReplacementTokens) {
        spdlog::info("truncating replacement '{}' for '{}' to {} tokens", found.front().phrase, span.phrase,
                     kMaxReplacementTokens);
        words.resize(kMaxReplacementTokens);
        edit.truncated = true;
      }
      edit.replacement = JoinTokens(words, 0, words.size());
      if (edit.replacement == edit.original) continue;
      plan.edits.push_back(std::move(edit));
      break;
    }
  }
  std::sort(plan.edits.begin(), plan.edits.end(), [](const Edit &a, const Edit &b) { return a.begin < b.begin; });
  return plan;
}

Json PlanToJson(const SubstitutionPlan &plan, const DatabaseSchema *schema) {
  Json edits = Json::array();
  for (const Edit &e : plan.edits) {
    Json j = {{"span", {e.begin, e.end}},
              {"original", e.original},
              {"replacement", e.replacement},
              {"kind", LinkKindName(e.link_kind)},
              {"provider", ProviderName(e.provider)}};
    if (schema) j["target"] = LinkTargetToJson(e.target, *schema);
    if (e.truncated) j["truncated"] = true;
    edits.push_back(std::move(j));
  }
  return edits;
}

Json PerturbedExample::ToJson(const DatabaseSchema *schema) const {
  Json out = {{"db_id", original.db_id},
              {"question", perturbed_question},
              {"query", original.query},
              {"original_question", original.question},
              {"edits", PlanToJson(plan, schema)}};
  if (!error.empty()) out["error"] = error;
  return out;
}

Example PerturbedExample::AsExample() const {
  Example ex;
  ex.db_id = original.db_id;
  ex.question = perturbed_question;
  ex.query = original.query;
  return ex;
}

PerturbedExample ApplyPlan(const Example &example, const SubstitutionPlan &plan) {
  PerturbedExample out;
  out.original = example;
  out.plan = plan;
  std::vector<Token> tokens = Tokenize(example.question);

  std::vector<const Edit *> order;
  for (const Edit &e : plan.edits) {
    if (e.begin >= e.end || e.end > tokens.size()) {
      throw ValidationError("edit span [" + std::to_string(e.begin) + ", " + std::to_string(e.end) +
                            ") out of range for a question of " + std::to_string(tokens.size()) + " tokens");
    }
    order.push_back(&e);
  }
  std::sort(order.begin(), order.end(), [](const Edit *a, const Edit *b) { return a->begin < b->begin; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->begin < order[i - 1]->end) throw ValidationError("plan has overlapping edits");
  }

  std::size_t first_word = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_word) {
      first_word = i;
      break;
    }
  }

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const Edit &e = **it;
    std::vector<std::string> words = NormalizeTokens(e.replacement);
    if (words.empty()) throw ValidationError("edit replacement is empty");
    if (e.begin == first_word) {
      const std::string &surface = tokens[e.begin].surface;
      if (!surface.empty() && std::isupper(static_cast<unsigned char>(surface[0]))) {
        words[0][0] = static_cast<char>(std::toupper(static_cast<unsigned char>(words[0][0])));
      }
    }
    std::vector<Token> repl;
    for (std::size_t k = 0; k < words.size(); ++k) {
      Token t;
      t.surface = words[k];
      t.norm = ToLower(words[k]);
      t.space_before = k == 0 ? tokens[e.begin].space_before : true;
      t.is_word = true;
      repl.push_back(std::move(t));
    }
    tokens.erase(tokens.begin() + static_cast<long>(e.begin), tokens.begin() + static_cast<long>(e.end));
    tokens.insert(tokens.begin() + static_cast<long>(e.begin), repl.begin(), repl.end());
  }
  out.perturbed_question = plan.empty() ? example.question : Detokenize(tokens);
  return out;
}

void ParallelFor(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
  for (std::thread &t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

Json SynResult::Summary() const {
  return {{"n", examples.size()},
          {"modified", modified},
          {"edits", total_edits},
          {"truncations", truncations},
          {"errors", errors}};
}

SynResult GenerateSynDataset(const std::vector<Example> &dataset, const SchemaMap &schemas,
                             const ProviderSet &providers, const SynOptions &options) {
  SynResult result;
  result.examples.resize(dataset.size());
  ParallelFor(dataset.size(), options.jobs, [&](std::size_t i) {
    const Example &ex = dataset[i];
    PerturbedExample &out = result.examples[i];
    auto schema = schemas.find(ex.db_id);
    if (schema == schemas.end()) {
      out.original = ex;
      out.perturbed_question = ex.question;
      out.error = "unknown db_id '" + ex.db_id + "'";
      return;
    }
    const LinkedQuestion linked = Link(ex.question, schema->second);
    const SubstitutionPlan plan = PlanSubstitutions(linked, ex.db_id, schema->second, providers, options.budget,
                                                    DeriveSeed(options.seed, i));
    out = ApplyPlan(ex, plan);
  });
  for (const PerturbedExample &p : result.examples) {
    if (!p.error.empty()) {
      ++result.errors;
      spdlog::warn("example passed through: {}", p.error);
    }
    if (!p.plan.empty()) ++result.modified;
    result.total_edits += p.plan.edits.size();
    for (const Edit &e : p.plan.edits) {
      result.truncations += e.truncated ? 1 : 0;
      result.report.Add(p.original.db_id, e.original, e.replacement);
    }
  }
  return result;
}

}  // namespace sqlrobust
