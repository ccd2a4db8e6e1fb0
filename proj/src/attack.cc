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

#include "sqlrobust/attack.h"

#include <algorithm>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "sqlrobust/error.h"
#include "sqlrobust/linking.h"
#include "sqlrobust/text.h"

namespace sqlrobust {

std::string_view SpanRankingName(SpanRanking r) {
  return r == SpanRanking::kDeletionImpact ? "deletion" : "linking";
}

SpanRanking ParseSpanRanking(std::string_view name) {
  const std::string lower = ToLower(name);
  if (lower == "deletion" || lower == "deletion-impact") return SpanRanking::kDeletionImpact;
  if (lower == "linking" || lower == "linking-score") return SpanRanking::kLinkingScore;
  throw UsageError("unknown span ranking '" + std::string(name) + "'");
}

void AttackConfig::Validate() const {
  if (max_edits == 0) throw UsageError("max_edits must be at least 1");
  if (k == 0) throw UsageError("k must be at least 1");
}

Json AttackConfig::ToJson() const {
  return {{"max_edits", max_edits}, {"k", k},         {"ranking", SpanRankingName(ranking)},
          {"seed", seed},           {"retries", retries}, {"jobs", jobs}};
}

namespace {

std::string WithoutSpan(const std::vector<Token> &tokens, std::size_t begin, std::size_t end) {
  std::vector<Token> rest;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i >= begin && i < end) continue;
    rest.push_back(tokens[i]);
  }
  if (begin < rest.size() && begin < tokens.size()) rest[begin].space_before = tokens[begin].space_before;
  return Detokenize(rest);
}

}  // namespace

AttackResult AttackExample(Predictor &predictor, const Example &example, const DatabaseSchema &schema,
                           const ProviderSet &providers, const AttackConfig &config, std::uint64_t seed) {
  config.Validate();
  AttackResult result;
  result.final_question = example.question;
  const SqlQuery gold = Canonicalize(example.Gold(schema));

  auto call = [&](const std::string &question, std::size_t &counter) {
    PredictRequest request{example.db_id, question, &example};
    for (std::size_t attempt = 0;; ++attempt) {
      ++counter;
      try {
        return Predict(predictor, request, schema);
      } catch (const Error &e) {
        if (e.code() != ErrorCode::kTransport || attempt >= config.retries) throw;
        spdlog::warn("retrying after transport failure: {}", e.what());
      }
    }
  };

  const Prediction clean = call(example.question, result.check_calls);
  if (!PredictionMatches(clean, gold)) {
    result.pre_failed = true;
    return result;
  }

  const LinkedQuestion linked = Link(example.question, schema);
  std::vector<SubstitutableSpan> spans = FindSubstitutableSpans(linked);
  result.attackable_spans = spans.size();

  if (config.ranking == SpanRanking::kDeletionImpact) {
    std::vector<std::pair<bool, std::size_t>> breaks;  // (still matches, position)
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const std::string probe = WithoutSpan(linked.tokens, spans[i].begin, spans[i].end);
      const Prediction p = call(probe, result.queries_used);
      const bool matched = PredictionMatches(p, gold);
      result.trials.push_back({probe, matched, !p.parsed.has_value(), "deletion"});
      breaks.emplace_back(matched, i);
    }
    std::stable_sort(breaks.begin(), breaks.end());
    std::vector<SubstitutableSpan> ranked;
    for (const auto &[matched, i] : breaks) ranked.push_back(spans[i]);
    spans = std::move(ranked);
  } else {
    std::stable_sort(spans.begin(), spans.end(), [](const SubstitutableSpan &a, const SubstitutableSpan &b) {
      const bool ea = IsExact(a.tag.kind), eb = IsExact(b.tag.kind);
      if (ea != eb) return ea;
      return a.end - a.begin > b.end - b.begin;
    });
  }

  SubstitutionPlan kept;
  std::size_t attacked = 0;
  std::size_t request = 0;
  for (const SubstitutableSpan &span : spans) {
    if (attacked >= config.max_edits) break;
    std::optional<Edit> first;
    SpanQuery query;
    query.linked = &linked;
    query.begin = span.begin;
    query.end = span.end;
    query.db_id = example.db_id;
    query.schema = &schema;
    for (ProviderKind kind : providers.order) {
      query.request_id = example.db_id + ":" + std::to_string(seed) + ":" + std::to_string(request++);
      std::vector<ProviderCandidate> candidates = providers.Candidates(kind, query);
      if (candidates.size() > config.k) candidates.resize(config.k);
      for (const ProviderCandidate &c : candidates) {
        std::vector<std::string> words = NormalizeTokens(c.phrase);
        Edit edit;
        edit.begin = span.begin;
        edit.end = span.end;
        edit.original = span.phrase;
        edit.target = span.tag.target;
        edit.link_kind = span.tag.kind;
        edit.provider = kind;
        if (words.size() > kMaxReplacementTokens) {
          words.resize(kMaxReplacementTokens);
          edit.truncated = true;
        }
        edit.replacement = JoinTokens(words, 0, words.size());
        if (edit.replacement.empty() || edit.replacement == edit.original) continue;
        if (!first) first = edit;

        SubstitutionPlan trial = kept;
        trial.edits.push_back(edit);
        std::sort(trial.edits.begin(), trial.edits.end(),
                  [](const Edit &a, const Edit &b) { return a.begin < b.begin; });
        const PerturbedExample perturbed = ApplyPlan(example, trial);
        const Prediction p = call(perturbed.perturbed_question, result.queries_used);
        const bool matched = PredictionMatches(p, gold);
        result.trials.push_back({perturbed.perturbed_question, matched, !p.parsed.has_value(), "candidate"});
        if (matched) continue;

        const Prediction again = call(perturbed.perturbed_question, result.verify_calls);
        if (PredictionMatches(again, gold)) {
          result.nondeterministic = true;
          spdlog::warn("prediction for '{}' changed on re-verification", perturbed.perturbed_question);
          continue;
        }
        result.success = true;
        result.final_question = perturbed.perturbed_question;
        result.plan = std::move(trial);
        return result;
      }
    }
    if (first) {
      kept.edits.push_back(*first);
      ++attacked;
    }
  }
  return result;
}

Json Campaign::Report() const {
  const std::size_t n = results.size();
  const std::size_t attempted = n - pre_failed - errors;
  Json per_example = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const AttackResult &r = results[i];
    Json trials = Json::array();
    for (const AttackTrial &t : r.trials) {
      trials.push_back({{"phase", t.phase},
                        {"question", t.question},
                        {"verdict", t.matched ? "match" : (t.parse_failed ? "unparseable" : "mismatch")}});
    }
    Json row = {{"id", i},
                {"success", r.success},
                {"pre_failed", r.pre_failed},
                {"queries_used", r.queries_used},
                {"predict_calls", r.predict_calls()},
                {"attackable_spans", r.attackable_spans},
                {"edits", PlanToJson(r.plan, nullptr)},
                {"final_question", r.final_question},
                {"trials", std::move(trials)}};
    if (r.nondeterministic) row["nondeterministic"] = true;
    if (!r.error.empty()) row["error"] = r.error;
    per_example.push_back(std::move(row));
  }
  return {{"success_rate", attempted ? static_cast<double>(successes) / static_cast<double>(attempted) : 0.0},
          {"n", n},
          {"attackable", attackable},
          {"successes", successes},
          {"pre_failed", pre_failed},
          {"errors", errors},
          {"nondeterministic", nondeterministic},
          {"mean_queries", mean_queries},
          {"per_example", std::move(per_example)}};
}

Campaign GenerateWorstcaseSet(Predictor &predictor, const std::vector<Example> &dataset, const SchemaMap &schemas,
                              const ProviderSet &providers, const AttackConfig &config) {
  config.Validate();
  Campaign campaign;
  campaign.results.resize(dataset.size());
  std::vector<char> transport_failed(dataset.size(), 0);
  ParallelFor(dataset.size(), config.jobs, [&](std::size_t i) {
    const Example &ex = dataset[i];
    AttackResult &r = campaign.results[i];
    try {
      auto schema = schemas.find(ex.db_id);
      if (schema == schemas.end()) throw ValidationError("unknown db_id '" + ex.db_id + "'");
      r = AttackExample(predictor, ex, schema->second, providers, config, DeriveSeed(config.seed, i));
    } catch (const Error &e) {
      r = AttackResult{};
      r.final_question = ex.question;
      r.error = e.what();
      transport_failed[i] = e.code() == ErrorCode::kTransport;
    }
  });

  std::size_t attacked = 0, total_queries = 0, transport = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const AttackResult &r = campaign.results[i];
    Example out = dataset[i];
    if (!r.error.empty()) {
      ++campaign.errors;
      transport += transport_failed[i];
      spdlog::warn("example {} failed: {}", i, r.error);
    } else if (r.pre_failed) {
      ++campaign.pre_failed;
    } else {
      ++attacked;
      total_queries += r.queries_used;
      if (r.attackable_spans > 0) ++campaign.attackable;
    }
    if (r.success) {
      ++campaign.successes;
      out.question = r.final_question;
    }
    if (r.nondeterministic) ++campaign.nondeterministic;
    campaign.worstcase.push_back(std::move(out));
  }
  if (attacked) campaign.mean_queries = static_cast<double>(total_queries) / static_cast<double>(attacked);
  if (!dataset.empty() && transport == dataset.size()) {
    throw TransportError("every request failed: " + campaign.results.front().error);
  }
  return campaign;
}

std::vector<Example> AdversarialAugment(const std::vector<Example> &originals,
                                        const std::vector<Example> &adversarial) {
  std::vector<Example> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto *list : {&originals, &adversarial}) {
    for (const Example &ex : *list) {
      if (seen.emplace(ex.db_id, ex.question).second) out.push_back(ex);
    }
  }
  return out;
}

}  // namespace sqlrobust
