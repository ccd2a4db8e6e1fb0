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

#include "sqlrobust/cli.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sqlrobust/attack.h"
#include "sqlrobust/dataset.h"
#include "sqlrobust/error.h"
#include "sqlrobust/eval.h"
#include "sqlrobust/json_io.h"
#include "sqlrobust/linking.h"
#include "sqlrobust/perturb.h"
#include "sqlrobust/predictor.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/sql_parser.h"
#include "sqlrobust/synonyms.h"
#include "sqlrobust/text.h"

namespace sqlrobust {
namespace {

std::size_t DefaultJobs() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::size_t jobs = DefaultJobs();
  std::string log_level = "warn";
  std::string out;
};

struct SchemaOpts {
  std::string tables;
  std::vector<std::string> annotations;
  std::vector<std::string> cell_values;
  std::string db_id;
  bool lenient_foreign_keys = false;
};

struct ProviderOpts {
  std::string lexicon;
  std::string embeddings;
  std::string proposer_url;
  std::string proposer_stub;
  std::vector<std::string> providers = {"lexicon", "contextual", "embedding"};
  std::size_t context_size = kDefaultContextSize;
  std::size_t embedding_k = 5;
  double min_similarity = 0.0;
  int contextual_top_k = 5;
  int proposer_timeout_ms = 10000;
  int max_in_flight = 4;
};

struct PredictorOpts {
  std::string kind = "baseline";
  std::string command;
  std::string url;
  int timeout_ms = 30000;
  int max_in_flight = 4;
};

// Everything a subcommand can take; each subcommand registers the subset it
// uses.
struct Options {
  Common common;
  SchemaOpts schema;
  ProviderOpts providers;
  PredictorOpts predictor;
  std::string dataset;
  std::string question;
  std::string gold;
  std::string predictions;
  std::string report;
  std::string text_out;
  std::string original;
  std::string modified;
  std::string dev_original;
  std::string dev_modified;
  std::string augment_out;
  std::size_t budget = 1;
  std::size_t max_edits = 1;
  std::size_t k = 5;
  std::string ranking = "deletion";
  std::size_t retries = 1;
  bool mas = false;
};

std::string EnvName(const std::string &long_name) {
  std::string out = "SQLROBUST_";
  for (char c : long_name) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

template <typename T>
CLI::Option *Add(CLI::App *app, const std::string &name, T &var, const std::string &help) {
  CLI::Option *opt = app->add_option("--" + name, var, help)->envname(EnvName(name));
  return opt->capture_default_str();
}

CLI::Option *AddFlag(CLI::App *app, const std::string &name, bool &var, const std::string &help) {
  return app->add_flag("--" + name, var, help)->envname(EnvName(name));
}

void AddCommon(CLI::App *app, Common &c) {
  Add(app, "config", c.config, "JSON config file; flags and SQLROBUST_* variables override it");
  Add(app, "seed", c.seed, "Seed for every random choice");
  Add(app, "jobs", c.jobs, "Worker threads");
  Add(app, "log-level", c.log_level, "trace|debug|info|warn|error|off");
  Add(app, "out", c.out, "Primary output path");
}

void AddSchema(CLI::App *app, SchemaOpts &s, bool annotations = true) {
  Add(app, "tables", s.tables, "tables.json");
  if (annotations) Add(app, "annotations", s.annotations, "Annotation files (repeatable)");
  Add(app, "cell-values", s.cell_values, "Cell-value files (repeatable)");
  Add(app, "db-id", s.db_id, "Database for flat annotation/cell-value files and --question");
  AddFlag(app, "lenient-foreign-keys", s.lenient_foreign_keys, "Accept foreign keys within one table");
}

void AddProviders(CLI::App *app, ProviderOpts &p) {
  Add(app, "lexicon", p.lexicon, "Synonym lexicon JSON");
  Add(app, "embeddings", p.embeddings, "Text word vectors");
  Add(app, "proposer-url", p.proposer_url, "Contextual proposer endpoint");
  Add(app, "proposer-stub", p.proposer_stub, "Offline proposer table JSON");
  Add(app, "providers", p.providers, "Provider order")->delimiter(',');
  Add(app, "context-size", p.context_size, "Domain-context sentences per proposer request");
  Add(app, "embedding-k", p.embedding_k, "Embedding neighbours per word");
  Add(app, "min-similarity", p.min_similarity, "Minimum cosine for embedding neighbours");
  Add(app, "contextual-top-k", p.contextual_top_k, "Candidates requested from the proposer");
  Add(app, "proposer-timeout-ms", p.proposer_timeout_ms, "Proposer request timeout");
  Add(app, "proposer-max-in-flight", p.max_in_flight, "Concurrent proposer requests");
}

void AddPredictor(CLI::App *app, PredictorOpts &p) {
  Add(app, "predictor", p.kind, "baseline|baseline-mas|echo|subprocess|http");
  Add(app, "predictor-cmd", p.command, "Command line for the subprocess predictor");
  Add(app, "predictor-url", p.url, "Endpoint for the HTTP predictor");
  Add(app, "timeout-ms", p.timeout_ms, "Per-request predictor timeout");
  Add(app, "max-in-flight", p.max_in_flight, "Concurrent HTTP predictor requests");
}

std::string JsonScalarToString(const Json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Fills options that neither a flag nor the environment set.
void ApplyConfigFile(CLI::App *sub, const std::string &path) {
  if (path.empty()) return;
  const Json cfg = ReadJsonFile(path);
  if (!cfg.is_object()) throw InputError(path + ": config must be a JSON object");
  auto apply = [&](const Json &obj, bool strict) {
    for (const auto &[key, value] : obj.items()) {
      if (value.is_object()) continue;
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (name == "config") continue;
      CLI::Option *opt = sub->get_option_no_throw("--" + name);
      if (!opt) {
        if (strict) throw UsageError(path + ": '" + key + "' is not an option of " + sub->get_name());
        continue;
      }
      if (opt->count() > 0) continue;
      std::vector<std::string> values;
      if (value.is_array()) {
        for (const Json &v : value) values.push_back(JsonScalarToString(v));
      } else {
        values.push_back(JsonScalarToString(value));
      }
      opt->add_result(values);
      opt->run_callback();
    }
  };
  apply(cfg, false);
  if (cfg.contains(sub->get_name()) && cfg[sub->get_name()].is_object()) apply(cfg[sub->get_name()], true);
}

Json EffectiveConfig(const CLI::App *sub) {
  Json out = Json::object();
  for (const CLI::Option *opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto &results = opt->results();
      if (opt->get_expected_max() > 1 || results.size() > 1) {
        out[name] = results;
      } else {
        out[name] = results.empty() ? "" : results.front();
      }
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

bool WasSet(const CLI::App *sub, const std::string &name) {
  const CLI::Option *opt = sub->get_option_no_throw("--" + name);
  return opt && opt->count() > 0;
}

void Require(const CLI::App *sub, std::initializer_list<const char *> names) {
  for (const char *name : names) {
    if (!WasSet(sub, name)) throw UsageError(sub->get_name() + " requires --" + name);
  }
}

Json Metadata(const CLI::App *sub, const Options &o) {
  return {{"tool", "sqlrobust"},
          {"version", kVersion},
          {"command", sub->get_name()},
          {"seed", o.common.seed},
          {"generated_at", UtcTimestamp()}};
}

SchemaMap LoadSchemaSet(const SchemaOpts &s) {
  SchemaLoadOptions options;
  options.strict_foreign_keys = !s.lenient_foreign_keys;
  SchemaMap schemas = IndexSchemas(LoadSchemas(s.tables, options));
  for (const std::string &path : s.annotations) AttachAnnotationFile(schemas, ReadJsonFile(path), s.db_id);
  for (const std::string &path : s.cell_values) AttachCellValueFile(schemas, ReadJsonFile(path), s.db_id);
  return schemas;
}

// Questions to process: --dataset rows, or a single --question on --db-id.
std::vector<Example> LoadInputs(const CLI::App *sub, const Options &o) {
  if (WasSet(sub, "dataset")) return LoadExamples(o.dataset);
  if (WasSet(sub, "question")) {
    if (o.schema.db_id.empty()) throw UsageError("--question needs --db-id");
    Example ex;
    ex.db_id = o.schema.db_id;
    ex.question = o.question;
    return {ex};
  }
  throw UsageError(sub->get_name() + " requires --dataset or --question");
}

struct ProviderBundle {
  std::optional<SynonymLexicon> lexicon;
  std::optional<EmbeddingTable> embedding;
  std::unique_ptr<ContextualProposer> proposer;
  std::vector<PoolQuestion> pool;
  ProviderSet set;
};

std::unique_ptr<ProviderBundle> BuildProviders(const ProviderOpts &p, const std::vector<Example> &pool) {
  auto bundle = std::make_unique<ProviderBundle>();
  if (!p.lexicon.empty()) bundle->lexicon = SynonymLexicon::Load(p.lexicon);
  if (!p.embeddings.empty()) bundle->embedding = EmbeddingTable::Load(p.embeddings);
  if (!p.proposer_url.empty() && !p.proposer_stub.empty()) {
    throw UsageError("--proposer-url and --proposer-stub are exclusive");
  }
  if (!p.proposer_url.empty()) {
    bundle->proposer = std::make_unique<HttpProposer>(p.proposer_url, std::chrono::milliseconds(p.proposer_timeout_ms),
                                                      p.max_in_flight);
  } else if (!p.proposer_stub.empty()) {
    bundle->proposer = StubProposer::FromJson(ReadJsonFile(p.proposer_stub));
  }
  for (const Example &ex : pool) bundle->pool.push_back({ex.db_id, ex.question});
  ProviderSet &set = bundle->set;
  set.lexicon = bundle->lexicon ? &*bundle->lexicon : nullptr;
  set.embedding = bundle->embedding ? &*bundle->embedding : nullptr;
  set.contextual = bundle->proposer.get();
  set.pool = &bundle->pool;
  set.order.clear();
  for (const std::string &name : p.providers) set.order.push_back(ParseProviderKind(name));
  set.context_size = p.context_size;
  set.embedding_k = p.embedding_k;
  set.min_similarity = p.min_similarity;
  set.contextual_top_k = p.contextual_top_k;
  if (p.min_similarity < 0 || p.min_similarity > 1) throw UsageError("--min-similarity must be within [0, 1]");
  if (p.embedding_k == 0) throw UsageError("--embedding-k must be at least 1");
  return bundle;
}

Json ProviderStatsJson(const ProviderSet &set) {
  const ProviderStats s = set.stats();
  return {{"embedding_misses", s.embedding_misses}, {"contextual_errors", s.contextual_errors}};
}

std::vector<std::string> SplitCommand(const std::string &cmd) {
  std::istringstream is(cmd);
  std::vector<std::string> argv;
  for (std::string part; is >> part;) argv.push_back(part);
  return argv;
}

std::unique_ptr<Predictor> MakePredictor(const PredictorOpts &p, const SchemaMap *schemas) {
  const std::chrono::milliseconds timeout(p.timeout_ms);
  if (p.kind == "baseline") return std::make_unique<BaselinePredictor>(schemas, false);
  if (p.kind == "baseline-mas") return std::make_unique<BaselinePredictor>(schemas, true);
  if (p.kind == "echo") return std::make_unique<EchoGoldPredictor>();
  if (p.kind == "subprocess") {
    if (p.command.empty()) throw UsageError("--predictor subprocess needs --predictor-cmd");
    return std::make_unique<SubprocessPredictor>(SplitCommand(p.command), timeout);
  }
  if (p.kind == "http") {
    if (p.url.empty()) throw UsageError("--predictor http needs --predictor-url");
    return std::make_unique<HttpPredictor>(p.url, timeout, p.max_in_flight);
  }
  throw UsageError("unknown predictor '" + p.kind + "'");
}

void PrintSummary(std::ostream &out, const Json &summary) { out << summary.dump() << std::endl; }

std::string SidecarPath(const std::string &explicit_path, const std::string &out) {
  return explicit_path.empty() ? out + ".report.json" : explicit_path;
}

// ---------------------------------------------------------------- commands

int CmdEvaluate(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"gold", "predictions", "tables", "out"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> gold = LoadExamples(o.gold);
  CheckDatabases(gold, schemas);

  std::map<std::size_t, std::string> predictions;
  Json unmatched = Json::array();
  {
    std::istringstream lines(ReadTextFile(o.predictions));
    std::size_t line_no = 0;
    for (std::string line; std::getline(lines, line);) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      Json row;
      try {
        row = Json::parse(line);
      } catch (const Json::exception &e) {
        throw InputError(o.predictions + ":" + std::to_string(line_no) + ": not JSON");
      }
      if (row.is_object() && row.contains("metadata") && !row.contains("sql")) continue;
      if (!row.is_object() || !row.contains("sql") || !row["sql"].is_string()) {
        throw InputError(o.predictions + ":" + std::to_string(line_no) + ": expected {index|id, sql}");
      }
      const Json &key = row.contains("index") ? row["index"] : row.contains("id") ? row["id"] : Json();
      std::optional<std::size_t> index;
      if (key.is_number_unsigned() || (key.is_number_integer() && key.get<long long>() >= 0)) {
        index = key.get<std::size_t>();
      } else if (key.is_string()) {
        try {
          std::size_t used = 0;
          const unsigned long long v = std::stoull(key.get<std::string>(), &used);
          if (used == key.get<std::string>().size()) index = v;
        } catch (const std::exception &) {
        }
      }
      if (!index) throw InputError(o.predictions + ":" + std::to_string(line_no) + ": bad index or id");
      if (*index >= gold.size() || predictions.count(*index)) {
        unmatched.push_back({{"line", line_no}, {"index", *index}});
        continue;
      }
      predictions[*index] = row["sql"].get<std::string>();
    }
  }

  std::vector<EvalResult> results;
  ComponentScores total;
  Json unparseable = Json::array(), missing = Json::array(), unsupported = Json::array(), per_example = Json::array();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const DatabaseSchema &schema = schemas.at(gold[i].db_id);
    std::optional<SqlQuery> g;
    try {
      g = gold[i].Gold(schema);
    } catch (const SqlError &e) {
      unsupported.push_back({{"index", i}, {"error", e.what()}});
      continue;
    }
    EvalResult r;
    auto it = predictions.find(i);
    if (it == predictions.end()) {
      missing.push_back(i);
      r.components = CompareComponents(ComponentUnits{}, ExtractComponents(Canonicalize(*g)));
    } else {
      try {
        r = Evaluate(ParseSql(it->second, schema), *g);
      } catch (const SqlError &e) {
        unparseable.push_back({{"index", i}, {"sql", it->second}, {"error", e.what()}});
        r.components = CompareComponents(ComponentUnits{}, ExtractComponents(Canonicalize(*g)));
      }
    }
    total += r.components;
    per_example.push_back({{"index", i}, {"exact_match", r.exact_match}});
    results.push_back(r);
  }
  const Json accuracy = results.empty() ? Json(nullptr) : Json(Accuracy(results));
  std::size_t hits = 0;
  for (const EvalResult &r : results) hits += r.exact_match;

  Json report = {{"metadata", Metadata(sub, o)},
                 {"config", EffectiveConfig(sub)},
                 {"metric", {{"keywords_include_distinct", true}, {"join_conditions_scored", false}}},
                 {"n", results.size()},
                 {"exact_matches", hits},
                 {"accuracy", accuracy},
                 {"components", ComponentScoresToJson(total)},
                 {"unparseable", std::move(unparseable)},
                 {"missing", std::move(missing)},
                 {"unsupported_gold", std::move(unsupported)},
                 {"unmatched_predictions", std::move(unmatched)},
                 {"per_example", std::move(per_example)}};
  WriteJsonFile(o.common.out, report);
  PrintSummary(out, {{"command", "evaluate"},
                     {"n", results.size()},
                     {"accuracy", accuracy},
                     {"unparseable", report["unparseable"].size()},
                     {"out", o.common.out}});
  return 0;
}

int CmdPerturb(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"dataset", "tables", "out", "seed"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> dataset = LoadExamples(o.dataset);
  auto providers = BuildProviders(o.providers, dataset);
  SynOptions options;
  options.budget = o.budget;
  options.seed = o.common.seed;
  options.jobs = o.common.jobs;
  const SynResult result = GenerateSynDataset(dataset, schemas, providers->set, options);

  Json rows = Json::array();
  for (const PerturbedExample &p : result.examples) {
    auto schema = schemas.find(p.original.db_id);
    rows.push_back(p.ToJson(schema == schemas.end() ? nullptr : &schema->second));
  }
  WriteJsonFile(o.common.out, rows);
  const std::string report_path = SidecarPath(o.report, o.common.out);
  WriteJsonFile(report_path, {{"metadata", Metadata(sub, o)},
                              {"config", EffectiveConfig(sub)},
                              {"providers", providers->set.Describe()},
                              {"provider_stats", ProviderStatsJson(providers->set)},
                              {"summary", result.Summary()},
                              {"substitution_report", result.report.ToJson()}});
  if (!o.text_out.empty()) WriteFileAtomic(o.text_out, result.report.ToText());
  Json summary = {{"command", "perturb"}, {"out", o.common.out}, {"report", report_path}};
  const Json syn_summary = result.Summary();
  for (const auto &[k, v] : syn_summary.items()) summary[k] = v;
  PrintSummary(out, summary);
  return 0;
}

int CmdAttack(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"dataset", "tables", "out", "seed"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> dataset = LoadExamples(o.dataset);
  CheckDatabases(dataset, schemas);
  auto providers = BuildProviders(o.providers, dataset);
  AttackConfig config;
  config.max_edits = o.max_edits;
  config.k = o.k;
  config.ranking = ParseSpanRanking(o.ranking);
  config.seed = o.common.seed;
  config.retries = o.retries;
  config.jobs = o.common.jobs;
  config.Validate();
  std::unique_ptr<Predictor> predictor = MakePredictor(o.predictor, &schemas);
  const Campaign campaign = GenerateWorstcaseSet(*predictor, dataset, schemas, providers->set, config);

  Json rows = Json::array();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    Json row = campaign.worstcase[i].ToJson();
    row["original_question"] = dataset[i].question;
    rows.push_back(std::move(row));
  }
  WriteJsonFile(o.common.out, rows);

  Json report = {{"metadata", Metadata(sub, o)},
                 {"config", EffectiveConfig(sub)},
                 {"attack", config.ToJson()},
                 {"predictor", predictor->Describe()},
                 {"providers", providers->set.Describe()},
                 {"provider_stats", ProviderStatsJson(providers->set)}};
  const Json campaign_report = campaign.Report();
  for (const auto &[k, v] : campaign_report.items()) report[k] = v;
  if (!o.augment_out.empty()) {
    std::vector<Example> adversarial;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (campaign.results[i].success) adversarial.push_back(campaign.worstcase[i]);
    }
    const std::vector<Example> augmented = AdversarialAugment(dataset, adversarial);
    Json aug = Json::array();
    for (const Example &ex : augmented) aug.push_back(ex.ToJson());
    WriteJsonFile(o.augment_out, aug);
    const std::size_t added = augmented.size() - std::min(augmented.size(), dataset.size());
    report["augment"] = {{"path", o.augment_out},
                         {"rows", augmented.size()},
                         {"adversarial_added", added},
                         {"adversarial_ratio", augmented.empty() ? 0.0
                                                                 : static_cast<double>(added) /
                                                                       static_cast<double>(augmented.size())}};
  }
  const std::string report_path = SidecarPath(o.report, o.common.out);
  WriteJsonFile(report_path, report);
  PrintSummary(out, {{"command", "attack"},
                     {"n", dataset.size()},
                     {"successes", campaign.successes},
                     {"success_rate", report["success_rate"]},
                     {"mean_queries", campaign.mean_queries},
                     {"out", o.common.out},
                     {"report", report_path}});
  return 0;
}

// Streams one JSON object per input example after a metadata header line.
template <typename Fn>
std::size_t WriteJsonl(const std::string &path, const Json &header, const std::vector<Example> &inputs,
                       std::size_t jobs, Fn &&fn) {
  std::vector<Json> rows(inputs.size());
  ParallelFor(inputs.size(), jobs, [&](std::size_t i) { rows[i] = fn(i, inputs[i]); });
  AtomicFileWriter writer(path);
  writer.stream() << header.dump() << "\n";
  for (const Json &row : rows) writer.stream() << row.dump() << "\n";
  writer.Commit();
  return rows.size();
}

int CmdMas(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"tables", "out"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> inputs = LoadInputs(sub, o);
  CheckDatabases(inputs, schemas);
  std::atomic<std::size_t> collisions{0}, non_default{0};
  const Json header = {{"metadata", Metadata(sub, o)}, {"config", EffectiveConfig(sub)}};
  const std::size_t n = WriteJsonl(o.common.out, header, inputs, o.common.jobs, [&](std::size_t i, const Example &ex) {
    const ResolvedSchema resolved = MasSelect(ex.question, schemas.at(ex.db_id));
    collisions += resolved.collisions.size();
    Json row = {{"index", i}, {"question", ex.question}};
    Json body = ResolvedSchemaToJson(resolved);
    for (const auto &[k, v] : body["selected"].items()) non_default += v["is_default"].get<bool>() ? 0 : 1;
    for (const auto &[k, v] : body.items()) row[k] = v;
    return row;
  });
  PrintSummary(out, {{"command", "mas"},
                     {"n", n},
                     {"non_default_selections", non_default.load()},
                     {"collisions", collisions.load()},
                     {"out", o.common.out}});
  return 0;
}

int CmdLink(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"tables", "out"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> inputs = LoadInputs(sub, o);
  CheckDatabases(inputs, schemas);
  std::atomic<std::size_t> tags{0};
  const Json header = {{"metadata", Metadata(sub, o)}, {"config", EffectiveConfig(sub)}};
  const std::size_t n = WriteJsonl(o.common.out, header, inputs, o.common.jobs, [&](std::size_t i, const Example &ex) {
    const DatabaseSchema &schema = schemas.at(ex.db_id);
    const LinkedQuestion linked = Link(ex.question, schema);
    tags += linked.tags.size();
    Json row = {{"index", i}, {"db_id", ex.db_id}, {"question", ex.question}};
    const Json body = LinkedQuestionToJson(linked, schema);
    for (const auto &[k, v] : body.items()) row[k] = v;
    return row;
  });
  PrintSummary(out, {{"command", "link"}, {"n", n}, {"tags", tags.load()}, {"out", o.common.out}});
  return 0;
}

int CmdStats(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"original", "modified", "tables", "out"});
  if (o.dev_original.empty() != o.dev_modified.empty()) {
    throw UsageError("--dev-original and --dev-modified go together");
  }
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> train_o = LoadExamples(o.original), train_m = LoadExamples(o.modified);
  Json report = {{"metadata", Metadata(sub, o)}, {"config", EffectiveConfig(sub)}};
  report["sizes"] = {{"original", train_o.size()}, {"modified", train_m.size()}};
  const DiffResult train = ComputeDiff(train_o, train_m, schemas);
  if (o.dev_original.empty()) {
    report["stats"] = train.stats.ToJson();
  } else {
    const std::vector<Example> dev_o = LoadExamples(o.dev_original), dev_m = LoadExamples(o.dev_modified);
    report["sizes"]["dev_original"] = dev_o.size();
    report["sizes"]["dev_modified"] = dev_m.size();
    const DiffResult dev = ComputeDiff(dev_o, dev_m, schemas);
    std::vector<Example> all_o = train_o, all_m = train_m;
    all_o.insert(all_o.end(), dev_o.begin(), dev_o.end());
    all_m.insert(all_m.end(), dev_m.begin(), dev_m.end());
    report["stats"] = ComputeDiff(all_o, all_m, schemas).stats.ToJson();
    report["train_stats"] = train.stats.ToJson();
    report["dev_stats"] = dev.stats.ToJson();
    const SplitOverlap overlap = ComputeSplitOverlap(train.report, dev.report);
    report["split_overlap"] = {{"shared", overlap.shared}, {"dev_fraction", overlap.dev_fraction}};
  }
  WriteJsonFile(o.common.out, report);
  Json summary = {{"command", "stats"}, {"out", o.common.out}};
  for (const char *k : {"modified_count", "schema_word_mods", "cell_value_mods", "mean_changes_per_question"}) {
    summary[k] = report["stats"][k];
  }
  if (report.contains("split_overlap")) summary["split_overlap"] = report["split_overlap"];
  PrintSummary(out, summary);
  return 0;
}

int CmdReport(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"original", "modified", "tables", "out"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const DiffResult diff = ComputeDiff(LoadExamples(o.original), LoadExamples(o.modified), schemas);
  WriteJsonFile(o.common.out, {{"metadata", Metadata(sub, o)},
                               {"config", EffectiveConfig(sub)},
                               {"substitution_report", diff.report.ToJson()}});
  if (!o.text_out.empty()) WriteFileAtomic(o.text_out, diff.report.ToText());
  PrintSummary(out, {{"command", "report"},
                     {"domains", diff.report.domains().size()},
                     {"pairs", diff.report.DistinctPairs().size()},
                     {"out", o.common.out}});
  return 0;
}

int CmdPredict(const CLI::App *sub, const Options &o, std::ostream &out) {
  Require(sub, {"dataset", "tables", "out"});
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  const std::vector<Example> dataset = LoadExamples(o.dataset);
  CheckDatabases(dataset, schemas);
  std::unique_ptr<Predictor> predictor = MakePredictor(o.predictor, &schemas);
  const Json header = {{"metadata", Metadata(sub, o)},
                       {"config", EffectiveConfig(sub)},
                       {"predictor", predictor->Describe()}};
  const std::size_t n = WriteJsonl(o.common.out, header, dataset, o.common.jobs, [&](std::size_t i, const Example &ex) {
    PredictRequest request{ex.db_id, ex.question, &ex};
    return Json{{"index", i}, {"sql", predictor->PredictSql(request)}};
  });
  PrintSummary(out, {{"command", "predict"}, {"n", n}, {"out", o.common.out}});
  return 0;
}

// Line-protocol server around the baseline predictor, for driving the
// subprocess transport.
int CmdServe(const Options &o, std::ostream &out) {
  if (o.schema.tables.empty()) throw UsageError("serve requires --tables");
  const SchemaMap schemas = LoadSchemaSet(o.schema);
  BaselinePredictor predictor(&schemas, o.mas);
  for (std::string line; std::getline(std::cin, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json request;
    try {
      request = Json::parse(line);
    } catch (const Json::exception &) {
      spdlog::warn("serve: skipping a non-JSON line");
      continue;
    }
    Json response = {{"id", request.value("id", Json())}, {"sql", ""}};
    try {
      response["sql"] =
          predictor.PredictSql({request.value("db_id", std::string()), request.value("question", std::string())});
    } catch (const Error &e) {
      response["error"] = e.what();
    }
    out << response.dump() << std::endl;
  }
  return 0;
}

void ConfigureLogging(const std::string &level) {
  auto logger = spdlog::get("sqlrobust");
  if (!logger) logger = spdlog::stderr_color_mt("sqlrobust");
  spdlog::set_default_logger(logger);
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") throw UsageError("unknown log level '" + level + "'");
  spdlog::set_level(parsed);
}

}  // namespace

int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Robustness toolkit for text-to-SQL: metrics, schema linking, MAS, synonym perturbation, attacks"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;

  CLI::App *evaluate = app.add_subcommand("evaluate", "Exact-match accuracy and component F1");
  AddCommon(evaluate, o.common);
  AddSchema(evaluate, o.schema, false);
  Add(evaluate, "gold", o.gold, "Gold dataset JSON");
  Add(evaluate, "predictions", o.predictions, "Predictions JSONL of {index|id, sql}");

  CLI::App *perturb = app.add_subcommand("perturb", "Synonym-substituted copy of a dataset");
  AddCommon(perturb, o.common);
  AddSchema(perturb, o.schema);
  AddProviders(perturb, o.providers);
  Add(perturb, "dataset", o.dataset, "Dataset JSON");
  Add(perturb, "budget", o.budget, "Maximum edits per question");
  Add(perturb, "report", o.report, "Report path (default <out>.report.json)");
  Add(perturb, "text-out", o.text_out, "Human-readable substitution report");

  CLI::App *attack = app.add_subcommand("attack", "Worst-case set by attacking a predictor");
  AddCommon(attack, o.common);
  AddSchema(attack, o.schema);
  AddProviders(attack, o.providers);
  AddPredictor(attack, o.predictor);
  Add(attack, "dataset", o.dataset, "Dataset JSON");
  Add(attack, "max-edits", o.max_edits, "Spans attacked per question");
  Add(attack, "k", o.k, "Candidates per provider per span");
  Add(attack, "ranking", o.ranking, "deletion|linking");
  Add(attack, "retries", o.retries, "Retries after a transport failure");
  Add(attack, "report", o.report, "Campaign report path (default <out>.report.json)");
  Add(attack, "augment-out", o.augment_out, "Training file with the successful examples appended");

  CLI::App *mas = app.add_subcommand("mas", "Multi-annotation selection per question");
  AddCommon(mas, o.common);
  AddSchema(mas, o.schema);
  Add(mas, "dataset", o.dataset, "Dataset JSON");
  Add(mas, "question", o.question, "Single question (with --db-id)");

  CLI::App *link = app.add_subcommand("link", "Lexical schema linking per question");
  AddCommon(link, o.common);
  AddSchema(link, o.schema);
  Add(link, "dataset", o.dataset, "Dataset JSON");
  Add(link, "question", o.question, "Single question (with --db-id)");

  CLI::App *stats = app.add_subcommand("stats", "Difference statistics of a paired corpus");
  AddCommon(stats, o.common);
  AddSchema(stats, o.schema, false);
  Add(stats, "original", o.original, "Original dataset JSON");
  Add(stats, "modified", o.modified, "Modified dataset JSON");
  Add(stats, "dev-original", o.dev_original, "Original dev split, for split overlap");
  Add(stats, "dev-modified", o.dev_modified, "Modified dev split, for split overlap");

  CLI::App *report = app.add_subcommand("report", "Per-domain substitution report");
  AddCommon(report, o.common);
  AddSchema(report, o.schema, false);
  Add(report, "original", o.original, "Original dataset JSON");
  Add(report, "modified", o.modified, "Modified dataset JSON");
  Add(report, "text-out", o.text_out, "Human-readable table");

  CLI::App *predict = app.add_subcommand("predict", "Run a predictor over a dataset");
  AddCommon(predict, o.common);
  AddSchema(predict, o.schema);
  AddPredictor(predict, o.predictor);
  Add(predict, "dataset", o.dataset, "Dataset JSON");

  CLI::App *serve = app.add_subcommand("serve", "Baseline predictor over the stdio line protocol");
  AddSchema(serve, o.schema);
  Add(serve, "log-level", o.common.log_level, "Log level");
  AddFlag(serve, "mas", o.mas, "Resolve annotations by MAS before predicting");
  serve->group("");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::Success &e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
      app.exit(e, out, err);
      return static_cast<int>(ErrorCode::kUsage);
    }
    CLI::App *sub = app.get_subcommands().front();
    if (sub != serve) ApplyConfigFile(sub, o.common.config);
    ConfigureLogging(o.common.log_level);
    if (o.common.jobs == 0) throw UsageError("--jobs must be at least 1");

    if (sub == evaluate) return CmdEvaluate(sub, o, out);
    if (sub == perturb) return CmdPerturb(sub, o, out);
    if (sub == attack) return CmdAttack(sub, o, out);
    if (sub == mas) return CmdMas(sub, o, out);
    if (sub == link) return CmdLink(sub, o, out);
    if (sub == stats) return CmdStats(sub, o, out);
    if (sub == report) return CmdReport(sub, o, out);
    if (sub == predict) return CmdPredict(sub, o, out);
    if (sub == serve) return CmdServe(o, out);
    throw UsageError("no command");
  } catch (const Error &e) {
    err << "error: " << e.what() << std::endl;
    return static_cast<int>(e.code());
  } catch (const Json::exception &e) {
    err << "error: " << e.what() << std::endl;
    return static_cast<int>(ErrorCode::kInput);
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << std::endl;
    return static_cast<int>(ErrorCode::kUsage);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << std::endl;
    return static_cast<int>(ErrorCode::kUsage);
  }
}

}  // namespace sqlrobust
