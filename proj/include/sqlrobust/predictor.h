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

#ifndef SQLROBUST_PREDICTOR_H_
#define SQLROBUST_PREDICTOR_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include "sqlrobust/dataset.h"
#include "sqlrobust/json_io.h"
#include "sqlrobust/schema.h"
#include "sqlrobust/sql_ir.h"

namespace sqlrobust {

struct PredictRequest {
  std::string db_id;
  std::string question;
  // Local hint for in-process stubs; never sent over the wire.
  const Example *source = nullptr;
};

// A text-to-SQL system under test. Implementations are thread-safe.
class Predictor {
 public:
  virtual ~Predictor() = default;
  // Raw SQL text. Throws TransportError on timeouts or dead transports and
  // ProtocolError on malformed responses.
  virtual std::string PredictSql(const PredictRequest &request) = 0;
  virtual Json Describe() const = 0;
};

// Line protocol over a child process's stdin/stdout:
//   -> {"id","db_id","question"}   <- {"id","sql"}
// Responses are matched by id, so the child may answer out of order.
class SubprocessPredictor : public Predictor {
 public:
  SubprocessPredictor(std::vector<std::string> argv, std::chrono::milliseconds timeout);
  ~SubprocessPredictor() override;

  std::string PredictSql(const PredictRequest &request) override;
  Json Describe() const override;

 private:
  void ReadLoop();
  void FailAll(const std::string &reason);

  std::vector<std::string> argv_;
  std::chrono::milliseconds timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::thread reader_;
  std::mutex write_mu_;
  std::mutex mu_;
  std::map<std::string, std::promise<std::string>> pending_;
  std::optional<std::string> dead_;
  std::atomic<std::uint64_t> next_id_{0};
};

// POST {url} with the same request object; the body is the response object.
class HttpPredictor : public Predictor {
 public:
  HttpPredictor(std::string url, std::chrono::milliseconds timeout, std::ptrdiff_t max_in_flight);

  std::string PredictSql(const PredictRequest &request) override;
  Json Describe() const override;

 private:
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  std::counting_semaphore<1024> in_flight_;
  std::atomic<std::uint64_t> next_id_{0};
};

// Answers with the source example's gold query, whatever the question.
class EchoGoldPredictor : public Predictor {
 public:
  std::string PredictSql(const PredictRequest &request) override;
  Json Describe() const override { return {{"kind", "echo"}}; }
};

// Lexical heuristic: link the question against the schema as the model sees
// it, pick the table with the highest link score, select the linked columns
// of that table (count(*) on a counting cue, * when none), and add one
// equality per cell-value link. Nothing linked yields SELECT count(*) over
// table 0.
SqlQuery BaselineLexicalPredict(std::string_view question, const DatabaseSchema &model_view);

// In-process baseline. With `mas`, each question first resolves the schema's
// annotations by MAS; otherwise the model sees only default annotations.
class BaselinePredictor : public Predictor {
 public:
  BaselinePredictor(const SchemaMap *schemas, bool mas) : schemas_(schemas), mas_(mas) {}

  std::string PredictSql(const PredictRequest &request) override;
  SqlQuery Predict(const std::string &db_id, std::string_view question) const;
  Json Describe() const override { return {{"kind", "baseline"}, {"mas", mas_}}; }

 private:
  const SchemaMap *schemas_;
  bool mas_;
};

// Counts calls; wraps another predictor.
class CountingPredictor : public Predictor {
 public:
  explicit CountingPredictor(Predictor *inner) : inner_(inner) {}
  std::string PredictSql(const PredictRequest &request) override {
    calls_.fetch_add(1);
    return inner_->PredictSql(request);
  }
  Json Describe() const override { return inner_->Describe(); }
  std::size_t calls() const { return calls_.load(); }

 private:
  Predictor *inner_;
  std::atomic<std::size_t> calls_{0};
};

struct Prediction {
  std::string sql;
  std::optional<SqlQuery> parsed;  // canonicalized; empty when unparseable
  std::string parse_error;
};

// Parses and canonicalizes the answer. Unparseable SQL is kept as text with
// the parse error; transport failures propagate.
Prediction Predict(Predictor &predictor, const PredictRequest &request, const DatabaseSchema &schema);

// False for unparseable predictions.
bool PredictionMatches(const Prediction &prediction, const SqlQuery &gold);

}  // namespace sqlrobust

#endif  // SQLROBUST_PREDICTOR_H_
