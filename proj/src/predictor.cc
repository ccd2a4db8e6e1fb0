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

#include "sqlrobust/predictor.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <map>
#include <set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "sqlrobust/error.h"
#include "sqlrobust/eval.h"
#include "sqlrobust/linking.h"
#include "sqlrobust/sql_parser.h"
#include "sqlrobust/text.h"

namespace sqlrobust {
namespace {

Json RequestJson(const std::string &id, const PredictRequest &request) {
  return {{"id", id}, {"db_id", request.db_id}, {"question", request.question}};
}

// Validates a response object and returns its SQL.
std::string ResponseSql(const Json &json, const std::string &expected_id) {
  if (!json.is_object() || !json.contains("id") || !json.contains("sql") || !json["sql"].is_string()) {
    throw ProtocolError("predictor response lacks id or sql");
  }
  if (!json["id"].is_string() || json["id"].get<std::string>() != expected_id) {
    throw ProtocolError("predictor response id does not match request '" + expected_id + "'");
  }
  return json["sql"].get<std::string>();
}

bool WriteAll(int fd, const std::string &data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

std::pair<std::string, std::string> SplitUrl(const std::string &url, const std::string &default_path) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, default_path};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

// ------------------------------------------------------------- subprocess

SubprocessPredictor::SubprocessPredictor(std::vector<std::string> argv, std::chrono::milliseconds timeout)
    : argv_(std::move(argv)), timeout_(timeout) {
  if (argv_.empty()) throw UsageError("predictor command is empty");
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw TransportError(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = ::fork();
  if (pid < 0) throw TransportError(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[0]);
    std::vector<char *> args;
    for (std::string &a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    const int err = errno;
    (void)!::write(err_pipe[1], &err, sizeof(err));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  int child_errno = 0;
  const ssize_t n = ::read(err_pipe[0], &child_errno, sizeof(child_errno));
  ::close(err_pipe[0]);
  if (n > 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::waitpid(pid, nullptr, 0);
    throw TransportError("cannot start predictor '" + argv_[0] + "': " + std::strerror(child_errno));
  }
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  reader_ = std::thread([this] { ReadLoop(); });
}

SubprocessPredictor::~SubprocessPredictor() {
  if (to_child_ >= 0) ::close(to_child_);
  if (pid_ > 0) {
    int status = 0;
    bool exited = false;
    for (int i = 0; i < 100 && !exited; ++i) {
      exited = ::waitpid(pid_, &status, WNOHANG) == pid_;
      if (!exited) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    if (!exited) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, &status, 0);
    }
  }
  if (reader_.joinable()) reader_.join();
  if (from_child_ >= 0) ::close(from_child_);
}

void SubprocessPredictor::FailAll(const std::string &reason) {
  std::lock_guard<std::mutex> lock(mu_);
  dead_ = reason;
  for (auto &[id, promise] : pending_) {
    promise.set_exception(std::make_exception_ptr(TransportError("request " + id + ": " + reason)));
  }
  pending_.clear();
}

void SubprocessPredictor::ReadLoop() {
  std::string buffer;
  char chunk[4096];
  for (;;) {
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      const std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      Json json;
      try {
        json = Json::parse(line);
      } catch (const Json::exception &) {
        spdlog::warn("predictor emitted a non-JSON line: {}", line.substr(0, 200));
        continue;
      }
      if (!json.is_object() || !json.contains("id") || !json["id"].is_string()) {
        spdlog::warn("predictor response without a string id: {}", line.substr(0, 200));
        continue;
      }
      const std::string id = json["id"].get<std::string>();
      std::lock_guard<std::mutex> lock(mu_);
      auto it = pending_.find(id);
      if (it == pending_.end()) {
        spdlog::warn("predictor answered unknown or expired request {}", id);
        continue;
      }
      try {
        it->second.set_value(ResponseSql(json, id));
      } catch (const ProtocolError &) {
        it->second.set_exception(std::current_exception());
      }
      pending_.erase(it);
    }
  }
  FailAll("predictor process closed its output");
}

std::string SubprocessPredictor::PredictSql(const PredictRequest &request) {
  const std::string id = "p" + std::to_string(next_id_.fetch_add(1));
  std::future<std::string> future;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (dead_) throw TransportError("request " + id + ": " + *dead_);
    future = pending_[id].get_future();
  }
  {
    std::lock_guard<std::mutex> lock(write_mu_);
    if (!WriteAll(to_child_, RequestJson(id, request).dump() + "\n")) {
      std::lock_guard<std::mutex> l(mu_);
      pending_.erase(id);
      throw TransportError("request " + id + ": write to predictor failed");
    }
  }
  if (future.wait_for(timeout_) != std::future_status::ready) {
    std::lock_guard<std::mutex> lock(mu_);
    pending_.erase(id);
    throw TransportError("request " + id + " timed out after " + std::to_string(timeout_.count()) + " ms");
  }
  return future.get();
}

Json SubprocessPredictor::Describe() const {
  return {{"kind", "subprocess"}, {"command", argv_}, {"timeout_ms", timeout_.count()}};
}

// ------------------------------------------------------------------- http

HttpPredictor::HttpPredictor(std::string url, std::chrono::milliseconds timeout, std::ptrdiff_t max_in_flight)
    : timeout_(timeout), in_flight_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, 1024)) {
  std::tie(base_, path_) = SplitUrl(url, "/predict");
}

std::string HttpPredictor::PredictSql(const PredictRequest &request) {
  const std::string id = "h" + std::to_string(next_id_.fetch_add(1));
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
  auto res = client.Post(path_, RequestJson(id, request).dump(), "application/json");
  if (!res) throw TransportError("request " + id + " to " + base_ + path_ + ": " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw TransportError("request " + id + " to " + base_ + path_ + ": HTTP " + std::to_string(res->status));
  }
  Json json;
  try {
    json = Json::parse(res->body);
  } catch (const Json::exception &e) {
    throw ProtocolError("request " + id + ": response is not JSON");
  }
  return ResponseSql(json, id);
}

Json HttpPredictor::Describe() const {
  return {{"kind", "http"}, {"url", base_ + path_}, {"timeout_ms", timeout_.count()}};
}

// ------------------------------------------------------------------- stubs

std::string EchoGoldPredictor::PredictSql(const PredictRequest &request) {
  if (!request.source) throw ValidationError("echo predictor needs the source example");
  return request.source->query;
}

namespace {

bool HasCountingCue(const std::vector<Token> &tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string &w = tokens[i].norm;
    if (w == "count") return true;
    const std::string next = i + 1 < tokens.size() ? tokens[i + 1].norm : "";
    if (w == "how" && next == "many") return true;
    if (w == "number" && next == "of") return true;
  }
  return false;
}

bool LooksNumeric(const std::string &s) {
  if (s.empty()) return false;
  char *end = nullptr;
  std::strtod(s.c_str(), &end);
  return end && *end == '\0';
}

int ColumnTable(const DatabaseSchema &schema, const LinkTarget &t) {
  if (t.kind == LinkTarget::Kind::kTable) return t.id;
  return schema.columns.at(static_cast<std::size_t>(t.id)).table_id;
}

}  // namespace

SqlQuery BaselineLexicalPredict(std::string_view question, const DatabaseSchema &view) {
  const LinkedQuestion linked = Link(question, view);
  SqlQuery q;
  if (view.tables.empty()) throw ValidationError("schema '" + view.db_id + "' has no tables");

  std::map<int, int> score;
  for (const LinkTag &tag : linked.tags) {
    const int weight = tag.kind == LinkKind::kExactTable ? 3 : IsExact(tag.kind) ? 2 : 1;
    std::vector<LinkTarget> targets = {tag.target};
    targets.insert(targets.end(), tag.also_matches.begin(), tag.also_matches.end());
    std::set<int> tables;
    for (const LinkTarget &t : targets) tables.insert(ColumnTable(view, t));
    for (int table : tables) score[table] += weight;
  }
  int best = 0;
  int best_score = 0;
  for (const auto &[table, s] : score) {
    if (s > best_score) {
      best = table;
      best_score = s;
    }
  }
  q.from_tables = {best};

  auto in_best = [&](const LinkTag &tag) -> std::optional<LinkTarget> {
    if (tag.target.kind != LinkTarget::Kind::kTable && ColumnTable(view, tag.target) == best) return tag.target;
    for (const LinkTarget &t : tag.also_matches) {
      if (t.kind != LinkTarget::Kind::kTable && ColumnTable(view, t) == best) return t;
    }
    return std::nullopt;
  };

  std::set<int> condition_columns;
  ConditionTree where;
  for (const LinkTag &tag : linked.tags) {
    if (tag.kind != LinkKind::kCellValue) continue;
    auto target = in_best(tag);
    if (!target) continue;
    Condition cond;
    cond.left.column_id = target->id;
    const Column &col = view.columns.at(static_cast<std::size_t>(target->id));
    Literal lit;
    lit.text = target->literal;
    lit.kind = col.type == ColumnType::kNumber && LooksNumeric(lit.text) ? Literal::Kind::kNumber
                                                                        : Literal::Kind::kString;
    cond.right = lit;
    if (!where.conditions.empty()) where.connectors.push_back(Connector::kAnd);
    where.conditions.push_back(std::move(cond));
    condition_columns.insert(target->id);
  }
  if (!where.conditions.empty()) q.where = std::move(where);

  const int star = view.star_column_id();
  if (HasCountingCue(linked.tokens) || linked.tags.empty()) {
    ColumnRef ref;
    ref.agg = AggOp::kCount;
    ref.column_id = star;
    q.select.push_back(ref);
    return q;
  }
  std::set<int> seen;
  for (const LinkTag &tag : linked.tags) {
    if (tag.kind != LinkKind::kExactColumn && tag.kind != LinkKind::kPartialColumn) continue;
    auto target = in_best(tag);
    if (!target || condition_columns.count(target->id) || !seen.insert(target->id).second) continue;
    ColumnRef ref;
    ref.column_id = target->id;
    q.select.push_back(ref);
  }
  if (q.select.empty()) {
    ColumnRef ref;
    ref.column_id = star;
    q.select.push_back(ref);
  }
  return q;
}

SqlQuery BaselinePredictor::Predict(const std::string &db_id, std::string_view question) const {
  auto it = schemas_->find(db_id);
  if (it == schemas_->end()) throw InputError("baseline predictor has no schema for '" + db_id + "'");
  const ResolvedSchema resolved = mas_ ? MasSelect(question, it->second) : DefaultResolution(it->second);
  return BaselineLexicalPredict(question, ModelView(resolved));
}

std::string BaselinePredictor::PredictSql(const PredictRequest &request) {
  const SqlQuery q = Predict(request.db_id, request.question);
  return Serialize(q, schemas_->at(request.db_id));
}

// ---------------------------------------------------------------- helpers

Prediction Predict(Predictor &predictor, const PredictRequest &request, const DatabaseSchema &schema) {
  Prediction p;
  p.sql = predictor.PredictSql(request);
  try {
    p.parsed = Canonicalize(ParseSql(p.sql, schema));
  } catch (const SqlError &e) {
    p.parse_error = e.what();
  }
  return p;
}

bool PredictionMatches(const Prediction &prediction, const SqlQuery &gold) {
  return prediction.parsed && ExactMatch(*prediction.parsed, gold);
}

}  // namespace sqlrobust
