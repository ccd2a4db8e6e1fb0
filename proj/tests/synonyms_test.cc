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

#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "sqlrobust/error.h"
#include "sqlrobust/synonyms.h"
#include "test_support.h"

namespace sqlrobust {
namespace {

using testing::DataPath;
using testing::FixtureSchemas;

TEST(LexiconTest, DomainShadowsGlobal) {
  const SynonymLexicon lex = SynonymLexicon::FromJson(Json::parse(R"({
    "global": {"weight": ["mass", "heaviness"]},
    "domains": {"clinic": {"weight": ["body weight"]}}
  })"));
  EXPECT_EQ(lex.Lookup("weight", "pets_1"), (std::vector<std::string>{"mass", "heaviness"}));
  EXPECT_EQ(lex.Lookup("Weight", "clinic"), std::vector<std::string>{"body weight"});
  EXPECT_TRUE(lex.Lookup("breed", "clinic").empty());
  EXPECT_EQ(SynonymLexicon::FromJson(lex.ToJson()).ToJson(), lex.ToJson());
}

TEST(LexiconTest, RejectsBadEntries) {
  EXPECT_THROW(SynonymLexicon::FromJson(Json::parse(R"({"global": {"age": ["years"]}})")), ValidationError);
  EXPECT_THROW(SynonymLexicon::FromJson(Json::parse(R"({"global": {"city": ["City"]}})")), ValidationError);
  EXPECT_THROW(SynonymLexicon::FromJson(Json::parse(R"({"global": {"city": []}})")), ValidationError);
  EXPECT_THROW(SynonymLexicon::FromJson(Json::parse(R"({"other": {}})")), ValidationError);
  EXPECT_THROW(SynonymLexicon::Load(DataPath("missing.json")), InputError);
}

TEST(LexiconTest, ReservedReplacementsFiltered) {
  SynonymLexicon lex;
  lex.Add("", "pet", {"name", "animal"});
  EXPECT_EQ(lex.Lookup("pet", "x"), std::vector<std::string>{"animal"});
}

constexpr const char *kVectors =
    "5 3\n"
    "dog 1 0 0\n"
    "puppy 0.9 0.1 0\n"
    "hound 0.9 0.1 0\n"
    "cat 0 1 0\n"
    "age 1 0 0\n";

TEST(EmbeddingTest, NeighboursByCosineThenWord) {
  const EmbeddingTable t = EmbeddingTable::Parse(kVectors);
  EXPECT_EQ(t.dimension(), 3u);
  EXPECT_EQ(t.size(), 5u);
  const auto n = t.Neighbors("Dog", 5);
  ASSERT_EQ(n.size(), 3u);
  EXPECT_EQ(n[0].first, "hound");
  EXPECT_EQ(n[1].first, "puppy");
  EXPECT_NEAR(n[0].second, 0.9 / std::sqrt(0.82), 1e-12);
  EXPECT_EQ(n[2].first, "cat");
  EXPECT_EQ(t.Neighbors("dog", 5, 0.5).size(), 2u);
  EXPECT_EQ(t.Neighbors("dog", 1).size(), 1u);
}

TEST(EmbeddingTest, OutOfVocabularyCounted) {
  const EmbeddingTable t = EmbeddingTable::Parse(kVectors);
  EXPECT_TRUE(t.Neighbors("zebra", 3).empty());
  EXPECT_EQ(t.misses(), 1u);
}

TEST(EmbeddingTest, MalformedLinesReportLineNumbers) {
  try {
    EmbeddingTable::Parse("a 1 2\nb 1\n", "vec.txt");
    FAIL();
  } catch (const InputError &e) {
    EXPECT_NE(std::string(e.what()).find("vec.txt:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(EmbeddingTable::Parse("a 1 x\n"), InputError);
}

TEST(DomainContextTest, RanksAndExcludes) {
  const DatabaseSchema clinic = FixtureSchemas().at("clinic");
  const std::vector<PoolQuestion> pool = {
      {"clinic", "What is the weight of each dog?"},
      {"clinic", "Show the phone and city of owners with dogs."},
      {"clinic", "Average weight of dogs by breed and owner city?"},
      {"clinic", "Hello there."},
      {"pets_1", "What is the weight of each pet?"},
      {"clinic", "What is the weight of each dog?"},
  };
  const DomainContext ctx =
      BuildDomainContext("weight", "clinic", pool, clinic, 3, "What is the weight of each dog?");
  ASSERT_EQ(ctx.sentences.size(), 2u);
  EXPECT_EQ(ctx.sentences[0], "Average weight of dogs by breed and owner city?");
  EXPECT_EQ(ctx.sentences[1], "Show the phone and city of owners with dogs.");
  EXPECT_EQ(BuildDomainContext("weight", "clinic", pool, clinic, 1, "").sentences.size(), 1u);
}

TEST(StubProposerTest, AnswersFromTableAndLogs) {
  StubProposer stub({{"weight", {"mass", "weight", "age", "heft"}}}, {"thing"});
  const auto tokens = Tokenize("What is the weight of each dog?");
  const DomainContext ctx{{"other question"}};
  const auto cands = ContextualCandidates(tokens, 3, 4, ctx, stub, 5, "r1");
  EXPECT_EQ(cands, (std::vector<std::string>{"mass", "heft"}));
  EXPECT_EQ(ContextualCandidates(tokens, 6, 7, ctx, stub, 5, "r2"), std::vector<std::string>{"thing"});
  ASSERT_EQ(stub.requests().size(), 2u);
  EXPECT_EQ(stub.requests()[0].mask_begin, 3u);
  EXPECT_EQ(stub.requests()[0].context, ctx.sentences);
  const Json wire = stub.requests()[0].ToJson();
  EXPECT_EQ(wire["id"], "r1");
  EXPECT_EQ(wire["mask_span"], Json::array({3, 4}));
}

class ProposerServer {
 public:
  explicit ProposerServer(httplib::Server::Handler handler) {
    server_.Post("/propose", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ProposerServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/propose"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpProposerTest, RoundTripsJsonContract) {
  ProposerServer server([](const httplib::Request &req, httplib::Response &res) {
    const Json body = Json::parse(req.body);
    const Json out = {{"id", body["id"]},
                      {"candidates", Json::array({{{"phrase", "mass"}, {"score", 0.9}}})}};
    res.set_content(out.dump(), "application/json");
  });
  HttpProposer proposer(server.url(), std::chrono::milliseconds(2000), 2);
  ProposalRequest req;
  req.id = "q7";
  req.question = "what is the weight";
  req.mask_begin = 3;
  req.mask_end = 4;
  const auto proposals = proposer.Propose(req);
  ASSERT_EQ(proposals.size(), 1u);
  EXPECT_EQ(proposals[0].phrase, "mass");
}

TEST(HttpProposerTest, ProtocolAndTransportErrors) {
  ProposerServer wrong_id([](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"({"id": "other", "candidates": []})", "application/json");
  });
  HttpProposer a(wrong_id.url(), std::chrono::milliseconds(2000), 1);
  EXPECT_THROW(a.Propose(ProposalRequest{"x", {}, "q", 0, 1, 5}), ProtocolError);

  HttpProposer dead("http://127.0.0.1:9/propose", std::chrono::milliseconds(300), 1);
  EXPECT_THROW(dead.Propose(ProposalRequest{"x", {}, "q", 0, 1, 5}), TransportError);
}

TEST(ProviderSetTest, OrderAndFailureIsolation) {
  const DatabaseSchema clinic = FixtureSchemas().at("clinic");
  SynonymLexicon lex;
  lex.Add("clinic", "weight", {"mass"});
  const EmbeddingTable emb = EmbeddingTable::Parse("weight 1 0\nheft 1 0.1\n");
  HttpProposer dead("http://127.0.0.1:9/propose", std::chrono::milliseconds(300), 1);
  ProviderSet set;
  set.lexicon = &lex;
  set.embedding = &emb;
  set.contextual = &dead;
  const LinkedQuestion linked = Link("What is the weight of each dog?", clinic);
  SpanQuery q{&linked, 3, 4, "clinic", &clinic, "r"};
  EXPECT_EQ(set.Candidates(ProviderKind::kLexicon, q).at(0).phrase, "mass");
  EXPECT_EQ(set.Candidates(ProviderKind::kEmbedding, q).at(0).phrase, "heft");
  EXPECT_TRUE(set.Candidates(ProviderKind::kContextual, q).empty());
  EXPECT_EQ(set.stats().contextual_errors, 1u);
  EXPECT_THROW(ParseProviderKind("thesaurus"), UsageError);
}

}  // namespace
}  // namespace sqlrobust
