// Copyright 2026 The usersim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "httplib.h"
#include "test_util.h"
#include "usersim/embeddings.h"
#include "usersim/error.h"

namespace usersim {
namespace {

using nlohmann::json;

TEST(WordVectorTable, LoadsWithAndWithoutHeader) {
  testing::TempDir tmp;
  testing::WriteText(tmp / "h.txt", "2 3\nfoo 1 2 3\nbar 0.5 -1 0\n");
  testing::WriteText(tmp / "n.txt", "foo 1 2 3\r\nbar 0.5 -1 0\r\n");
  for (const char* name : {"h.txt", "n.txt"}) {
    const auto t = WordVectorTable::Load(tmp / name);
    EXPECT_EQ(t.dim(), 3u);
    EXPECT_EQ(t.size(), 2u);
    EXPECT_EQ(*t.Lookup("bar"), (Vector{0.5, -1, 0}));
    EXPECT_FALSE(t.Lookup("baz"));
  }
  testing::WriteText(tmp / "ragged.txt", "foo 1 2 3\nbar 1 2\n");
  EXPECT_THROW(WordVectorTable::Load(tmp / "ragged.txt"), EmbeddingError);
  EXPECT_THROW(WordVectorTable::Load(tmp / "absent.txt"), ConfigError);
}

TEST(CheckVector, RejectsBadVectors) {
  EXPECT_NO_THROW(CheckVector({1, 2}, 2, "v"));
  EXPECT_THROW(CheckVector({1, 2, 3}, 2, "v"), EmbeddingError);
  EXPECT_THROW(CheckVector({1, NAN}, 2, "v"), EmbeddingError);
  EXPECT_THROW(CheckVector({1, INFINITY}, 2, "v"), EmbeddingError);
}

TEST(EmbedWords, CountsOutOfVocabularyAndCaches) {
  const auto table = WordVectorTable::FromMap("t", {{"a", {1, 0}}, {"b", {0, 1}}});
  EmbeddingCache cache;
  const auto e = EmbedWords({"a", "b", "zzz"}, table, cache);
  EXPECT_EQ(e.vectors.size(), 2u);
  EXPECT_EQ(e.out_of_vocabulary, 1u);
  EmbedWords({"a"}, table, cache);
  EXPECT_EQ(cache.hits(), 1u);
}

TEST(MeanWordSentenceProvider, AveragesTokens) {
  auto table = std::make_shared<WordVectorTable>(
      WordVectorTable::FromMap("t", {{"good", {1, 0}}, {"film", {0, 2}}}));
  MeanWordSentenceProvider p(table);
  const auto v = p.EmbedBatch({"Good film!", "good unknownword"});
  EXPECT_EQ(v[0], (Vector{0.5, 1.0}));
  EXPECT_EQ(v[1], (Vector{1.0, 0.0}));
  EXPECT_EQ(p.id(), "mean_word:t");
  EXPECT_THROW(p.EmbedBatch({"nothing known"}), EmbeddingError);
}

TEST(FixtureSentenceProvider, ExactTextLookup) {
  testing::TempDir tmp;
  testing::WriteText(tmp / "s.jsonl", json{{"text", "hi"}, {"vector", {1, 2}}}.dump() + "\n" +
                                          json{{"text", "yo"}, {"vector", {3, 4}}}.dump() + "\n");
  auto p = FixtureSentenceProvider::Load(tmp / "s.jsonl");
  EXPECT_EQ(p.dim(), 2u);
  EmbeddingCache cache;
  const auto v = EmbedSentences({"yo", "hi", "yo"}, p, cache);
  EXPECT_EQ(v[0], (Vector{3, 4}));
  EXPECT_EQ(v[1], (Vector{1, 2}));
  EXPECT_EQ(v[2], (Vector{3, 4}));
  EXPECT_THROW(EmbedSentences({"unseen"}, p, cache), EmbeddingError);
  EXPECT_THROW(EmbedSentences({}, p, cache), std::invalid_argument);
  EXPECT_THROW(EmbedSentences({""}, p, cache), std::invalid_argument);
}

TEST(MakeEmbeddingProviders, BuildsFromConfig) {
  testing::TempDir tmp;
  testing::WriteText(tmp / "w.txt", "a 1 0\nb 0 1\n");
  const auto p = MakeEmbeddingProviders(
      {{"word", {{"type", "static"}, {"path", "w.txt"}}}, {"sentence", {{"type", "mean_word"}}}},
      tmp.path());
  ASSERT_TRUE(p.word && p.sentence);
  EXPECT_EQ(p.description["word"], "static:w.txt");
  EXPECT_EQ(p.description["sentence"], "mean_word:static:w.txt");
  EXPECT_THROW(MakeEmbeddingProviders({{"sentence", {{"type", "mean_word"}}}}, tmp.path()),
               ConfigError);
  EXPECT_THROW(MakeEmbeddingProviders({{"sentence", {{"type", "magic"}}}}, tmp.path()),
               ConfigError);
  EXPECT_THROW(MakeEmbeddingProviders({{"word", {{"type", "static"}}}}, tmp.path()),
               ConfigError);
}

// Serves /v1/embeddings with vector [len(text), index] per input, returned
// in reverse order to exercise the index field.
class EmbeddingServer {
 public:
  EmbeddingServer() {
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (fail_left_ > 0) {
        --fail_left_;
        res.status = 503;
        return;
      }
      const json body = json::parse(req.body);
      json data = json::array();
      const auto& input = body["input"];
      for (size_t i = input.size(); i-- > 0;) {
        const std::string t = input[i];
        json v = {static_cast<double>(t.size()), static_cast<double>(i)};
        if (t == "nan") v = {1.0};
        data.push_back({{"index", i}, {"embedding", v}});
      }
      res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~EmbeddingServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> requests_{0};
  std::atomic<int> fail_left_{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(RemoteSentenceProvider, BatchesAndOrders) {
  EmbeddingServer server;
  RemoteEmbeddingConfig c;
  c.endpoint = server.url();
  c.model = "m";
  c.batch_size = 2;
  c.timeout = std::chrono::seconds(5);
  RemoteSentenceProvider p(c, [](auto) {});
  p.Preflight();
  const auto v = p.EmbedBatch({"a", "bb", "ccc"});
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], (Vector{1, 0}));
  EXPECT_EQ(v[1], (Vector{2, 1}));
  EXPECT_EQ(v[2], (Vector{3, 0}));
  EXPECT_EQ(server.requests_.load(), 2);
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.id(), "remote:m");
}

TEST(RemoteSentenceProvider, RetriesThenFails) {
  EmbeddingServer server;
  RemoteEmbeddingConfig c;
  c.endpoint = server.url();
  c.max_retries = 2;
  c.timeout = std::chrono::seconds(5);
  int sleeps = 0;
  RemoteSentenceProvider p(c, [&](auto) { ++sleeps; });
  server.fail_left_ = 2;
  EXPECT_EQ(p.EmbedBatch({"ok"}).size(), 1u);
  EXPECT_EQ(sleeps, 2);
  server.fail_left_ = 10;
  EXPECT_THROW(p.EmbedBatch({"ok"}), EmbeddingError);
}

TEST(RemoteSentenceProvider, WrongDimensionIsAnError) {
  EmbeddingServer server;
  RemoteEmbeddingConfig c;
  c.endpoint = server.url();
  c.timeout = std::chrono::seconds(5);
  RemoteSentenceProvider p(c, [](auto) {});
  EXPECT_THROW(p.EmbedBatch({"fine", "nan"}), EmbeddingError);
}

TEST(RemoteSentenceProvider, PreflightChecksCredentials) {
  RemoteEmbeddingConfig c;
  c.endpoint = "http://127.0.0.1:1";
  c.api_key_env = "USERSIM_TEST_SURELY_UNSET_KEY";
  RemoteSentenceProvider p(c);
  EXPECT_THROW(p.Preflight(), AuthError);
  RemoteSentenceProvider no_endpoint(RemoteEmbeddingConfig{});
  EXPECT_THROW(no_endpoint.Preflight(), ConfigError);
}

}  // namespace
}  // namespace usersim
