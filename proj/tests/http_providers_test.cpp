// Copyright 2026 The Inquire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace inquire;
using inquire::testing::ServerThread;
using nlohmann::json;

namespace {

ProviderSettings settings_for(const ServerThread& server, std::string base = "/v1") {
  ProviderSettings s;
  s.url = server.url() + base;
  s.model = "test-chat";
  s.embedding_model = "test-embed";
  s.timeout = std::chrono::seconds(5);
  return s;
}

}  // namespace

TEST(HttpChatProvider, PostsMessagesAndReadsFirstChoice) {
  json seen;
  std::string auth;
  ServerThread server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      auth = req.get_header_value("Authorization");
      res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Yes."}}]})", "application/json");
    });
  });
  ::setenv("INQUIRE_TEST_KEY", "sk-local", 1);
  auto settings = settings_for(server, "/v1/");
  settings.api_key_env = "INQUIRE_TEST_KEY";
  HttpChatProvider chat(settings);
  const ChatRequest request{{{Role::kSystem, "be brief"}, {Role::kUser, "Is X alive?"}}, 0.0};
  EXPECT_EQ(chat.complete(request), "Yes.");
  EXPECT_EQ(seen.at("model"), "test-chat");
  EXPECT_EQ(seen.at("messages").size(), 2u);
  EXPECT_EQ(seen.at("messages")[0].at("role"), "system");
  EXPECT_EQ(seen.at("messages")[1].at("content"), "Is X alive?");
  EXPECT_EQ(auth, "Bearer sk-local");
  ::unsetenv("INQUIRE_TEST_KEY");
}

TEST(HttpChatProvider, ErrorStatusesAndBadShapesAreProviderErrors) {
  ServerThread server([](httplib::Server& s) {
    s.Post("/down/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
    });
    s.Post("/odd/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"choices":[]})", "application/json");
    });
    s.Post("/garbage/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html>", "text/html");
    });
  });
  const ChatRequest request{{{Role::kUser, "hi"}}, 0.0};
  for (const auto* base : {"/down", "/odd", "/garbage", "/missing"}) {
    HttpChatProvider chat(settings_for(server, base));
    EXPECT_THROW(chat.complete(request), ProviderError) << base;
  }
}

TEST(HttpChatProvider, UnreachableServerIsProviderError) {
  ProviderSettings s;
  s.url = "http://127.0.0.1:1/v1";
  s.model = "m";
  s.timeout = std::chrono::seconds(2);
  HttpChatProvider chat(s);
  EXPECT_THROW(chat.complete(ChatRequest{{{Role::kUser, "hi"}}, 0.0}), ProviderError);
}

TEST(HttpChatProvider, CountsThroughTheGateway) {
  ServerThread server([](httplib::Server& s) {
    s.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"choices":[{"message":{"content":"No."}}]})", "application/json");
    });
  });
  HttpChatProvider chat(settings_for(server));
  CallCounters counters;
  LlmGateway gateway(chat, counters);
  EXPECT_EQ(gateway.generate(single_prompt("q")), "No.");
  EXPECT_EQ(gateway.other(single_prompt("q")), "No.");
  EXPECT_EQ(counters.qgc.load(), 1u);
  EXPECT_EQ(counters.other_calls.load(), 1u);
}

TEST(HttpEmbeddingProvider, ReadsFirstEmbedding) {
  json seen;
  ServerThread server([&](httplib::Server& s) {
    s.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      res.set_content(R"({"data":[{"embedding":[0.5,-0.25,1.0]}]})", "application/json");
    });
  });
  HttpEmbeddingProvider embed(settings_for(server));
  EXPECT_EQ(embed.embed("engine overheats"), (std::vector<double>{0.5, -0.25, 1.0}));
  EXPECT_EQ(seen.at("model"), "test-embed");
  EXPECT_EQ(seen.at("input"), "engine overheats");
}

TEST(HttpProviders, MissingSettingsAreConfigErrors) {
  ProviderSettings s;
  EXPECT_THROW(HttpChatProvider{s}, ConfigError);
  EXPECT_THROW(HttpEmbeddingProvider{s}, ConfigError);
  s.url = "localhost:8000";
  s.model = "m";
  HttpChatProvider chat(s);
  EXPECT_THROW(chat.complete(ChatRequest{{{Role::kUser, "hi"}}, 0.0}), ConfigError);
}

TEST(ProviderSettings, ReadsEnvironment) {
  ::setenv("INQUIRE_LLM_URL", "http://host:9/v1", 1);
  ::setenv("INQUIRE_LLM_MODEL", "chat-model", 1);
  ::setenv("INQUIRE_EMBED_MODEL", "embed-model", 1);
  ::setenv("INQUIRE_LLM_KEY_ENV", "SOME_KEY", 1);
  ::setenv("INQUIRE_LLM_TIMEOUT", "12", 1);
  const auto s = ProviderSettings::from_env();
  EXPECT_EQ(s.url, "http://host:9/v1");
  EXPECT_EQ(s.model, "chat-model");
  EXPECT_EQ(s.embedding_model, "embed-model");
  EXPECT_EQ(s.api_key_env, "SOME_KEY");
  EXPECT_EQ(s.timeout, std::chrono::seconds(12));
  ::setenv("INQUIRE_LLM_TIMEOUT", "soon", 1);
  EXPECT_THROW(ProviderSettings::from_env(), ConfigError);
  for (const auto* v : {"INQUIRE_LLM_URL", "INQUIRE_LLM_MODEL", "INQUIRE_EMBED_MODEL", "INQUIRE_LLM_KEY_ENV",
                        "INQUIRE_LLM_TIMEOUT"}) {
    ::unsetenv(v);
  }
}

TEST(SplitUrl, SeparatesOriginAndPath) {
  const auto a = detail::split_url("https://api.example.com/v1/");
  EXPECT_EQ(a.origin, "https://api.example.com");
  EXPECT_EQ(a.path, "/v1");
  const auto b = detail::split_url("http://127.0.0.1:8080");
  EXPECT_EQ(b.origin, "http://127.0.0.1:8080");
  EXPECT_EQ(b.path, "");
}
