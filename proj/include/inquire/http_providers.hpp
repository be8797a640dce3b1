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

#pragma once

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "inquire/errors.hpp"
#include "inquire/llm_gateway.hpp"

namespace inquire {

/// Endpoint settings for an OpenAI-compatible chat/embeddings server.
struct ProviderSettings {
  std::string url;                 // e.g. http://localhost:8000/v1
  std::string model;
  std::string embedding_model;
  std::string api_key_env;         // name of the variable holding the key
  std::chrono::seconds timeout{60};

  /// Reads INQUIRE_LLM_URL, INQUIRE_LLM_MODEL, INQUIRE_EMBED_MODEL,
  /// INQUIRE_LLM_KEY_ENV and INQUIRE_LLM_TIMEOUT (seconds).
  static ProviderSettings from_env() {
    const auto get = [](const char* name) -> std::string {
      const char* v = std::getenv(name);
      return v ? std::string(v) : std::string();
    };
    ProviderSettings s;
    s.url = get("INQUIRE_LLM_URL");
    s.model = get("INQUIRE_LLM_MODEL");
    s.embedding_model = get("INQUIRE_EMBED_MODEL");
    s.api_key_env = get("INQUIRE_LLM_KEY_ENV");
    if (const auto t = get("INQUIRE_LLM_TIMEOUT"); !t.empty()) {
      try {
        s.timeout = std::chrono::seconds(std::stol(t));
      } catch (const std::exception&) {
        throw ConfigError("INQUIRE_LLM_TIMEOUT must be an integer number of seconds");
      }
    }
    return s;
  }

  std::optional<std::string> api_key() const {
    if (api_key_env.empty()) return std::nullopt;
    const char* v = std::getenv(api_key_env.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  }
};

namespace detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("provider url needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? std::string() : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

inline nlohmann::json post_json(const ProviderSettings& s, const std::string& endpoint, const nlohmann::json& body) {
  const auto url = split_url(s.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(s.timeout);
  client.set_read_timeout(s.timeout);
  client.set_write_timeout(s.timeout);
  httplib::Headers headers;
  if (const auto key = s.api_key()) headers.emplace("Authorization", "Bearer " + *key);
  const auto res = client.Post(url.path + endpoint, headers, body.dump(), "application/json");
  if (!res) throw ProviderError("request to " + s.url + endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("provider returned invalid JSON: ") + e.what());
  }
}

}  // namespace detail

/// Chat completion over POST {url}/chat/completions.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderSettings settings) : settings_(std::move(settings)) {
    if (settings_.url.empty()) throw ConfigError("chat provider url is not set");
    if (settings_.model.empty()) throw ConfigError("chat provider model is not set");
  }

  std::string complete(const ChatRequest& request) override {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) messages.push_back({{"role", role_name(m.role)}, {"content", m.text}});
    const auto out = detail::post_json(
        settings_, "/chat/completions",
        {{"model", settings_.model}, {"messages", std::move(messages)}, {"temperature", request.temperature}});
    try {
      return out.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected chat response shape: ") + e.what());
    }
  }

 private:
  ProviderSettings settings_;
};

/// Embeddings over POST {url}/embeddings.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(ProviderSettings settings) : settings_(std::move(settings)) {
    if (settings_.url.empty()) throw ConfigError("embedding provider url is not set");
    if (settings_.embedding_model.empty()) throw ConfigError("embedding model is not set");
  }

  std::vector<double> embed(std::string_view text) override {
    const auto out = detail::post_json(settings_, "/embeddings",
                                       {{"model", settings_.embedding_model}, {"input", std::string(text)}});
    try {
      return out.at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected embedding response shape: ") + e.what());
    }
  }

 private:
  ProviderSettings settings_;
};

}  // namespace inquire
