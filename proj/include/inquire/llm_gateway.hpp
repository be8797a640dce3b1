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

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "inquire/errors.hpp"
#include "inquire/text.hpp"

namespace inquire {

enum class Role { kSystem, kUser, kAssistant };

inline const char* role_name(Role r) {
  switch (r) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

struct ChatMessage {
  Role role = Role::kUser;
  std::string text;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

inline ChatRequest single_prompt(std::string prompt) {
  return ChatRequest{{ChatMessage{Role::kUser, std::move(prompt)}}, 0.0};
}

/// Chat completion backend: messages in, text out.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  /// Providers that cannot take concurrent requests return true and the
  /// gateway serializes calls to them.
  virtual bool serial() const { return false; }
};

/// Text embedding backend.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<double> embed(std::string_view text) = 0;
};

/// Prompt accounting. qgc counts question-generation prompts only; every
/// other model call (classification, open-set proposals, answer
/// classification, simulated answering) lands in other_calls.
struct CallCounters {
  std::atomic<std::uint64_t> qgc{0};
  std::atomic<std::uint64_t> other_calls{0};
};

inline void record_generation_call(CallCounters& counters) {
  counters.qgc.fetch_add(1, std::memory_order_relaxed);
}

inline void record_other_call(CallCounters& counters) {
  counters.other_calls.fetch_add(1, std::memory_order_relaxed);
}

/// Routes requests to a provider and keeps the counters honest.
class LlmGateway {
 public:
  LlmGateway(ChatProvider& provider, CallCounters& counters)
      : provider_(&provider), counters_(&counters) {}

  std::string generate(const ChatRequest& request) {
    record_generation_call(*counters_);
    return call(request);
  }

  std::string other(const ChatRequest& request) {
    record_other_call(*counters_);
    return call(request);
  }

  CallCounters& counters() const noexcept { return *counters_; }

 private:
  std::string call(const ChatRequest& request) {
    if (request.messages.empty()) throw ProviderError("empty chat request");
    if (provider_->serial()) {
      std::lock_guard lock(serial_mutex_);
      return provider_->complete(request);
    }
    return provider_->complete(request);
  }

  ChatProvider* provider_;
  CallCounters* counters_;
  std::mutex serial_mutex_;
};

// ---------------------------------------------------------------------------
// Prompt templates

using Bindings = std::map<std::string, std::string, std::less<>>;

namespace detail {

inline bool placeholder_char(char c, bool first) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || (!first && std::isdigit(u));
}

/// Calls on_text(literal) and on_placeholder(name) in order of appearance.
/// Only `{identifier}` spans are placeholders; any other brace is literal.
template <typename OnText, typename OnPlaceholder>
void scan_template(std::string_view tmpl, OnText&& on_text, OnPlaceholder&& on_placeholder) {
  std::size_t literal_start = 0;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && placeholder_char(tmpl[j], j == i + 1)) ++j;
      if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
        on_text(tmpl.substr(literal_start, i - literal_start));
        on_placeholder(tmpl.substr(i + 1, j - i - 1));
        i = j + 1;
        literal_start = i;
        continue;
      }
    }
    ++i;
  }
  on_text(tmpl.substr(literal_start));
}

}  // namespace detail

/// Names of the placeholders used by a template, in first-use order.
inline std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> names;
  detail::scan_template(
      tmpl, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
      });
  return names;
}

/// Substitutes every `{name}` with its binding, byte for byte.
inline std::string render_prompt(std::string_view tmpl, const Bindings& bindings) {
  std::vector<std::string> missing;
  for (const auto& name : placeholders(tmpl)) {
    if (bindings.find(name) == bindings.end()) missing.push_back(name);
  }
  if (!missing.empty()) throw MissingPlaceholder(std::move(missing));
  std::string out;
  out.reserve(tmpl.size());
  detail::scan_template(
      tmpl, [&](std::string_view lit) { out += lit; },
      [&](std::string_view name) { out += bindings.find(name)->second; });
  return out;
}

/// Prompt templates keyed by (domain, template id). On disk a registry is a
/// directory of `<domain>/<template_id>.txt` files; one trailing newline is
/// stripped from each file.
class TemplateRegistry {
 public:
  TemplateRegistry() = default;

  static TemplateRegistry load_directory(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw TemplateNotFound("template directory not found: " + root.string());
    TemplateRegistry reg;
    for (const auto& domain_dir : fs::directory_iterator(root)) {
      if (!domain_dir.is_directory()) continue;
      for (const auto& file : fs::directory_iterator(domain_dir.path())) {
        if (file.path().extension() != ".txt") continue;
        std::ifstream in(file.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        auto body = buf.str();
        if (!body.empty() && body.back() == '\n') body.pop_back();
        reg.add(domain_dir.path().filename().string(), file.path().stem().string(), std::move(body));
      }
    }
    return reg;
  }

  void add(std::string domain, std::string id, std::string body) {
    templates_[{std::move(domain), std::move(id)}] = std::move(body);
  }

  bool has(std::string_view domain, std::string_view id) const {
    return templates_.count({std::string(domain), std::string(id)}) != 0;
  }

  const std::string& get(std::string_view domain, std::string_view id) const {
    const auto it = templates_.find({std::string(domain), std::string(id)});
    if (it == templates_.end()) {
      throw TemplateNotFound("no template '" + std::string(id) + "' for domain '" + std::string(domain) + "'");
    }
    return it->second;
  }

  std::string render(std::string_view domain, std::string_view id, const Bindings& bindings) const {
    return render_prompt(get(domain, id), bindings);
  }

  std::set<std::string> domains() const {
    std::set<std::string> out;
    for (const auto& [key, body] : templates_) out.insert(key.first);
    return out;
  }

 private:
  std::map<std::pair<std::string, std::string>, std::string> templates_;
};

// ---------------------------------------------------------------------------
// Scripted provider

/// Digest used to key scripted responses: FNV-1a over the folded text of the
/// last user message, as 16 hex digits.
inline std::string prompt_digest(std::string_view prompt) {
  static constexpr char kHex[] = "0123456789abcdef";
  auto h = text::fnv1a(text::fold(prompt));
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

inline const std::string& last_user_text(const ChatRequest& request) {
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == Role::kUser) return it->text;
  }
  throw ProviderError("chat request has no user message");
}

/// Replays canned responses keyed by prompt digest, for hermetic tests and
/// offline runs. A fallback responder may synthesize answers for prompts
/// without a canned entry.
class ScriptedChatProvider : public ChatProvider {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  ScriptedChatProvider() = default;
  explicit ScriptedChatProvider(Responder fallback) : fallback_(std::move(fallback)) {}

  /// Script file: {"responses": [{"prompt": "...", "response": "..."} |
  ///                             {"digest": "...", "response": "..."}]}
  void load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ProviderError("cannot read script: " + path.string());
    try {
      const auto j = nlohmann::json::parse(in);
      for (const auto& entry : j.at("responses")) {
        const auto response = entry.at("response").get<std::string>();
        if (entry.contains("digest")) {
          add_digest(entry.at("digest").get<std::string>(), response);
        } else {
          add(entry.at("prompt").get<std::string>(), response);
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError("malformed script " + path.string() + ": " + e.what());
    }
  }

  void add(std::string_view prompt, std::string response) {
    add_digest(prompt_digest(prompt), std::move(response));
  }

  void add_digest(std::string digest, std::string response) {
    std::lock_guard lock(mutex_);
    responses_[std::move(digest)] = std::move(response);
  }

  void set_fallback(Responder fallback) { fallback_ = std::move(fallback); }

  std::string complete(const ChatRequest& request) override {
    const auto digest = prompt_digest(last_user_text(request));
    {
      std::lock_guard lock(mutex_);
      ++calls_;
      const auto it = responses_.find(digest);
      if (it != responses_.end()) return it->second;
    }
    if (fallback_) return fallback_(request);
    throw ProviderError("no scripted response for prompt digest " + digest);
  }

  std::size_t calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> responses_;
  Responder fallback_;
  std::size_t calls_ = 0;
};

}  // namespace inquire
