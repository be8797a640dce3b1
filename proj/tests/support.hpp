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

#include <functional>
#include <thread>
#include <string>
#include <vector>

#include <inquire.hpp>

namespace inquire::testing {

inline TemplateRegistry bundled_templates() {
  return TemplateRegistry::load_directory(std::string(INQUIRE_RESOURCE_DIR) + "/templates");
}

/// Catalog whose outcomes are the given labels, id = label, no signature.
inline Catalog labels_catalog(const std::vector<std::string>& labels) {
  Catalog c;
  for (const auto& l : labels) c.add(Outcome{l, l, {}});
  return c;
}

inline PossibilitySet ids(const std::vector<std::string>& v) { return PossibilitySet(v); }

/// Formats partitions the way the generation prompt asks a model to.
inline std::string format_generation_response(const std::vector<Partition>& partitions, const Catalog& catalog) {
  std::string out;
  int i = 1;
  for (const auto& p : partitions) {
    const auto yes = catalog.labels_of(p.yes_set);
    const auto no = catalog.labels_of(p.no_set);
    out += "Question " + std::to_string(i++) + ": " + p.question + "\n";
    out += "YES: " + text::join(yes, ", ") + "\n";
    out += "Count of YES: " + std::to_string(yes.size()) + "\n";
    out += "NO: " + text::join(no, ", ") + "\n";
    out += "Count of NO: " + std::to_string(no.size()) + "\n\n";
  }
  return out;
}

/// Chat responder that answers generation prompts by running the attribute
/// oracle on the item set listed in the prompt (its second line).
inline ScriptedChatProvider::Responder oracle_responder(const Catalog& catalog,
                                                        std::vector<std::string> questions) {
  return [&catalog, questions = std::move(questions)](const ChatRequest& request) {
    const auto lines = text::split(last_user_text(request), '\n');
    if (lines.size() < 2) throw ProviderError("unexpected prompt");
    PossibilitySet set;
    for (const auto& label : text::split(lines[1], ',')) {
      if (const auto* o = catalog.find_by_label(text::trim(label))) set.insert(o->id);
    }
    OracleGenerator oracle(catalog, questions);
    const std::vector<ContextEntry> context;
    return format_generation_response(oracle.generate_candidates({set, context, 3}), catalog);
  };
}

/// Expands every non-terminal answer node below `node` with `gen`.
inline void expand_all(AnswerNode& node, QuestionGenerator& gen, const SearchConfig& cfg) {
  if (node.terminal()) return;
  expand(node, gen, cfg);
  for (auto& q : node.children) {
    expand_all(*q->yes_child, gen, cfg);
    expand_all(*q->no_child, gen, cfg);
  }
}

/// Counts generate_candidates calls and forwards to another generator.
class CountingGenerator : public QuestionGenerator {
 public:
  explicit CountingGenerator(QuestionGenerator& inner) : inner_(&inner) {}
  std::vector<Partition> generate_candidates(const GenerationRequest& request) override {
    ++calls;
    return inner_->generate_candidates(request);
  }
  int calls = 0;

 private:
  QuestionGenerator* inner_;
};

/// Returns fixed partitions regardless of the request.
class FixedGenerator : public QuestionGenerator {
 public:
  explicit FixedGenerator(std::vector<Partition> partitions) : partitions_(std::move(partitions)) {}
  std::vector<Partition> generate_candidates(const GenerationRequest& request) override {
    ++calls;
    std::vector<Partition> out;
    for (const auto& p : partitions_) {
      try {
        out.push_back(normalize_partition(p, request.set));
      } catch (const RejectedPartition&) {
      }
    }
    if (out.empty()) throw GenerationFailed("no fixed partition applies");
    return out;
  }
  int calls = 0;

 private:
  std::vector<Partition> partitions_;
};

/// Plays one closed-set conversation with the rule-based answerer.
inline Session& play(Session& s, const Outcome& target, std::string_view domain = "twenty_questions") {
  auto out = s.advance();
  while (s.status() == Status::kActive && out.question) {
    out = s.advance(simulated_answer(asked_question(s), target, domain));
  }
  return s;
}

/// httplib server listening on a random local port in a background thread.
class ServerThread {
 public:
  explicit ServerThread(const std::function<void(httplib::Server&)>& setup) {
    setup(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~ServerThread() {
    server.stop();
    thread_.join();
  }
  ServerThread(const ServerThread&) = delete;
  ServerThread& operator=(const ServerThread&) = delete;

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }

  httplib::Server server;
  int port = 0;

 private:
  std::thread thread_;
};

}  // namespace inquire::testing
