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

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "inquire/cluster.hpp"
#include "inquire/session.hpp"
#include "inquire/snapshot.hpp"

namespace inquire {

/// A response of the session API: HTTP status plus JSON body. Errors carry
/// {"code", "message"}.
struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// Live interactive sessions over a set of loaded datasets. Transport-free;
/// bind() exposes it over HTTP.
class SessionService {
 public:
  using GeneratorFactory = std::function<std::unique_ptr<QuestionGenerator>(DatasetState&)>;

  struct Options {
    Config config{};
    EmbeddingProvider* embedder = nullptr;
    LlmGateway* gateway = nullptr;
    const TemplateRegistry* templates = nullptr;
    AnswerClassifier classifier;
    /// Tree and cluster snapshots are written here after every finished
    /// session, as <dataset_id>.tree.json and <dataset_id>.clusters.json.
    std::optional<std::filesystem::path> snapshot_dir;
  };

  SessionService(Options options, GeneratorFactory make_generator)
      : options_(std::move(options)), make_generator_(std::move(make_generator)) {
    options_.config.validate();
  }

  /// Registers a dataset, restoring its tree and clusters from the snapshot
  /// directory when present.
  void add_dataset(Dataset dataset) {
    auto entry = std::make_unique<DatasetEntry>();
    entry->state = std::make_unique<DatasetState>(std::move(dataset), options_.config);
    auto& state = *entry->state;
    if (options_.snapshot_dir) {
      const auto tree = tree_path(state.dataset.id);
      const auto clusters = cluster_path(state.dataset.id);
      if (std::filesystem::exists(tree)) state.registry = snapshot_load(tree);
      if (std::filesystem::exists(clusters)) state.clusters = load_clusters(clusters);
    }
    entry->generator = make_generator_(state);
    std::unique_lock lock(datasets_mutex_);
    const auto id = state.dataset.id;
    datasets_[id] = std::move(entry);
  }

  ApiResponse list_datasets() const {
    std::shared_lock lock(datasets_mutex_);
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [id, entry] : datasets_) {
      out.push_back({{"id", id},
                     {"domain", entry->state->dataset.domain},
                     {"outcomes", entry->state->dataset.catalog.size()},
                     {"samples", entry->state->dataset.samples.size()}});
    }
    return {200, {{"datasets", std::move(out)}}};
  }

  ApiResponse tree_stats(const std::string& dataset_id) const {
    auto* entry = find_dataset(dataset_id);
    if (!entry) return error(404, "not_found", "unknown dataset: " + dataset_id);
    std::lock_guard lock(entry->state->mutex);
    const auto s = inquire::tree_stats(entry->state->registry);
    nlohmann::json histogram = nlohmann::json::object();
    for (const auto& [depth, count] : s.depth_histogram) histogram[std::to_string(depth)] = count;
    nlohmann::json per_cluster = nlohmann::json::object();
    for (const auto& [k, count] : s.bonus_entries) per_cluster[std::to_string(k)] = count;
    return {200,
            {{"dataset_id", dataset_id},
             {"roots", s.roots},
             {"answer_nodes", s.answer_nodes},
             {"question_nodes", s.question_nodes},
             {"expanded_nodes", s.expanded_nodes},
             {"node_count", s.answer_nodes + s.question_nodes},
             {"depth_histogram", std::move(histogram)},
             {"bonus", {{"entries_per_cluster", std::move(per_cluster)},
                        {"total", s.bonus_total},
                        {"max", s.bonus_max}}},
             {"clusters", entry->state->clusters.clusters().size()}}};
  }

  /// Body: {"dataset_id", "mode": "closed|open|constrained",
  ///        "problem_description"?, "config"?: {flat overrides}}
  ApiResponse create_session(const nlohmann::json& body) {
    if (!body.is_object() || !body.contains("dataset_id") || !body.at("dataset_id").is_string()) {
      return error(422, "invalid_request", "dataset_id is required");
    }
    const auto dataset_id = body.at("dataset_id").get<std::string>();
    auto* entry = find_dataset(dataset_id);
    if (!entry) return error(404, "not_found", "unknown dataset: " + dataset_id);

    const auto mode_text = body.value("mode", std::string("closed"));
    const auto mode = parse_mode(mode_text);
    if (!mode) return error(422, "invalid_request", "invalid mode: " + mode_text);

    Config config = options_.config;
    if (body.contains("config")) {
      try {
        config = apply_config(config, body.at("config"));
      } catch (const ConfigError& e) {
        return error(422, "invalid_request", e.what());
      }
    }
    std::string description;
    if (body.contains("problem_description")) {
      if (!body.at("problem_description").is_string()) {
        return error(422, "invalid_request", "problem_description must be a string");
      }
      description = body.at("problem_description").get<std::string>();
    }

    const auto n = next_id_.fetch_add(1);
    auto session_id = "s" + std::to_string(n);
    auto slot = std::make_shared<SessionSlot>();
    SessionServices services{entry->generator.get(), options_.embedder, options_.gateway, options_.templates,
                             options_.classifier};
    try {
      slot->session = std::make_unique<Session>(session_id, *entry->state, std::move(services), config, *mode,
                                                description, config.search.rng_seed + n);
      slot->initial_size = slot->session->initial_set().size();
      slot->session->advance();
    } catch (const ConfigError& e) {
      return error(422, "invalid_request", e.what());
    } catch (const DatasetError& e) {
      return error(422, "invalid_request", e.what());
    } catch (const TemplateNotFound& e) {
      return error(422, "invalid_request", e.what());
    } catch (const ProviderError& e) {
      return error(502, "provider_error", e.what());
    }
    {
      std::unique_lock lock(sessions_mutex_);
      sessions_[session_id] = slot;
    }
    std::lock_guard lock(slot->mutex);
    after_turn(*slot, *entry);
    return {201, view(*slot)};
  }

  ApiResponse get_session(const std::string& id) const {
    auto slot = find_session(id);
    if (!slot) return error(404, "not_found", "unknown session: " + id);
    std::lock_guard lock(slot->mutex);
    return {200, view(*slot)};
  }

  /// Body: {"answer": "yes" | "no" | "confirm" | {"free_text": "..."}}
  ApiResponse post_answer(const std::string& id, const nlohmann::json& body) {
    auto slot = find_session(id);
    if (!slot) return error(404, "not_found", "unknown session: " + id);
    std::lock_guard lock(slot->mutex);
    auto& s = *slot->session;
    if (s.status() != Status::kActive) return error(409, "conflict", "session " + id + " is already finished");
    if (!body.is_object() || !body.contains("answer")) return error(422, "invalid_request", "answer is required");

    const auto& answer = body.at("answer");
    AnswerInterpretation interpretation;
    std::string text;
    if (answer.is_string()) {
      text = answer.get<std::string>();
      if (text == "yes") {
        interpretation = AnswerInterpretation::affirm();
      } else if (text == "no") {
        interpretation = AnswerInterpretation::negate();
      } else if (text == "confirm") {
        const auto target = s.pending_target();
        if (!target) return error(422, "invalid_request", "confirm is only valid after a targeting question");
        interpretation = AnswerInterpretation::confirmed(*target);
      } else {
        return error(422, "invalid_request", "answer must be yes, no, confirm or {free_text}");
      }
    } else if (answer.is_object() && answer.contains("free_text") && answer.at("free_text").is_string()) {
      text = answer.at("free_text").get<std::string>();
      try {
        interpretation = s.interpret_answer(text);
      } catch (const UninterpretableAnswer& e) {
        return error(422, "uninterpretable", e.what());
      }
    } else {
      return error(422, "invalid_request", "answer must be yes, no, confirm or {free_text}");
    }

    try {
      s.advance(interpretation, text);
    } catch (const ProviderError& e) {
      return error(502, "provider_error", e.what());
    }
    if (auto* entry = find_dataset(s.dataset_id())) after_turn(*slot, *entry);
    return {200, view(*slot)};
  }

  /// Writes every dataset's tree and clusters to the snapshot directory.
  void snapshot_all() const {
    if (!options_.snapshot_dir) return;
    std::shared_lock lock(datasets_mutex_);
    for (const auto& [id, entry] : datasets_) save_snapshot(*entry);
  }

  /// Routes: POST /v1/sessions, GET /v1/sessions/{id},
  /// POST /v1/sessions/{id}/answer, GET /v1/datasets,
  /// GET /v1/datasets/{id}/tree/stats.
  void bind(httplib::Server& server) {
    const auto reply = [](httplib::Response& res, const ApiResponse& api) {
      res.status = api.status;
      res.set_content(api.body.dump(), "application/json");
    };
    const auto parse = [](const httplib::Request& req) -> std::optional<nlohmann::json> {
      if (req.body.empty()) return nlohmann::json::object();
      try {
        return nlohmann::json::parse(req.body);
      } catch (const nlohmann::json::exception&) {
        return std::nullopt;
      }
    };
    server.Post("/v1/sessions", [this, reply, parse](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse(req);
      reply(res, body ? create_session(*body) : error(422, "invalid_request", "body is not valid JSON"));
    });
    server.Get(R"(/v1/sessions/([^/]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, get_session(req.matches[1]));
    });
    server.Post(R"(/v1/sessions/([^/]+)/answer)",
                [this, reply, parse](const httplib::Request& req, httplib::Response& res) {
                  const auto body = parse(req);
                  reply(res, body ? post_answer(req.matches[1], *body)
                                  : error(422, "invalid_request", "body is not valid JSON"));
                });
    server.Get("/v1/datasets", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, list_datasets());
    });
    server.Get(R"(/v1/datasets/([^/]+)/tree/stats)", [this, reply](const httplib::Request& req, httplib::Response& res) {
      reply(res, tree_stats(req.matches[1]));
    });
    server.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      reply(res, error(500, "internal", message));
    });
  }

 private:
  struct DatasetEntry {
    std::unique_ptr<DatasetState> state;
    std::unique_ptr<QuestionGenerator> generator;
  };

  struct SessionSlot {
    std::mutex mutex;
    std::unique_ptr<Session> session;
    std::size_t initial_size = 0;
  };

  static ApiResponse error(int status, const char* code, const std::string& message) {
    return {status, {{"code", code}, {"message", message}}};
  }

  DatasetEntry* find_dataset(const std::string& id) const {
    std::shared_lock lock(datasets_mutex_);
    const auto it = datasets_.find(id);
    return it == datasets_.end() ? nullptr : it->second.get();
  }

  std::shared_ptr<SessionSlot> find_session(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  std::filesystem::path tree_path(const std::string& dataset_id) const {
    return *options_.snapshot_dir / (dataset_id + ".tree.json");
  }
  std::filesystem::path cluster_path(const std::string& dataset_id) const {
    return *options_.snapshot_dir / (dataset_id + ".clusters.json");
  }

  void save_snapshot(DatasetEntry& entry) const {
    std::lock_guard lock(entry.state->mutex);
    std::filesystem::create_directories(*options_.snapshot_dir);
    snapshot_save(entry.state->registry, tree_path(entry.state->dataset.id));
    save_clusters(entry.state->clusters, cluster_path(entry.state->dataset.id));
  }

  void after_turn(SessionSlot& slot, DatasetEntry& entry) const {
    if (slot.session->status() != Status::kActive && options_.snapshot_dir) save_snapshot(entry);
  }

  /// Public view of a session. Exposes the size of the current set, never
  /// its members or the target.
  static nlohmann::json view(const SessionSlot& slot) {
    const auto& s = *slot.session;
    nlohmann::json history = nlohmann::json::array();
    for (const auto& r : s.transcript()) {
      history.push_back(
          {{"turn", r.turn}, {"phase", phase_name(r.phase)}, {"question", r.question}, {"answer", r.answer}});
    }
    const auto phase = s.pending_phase();
    nlohmann::json out = {
        {"session_id", s.id()},
        {"dataset_id", s.dataset_id()},
        {"mode", mode_name(s.mode())},
        {"status", status_name(s.status())},
        {"turn", s.turn()},
        {"max_turns", s.max_turns()},
        {"phase", s.status() == Status::kActive && phase ? nlohmann::json(phase_name(*phase)) : nlohmann::json(nullptr)},
        {"question", s.status() == Status::kActive && s.pending_question() ? nlohmann::json(*s.pending_question())
                                                                            : nlohmann::json(nullptr)},
        {"remaining", s.node().set.size()},
        {"initial_size", slot.initial_size},
        {"history", std::move(history)},
        {"feedback_propagated", s.feedback_propagated()},
    };
    if (s.status() == Status::kSuccess) out["turns"] = s.turn();
    return out;
  }

  Options options_;
  GeneratorFactory make_generator_;
  mutable std::shared_mutex datasets_mutex_;
  std::map<std::string, std::unique_ptr<DatasetEntry>> datasets_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<SessionSlot>> sessions_;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace inquire
