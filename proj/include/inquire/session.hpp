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
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "inquire/cluster.hpp"
#include "inquire/config.hpp"
#include "inquire/dataset.hpp"
#include "inquire/generators.hpp"
#include "inquire/question_tree.hpp"
#include "inquire/search.hpp"

namespace inquire {

enum class SetMode { kClosed, kOpen, kConstrained };
enum class Phase { kInformation, kTargeting };
enum class Status { kActive, kSuccess, kFailure };

inline const char* mode_name(SetMode m) {
  switch (m) {
    case SetMode::kClosed: return "closed";
    case SetMode::kOpen: return "open";
    case SetMode::kConstrained: return "constrained";
  }
  return "closed";
}

inline std::optional<SetMode> parse_mode(std::string_view s) {
  if (s == "closed") return SetMode::kClosed;
  if (s == "open") return SetMode::kOpen;
  if (s == "constrained") return SetMode::kConstrained;
  return std::nullopt;
}

inline const char* phase_name(Phase p) { return p == Phase::kInformation ? "information" : "targeting"; }

inline const char* status_name(Status s) {
  switch (s) {
    case Status::kActive: return "active";
    case Status::kSuccess: return "success";
    case Status::kFailure: return "failure";
  }
  return "active";
}

/// Tree, clusters, and outcome catalog of one dataset. Planning, feedback,
/// and catalog growth (open sets) happen under `mutex`.
struct DatasetState {
  explicit DatasetState(Dataset d, const Config& cfg = {})
      : dataset(std::move(d)), registry(dataset.id), clusters(cfg.tau, cfg.beta, cfg.gamma) {}

  Dataset dataset;
  RootRegistry registry;
  ClusterStore clusters;
  std::mutex mutex;
};

struct AnswerInterpretation {
  enum class Kind { kAffirm, kNegate, kTargetConfirmed };
  Kind kind = Kind::kAffirm;
  std::string label;  // set for kTargetConfirmed

  static AnswerInterpretation affirm() { return {Kind::kAffirm, {}}; }
  static AnswerInterpretation negate() { return {Kind::kNegate, {}}; }
  static AnswerInterpretation confirmed(std::string label) { return {Kind::kTargetConfirmed, std::move(label)}; }
};

/// Maps free-text answers that no rule recognizes to yes/no.
using AnswerClassifier =
    std::function<std::optional<AnswerInterpretation::Kind>(std::string_view question, std::string_view answer)>;

/// Collaborators a session needs beyond its dataset. Only `generator` is
/// mandatory; constrained and open modes also need `gateway` and
/// `templates`, clustering needs `embedder`.
struct SessionServices {
  QuestionGenerator* generator = nullptr;
  EmbeddingProvider* embedder = nullptr;
  LlmGateway* gateway = nullptr;
  const TemplateRegistry* templates = nullptr;
  AnswerClassifier classifier;
};

struct TranscriptRecord {
  int turn = 0;
  Phase phase = Phase::kInformation;
  std::string question;
  std::string answer;
  std::size_t set_size_after = 0;
};

/// Result of one advance: the next question, or nothing once terminal.
struct TurnOutput {
  std::optional<std::string> question;
  Status status = Status::kActive;
};

inline constexpr int kOpenSetSize = 5;

/// One conversation: alternates planned information-seeking questions (the
/// first delta*T turns, while the set has more than two outcomes) with
/// targeting questions that name a single outcome.
class Session {
 public:
  Session(std::string session_id, DatasetState& state, SessionServices services, Config config, SetMode mode,
          std::string problem_description, std::uint64_t seed)
      : id_(std::move(session_id)),
        state_(&state),
        services_(std::move(services)),
        config_(std::move(config)),
        mode_(mode),
        description_(std::move(problem_description)),
        rng_(seed) {
    if (!services_.generator) throw std::invalid_argument("session requires a question generator");
    config_.validate();
    std::lock_guard lock(state_->mutex);
    if (services_.embedder && !text::trim(description_).empty()) {
      const auto e = services_.embedder->embed(description_);
      // A description with no usable tokens embeds to zero: no cluster.
      if (std::any_of(e.begin(), e.end(), [](double v) { return v != 0.0; })) {
        cluster_ = assign_cluster(e, state_->clusters);
      }
    }
    initial_set_ = resolve_initial_set();
    node_ = &find_or_create_root(state_->registry, initial_set_);
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Feeds the answer to the pending question (if any) and emits the next
  /// question, or finishes the session.
  TurnOutput advance(std::optional<std::string_view> answer = std::nullopt) {
    if (status_ != Status::kActive) throw SessionClosed("session " + id_ + " is no longer active");
    if (pending_) {
      if (!answer) return {pending_->text, status_};
      apply(interpret_answer(*answer), std::string(*answer));
    } else if (answer) {
      throw std::invalid_argument("no question is pending an answer");
    }
    if (status_ == Status::kActive && t_ >= config_.max_turns) status_ = Status::kFailure;
    if (status_ != Status::kActive) return {std::nullopt, status_};
    auto next = emit_next();
    return {std::move(next), status_};
  }

  /// Same as advance() for answers already interpreted (structured UI input).
  TurnOutput advance(const AnswerInterpretation& interpretation, std::string answer_text) {
    if (status_ != Status::kActive) throw SessionClosed("session " + id_ + " is no longer active");
    if (!pending_) throw std::invalid_argument("no question is pending an answer");
    apply(interpretation, std::move(answer_text));
    if (status_ == Status::kActive && t_ >= config_.max_turns) status_ = Status::kFailure;
    if (status_ != Status::kActive) return {std::nullopt, status_};
    auto next = emit_next();
    return {std::move(next), status_};
  }

  /// Rule-based reading of an answer: confirmation phrases first, then a
  /// leading yes/no, then the optional classifier.
  AnswerInterpretation interpret_answer(std::string_view answer) const {
    const auto folded = text::fold(answer);
    if (folded.find("you guessed it") != std::string::npos || folded.find("you are right") != std::string::npos) {
      if (auto label = confirmed_label(answer)) return AnswerInterpretation::confirmed(std::move(*label));
    }
    std::string token;
    for (char c : folded) {
      if (!std::isalpha(static_cast<unsigned char>(c))) {
        if (!token.empty()) break;
        continue;
      }
      token.push_back(c);
    }
    if (token == "yes") return AnswerInterpretation::affirm();
    if (token == "no") return AnswerInterpretation::negate();
    if (services_.classifier) {
      const auto question = pending_ ? std::string_view(pending_->text) : std::string_view();
      if (auto kind = services_.classifier(question, answer)) {
        if (*kind == AnswerInterpretation::Kind::kTargetConfirmed) {
          if (pending_ && pending_->phase == Phase::kTargeting) return AnswerInterpretation::confirmed(pending_->label);
        } else {
          return AnswerInterpretation{*kind, {}};
        }
      }
    }
    throw UninterpretableAnswer("cannot interpret answer: " + std::string(answer));
  }

  /// Picks the next outcome to name: the first untried member of the current
  /// set, then of the session's initial set (renewing the proposal in open
  /// mode). Marks it tried.
  std::string make_targeting_question() {
    auto label = next_target_label();
    if (!label) throw NoCandidates("every candidate outcome has already been named");
    tried_targets_.push_back(*label);
    return *label;
  }

  std::string target_question_text(const std::string& label) const {
    if (services_.templates && services_.templates->has(state_->dataset.domain, "target_question")) {
      return services_.templates->render(state_->dataset.domain, "target_question", {{"item", label}});
    }
    return "Is X '" + label + "'?";
  }

  const std::string& id() const noexcept { return id_; }
  const std::string& dataset_id() const noexcept { return state_->dataset.id; }
  SetMode mode() const noexcept { return mode_; }
  Status status() const noexcept { return status_; }
  int turn() const noexcept { return t_; }
  int max_turns() const noexcept { return config_.max_turns; }
  const AnswerNode& node() const noexcept { return *node_; }
  const PossibilitySet& initial_set() const noexcept { return initial_set_; }
  std::optional<ClusterId> cluster() const noexcept { return cluster_; }
  const std::vector<TranscriptRecord>& transcript() const noexcept { return transcript_; }
  const std::vector<QuestionNode*>& trajectory() const noexcept { return trajectory_; }
  const std::vector<std::string>& tried_targets() const noexcept { return tried_targets_; }
  const std::vector<int>& planning_generation_calls() const noexcept { return planning_calls_; }
  bool feedback_propagated() const noexcept { return feedback_propagated_; }
  bool planning_failed() const noexcept { return planning_failed_; }
  const std::string& success_label() const noexcept { return success_label_; }

  std::optional<std::string> pending_question() const {
    return pending_ ? std::optional<std::string>(pending_->text) : std::nullopt;
  }
  std::optional<Phase> pending_phase() const {
    return pending_ ? std::optional<Phase>(pending_->phase) : std::nullopt;
  }
  std::optional<std::string> pending_target() const {
    if (pending_ && pending_->phase == Phase::kTargeting) return pending_->label;
    return std::nullopt;
  }
  const QuestionNode* pending_info_question() const { return pending_ ? pending_->question : nullptr; }

  std::vector<std::pair<std::string, std::string>> history() const {
    std::vector<std::pair<std::string, std::string>> h;
    for (const auto& r : transcript_) h.emplace_back(r.question, r.answer);
    return h;
  }

 private:
  struct Pending {
    Phase phase;
    std::string text;
    QuestionNode* question = nullptr;  // information phase
    std::string label;                 // targeting phase
  };

  PossibilitySet resolve_initial_set() {
    auto& d = state_->dataset;
    switch (mode_) {
      case SetMode::kClosed:
        if (d.catalog.size() == 0) throw DatasetError("closed mode needs a dataset with outcomes");
        return d.catalog.all();
      case SetMode::kConstrained:
        if (d.catalog.size() == 0) throw DatasetError("constrained mode needs a dataset with outcomes");
        require_gateway("constrained");
        if (text::trim(description_).empty()) return d.catalog.all();
        return constrain_possibilities(description_, d.catalog.all(), d.catalog, *services_.gateway,
                                       *services_.templates, d.domain);
      case SetMode::kOpen:
        require_gateway("open");
        return open_set_update({}, {}, kOpenSetSize, description_, d.catalog, *services_.gateway,
                               *services_.templates, d.domain);
    }
    return {};
  }

  void require_gateway(const char* mode) const {
    if (!services_.gateway || !services_.templates) {
      throw ConfigError(std::string(mode) + " mode needs a model gateway and prompt templates");
    }
  }

  std::optional<std::string> confirmed_label(std::string_view answer) const {
    std::lock_guard lock(state_->mutex);  // open-mode sessions add to the catalog
    const auto& catalog = state_->dataset.catalog;
    std::vector<std::string> quoted;
    for (std::size_t i = 0; i < answer.size(); ++i) {
      const char q = answer[i];
      if (q != '\'' && q != '"') continue;
      const auto close = answer.find(q, i + 1);
      if (close == std::string_view::npos) break;
      quoted.emplace_back(text::trim(answer.substr(i + 1, close - i - 1)));
      i = close;
    }
    for (const auto& candidate : quoted) {
      if (const auto* o = catalog.find_by_label(candidate)) return o->label;
    }
    const auto folded = text::fold(answer);
    if (pending_ && pending_->phase == Phase::kTargeting &&
        folded.find(text::fold(pending_->label)) != std::string::npos) {
      return pending_->label;
    }
    const Outcome* longest = nullptr;
    for (const auto& id : initial_set_) {
      const auto& o = catalog.at(id);
      if (folded.find(text::fold(o.label)) != std::string::npos &&
          (!longest || o.label.size() > longest->label.size())) {
        longest = &o;
      }
    }
    if (longest) return longest->label;
    for (const auto& candidate : quoted) {
      if (!candidate.empty()) return candidate;
    }
    if (pending_ && pending_->phase == Phase::kTargeting) return pending_->label;
    return std::nullopt;
  }

  void apply(AnswerInterpretation interpretation, std::string answer_text) {
    auto pending = std::move(*pending_);
    pending_.reset();
    if (interpretation.kind == AnswerInterpretation::Kind::kAffirm && pending.phase == Phase::kTargeting) {
      interpretation = AnswerInterpretation::confirmed(pending.label);
    }
    if (interpretation.kind == AnswerInterpretation::Kind::kTargetConfirmed) {
      if (interpretation.label.empty()) throw std::invalid_argument("confirmation without a label");
      status_ = Status::kSuccess;
      success_label_ = interpretation.label;
      if (cluster_) {
        std::lock_guard lock(state_->mutex);
        propagate_feedback(trajectory_, *cluster_, state_->clusters);
        feedback_propagated_ = true;
      }
    } else if (pending.phase == Phase::kInformation) {
      node_ = &pending.question->child(interpretation.kind == AnswerInterpretation::Kind::kAffirm ? Branch::kYes
                                                                                                   : Branch::kNo);
    }
    transcript_.push_back({t_, pending.phase, std::move(pending.text), std::move(answer_text), node_->set.size()});
  }

  std::optional<std::string> emit_next() {
    const bool info_turn = static_cast<double>(t_) < config_.delta * static_cast<double>(config_.max_turns);
    if (!planning_failed_ && info_turn && node_->set.size() > 2) {
      std::lock_guard lock(state_->mutex);
      try {
        PlanStats stats;
        auto& q = plan_question(*node_, cluster_, config_.search, *services_.generator, rng_, &stats);
        planning_calls_.push_back(stats.expansions);
        trajectory_.push_back(&q);
        pending_ = Pending{Phase::kInformation, q.question(), &q, {}};
        ++t_;
        return pending_->text;
      } catch (const GenerationFailed&) {
        planning_failed_ = true;
      }
    }
    std::string label;
    try {
      label = make_targeting_question();
    } catch (const NoCandidates&) {
      status_ = Status::kFailure;
      return std::nullopt;
    }
    pending_ = Pending{Phase::kTargeting, target_question_text(label), nullptr, label};
    ++t_;
    return pending_->text;
  }

  bool tried(const std::string& label) const {
    const auto key = text::fold(label);
    return std::any_of(tried_targets_.begin(), tried_targets_.end(),
                       [&](const std::string& t) { return text::fold(t) == key; });
  }

  std::optional<std::string> first_untried(const PossibilitySet& set) const {
    for (const auto& id : set) {
      const auto& label = state_->dataset.catalog.label_of(id);
      if (!tried(label)) return label;
    }
    return std::nullopt;
  }

  std::optional<std::string> next_target_label() {
    std::lock_guard lock(state_->mutex);
    if (auto l = first_untried(node_->set)) return l;
    if (auto l = first_untried(initial_set_)) return l;
    if (auto l = first_untried(renewed_set_)) return l;
    if (mode_ == SetMode::kOpen) {
      renewed_set_ = open_set_update(history(), {}, kOpenSetSize, description_, state_->dataset.catalog,
                                     *services_.gateway, *services_.templates, state_->dataset.domain);
      return first_untried(renewed_set_);
    }
    return std::nullopt;
  }

  std::string id_;
  DatasetState* state_;
  SessionServices services_;
  Config config_;
  SetMode mode_;
  std::string description_;
  Rng rng_;

  std::optional<ClusterId> cluster_;
  PossibilitySet initial_set_;
  PossibilitySet renewed_set_;
  AnswerNode* node_ = nullptr;
  int t_ = 0;
  Status status_ = Status::kActive;
  std::optional<Pending> pending_;
  std::vector<TranscriptRecord> transcript_;
  std::vector<QuestionNode*> trajectory_;
  std::vector<std::string> tried_targets_;
  std::vector<int> planning_calls_;
  std::string success_label_;
  bool planning_failed_ = false;
  bool feedback_propagated_ = false;
};

inline TurnOutput advance_session(Session& s, std::optional<std::string_view> answer = std::nullopt) {
  return s.advance(answer);
}

inline nlohmann::json transcript_to_json(const Session& s) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : s.transcript()) {
    records.push_back({{"turn", r.turn},
                       {"phase", phase_name(r.phase)},
                       {"question", r.question},
                       {"answer", r.answer},
                       {"set_size_after", r.set_size_after}});
  }
  return {{"session_id", s.id()}, {"dataset_id", s.dataset_id()}, {"status", status_name(s.status())},
          {"records", std::move(records)}};
}

/// Yes/no classifier for free-text answers backed by a chat model. Counts
/// as an "other" call, never as question generation.
inline AnswerClassifier make_llm_answer_classifier(LlmGateway& gateway) {
  return [&gateway](std::string_view question,
                    std::string_view answer) -> std::optional<AnswerInterpretation::Kind> {
    const auto reply = gateway.other(single_prompt(
        "Question: " + std::string(question) + "\nAnswer: " + std::string(answer) +
        "\nDoes the answer mean Yes or No to the question? Reply with exactly one word: Yes or No."));
    const auto folded = text::fold(reply);
    if (folded.rfind("yes", 0) == 0) return AnswerInterpretation::Kind::kAffirm;
    if (folded.rfind("no", 0) == 0) return AnswerInterpretation::Kind::kNegate;
    return std::nullopt;
  };
}

}  // namespace inquire
