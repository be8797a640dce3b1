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
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "inquire/session.hpp"

namespace inquire {

/// Phrase a truthful answerer uses when the questioner names the target.
inline std::string confirmation_phrase(std::string_view domain, std::string_view label) {
  const auto l = std::string(label);
  if (domain == "medical") return "You are right. I am experiencing '" + l + "'.";
  if (domain == "troubleshooting") return "You are right. My device has issues with '" + l + "'.";
  return "You guessed it. X is '" + l + "'.";
}

/// The question a simulated answerer is looking at: an information question
/// (its partition) or a targeting question (the named label).
using AskedQuestion = std::variant<const Partition*, std::string>;

/// Truthful rule-based answerer: "Yes."/"No." from partition membership, the
/// confirmation phrase when the target is named exactly.
inline std::string simulated_answer(const AskedQuestion& question, const Outcome& target,
                                    std::string_view domain = "twenty_questions") {
  if (const auto* p = std::get_if<const Partition*>(&question)) {
    return (*p)->yes_set.contains(target.id) ? "Yes." : "No.";
  }
  const auto& label = std::get<std::string>(question);
  if (text::fold(label) == text::fold(target.label)) return confirmation_phrase(domain, target.label);
  return "No.";
}

inline AskedQuestion asked_question(const Session& s) {
  if (const auto* q = s.pending_info_question()) return &q->partition;
  if (auto label = s.pending_target()) return *label;
  throw std::logic_error("session has no pending question");
}

/// Answerer simulated by a chat model primed with the domain's answerer
/// prologue; keeps its own copy of the conversation.
class LlmAnswerer {
 public:
  LlmAnswerer(LlmGateway& gateway, const TemplateRegistry& templates, std::string domain, std::string target)
      : gateway_(&gateway) {
    messages_.push_back(
        {Role::kSystem, templates.render(domain, "answerer_prologue", {{"target_item", std::move(target)}})});
  }

  std::string answer(const std::string& question) {
    messages_.push_back({Role::kUser, question});
    auto reply = gateway_->other(ChatRequest{messages_, 0.0});
    messages_.push_back({Role::kAssistant, reply});
    return reply;
  }

 private:
  LlmGateway* gateway_;
  std::vector<ChatMessage> messages_;
};

struct SampleRecord {
  std::string sample_id;
  std::string target;
  bool success = false;
  int turns = 0;
  std::uint64_t qgc = 0;
  int max_planning_calls = 0;  // largest generation count of one planning turn
  bool target_tracked = true;  // target stayed in the current set on every turn
  nlohmann::json transcript;
};

struct BenchmarkReport {
  std::string dataset_id;
  std::size_t n_samples = 0;
  double sr = 0.0;                   // percent
  std::optional<double> msc;         // mean turns over successes
  double mean_qgc = 0.0;             // counter delta / samples
  std::optional<double> mean_qgc_warm;  // same, first sample excluded
  std::uint64_t qgc_total = 0;
  double seconds = 0.0;
  std::vector<SampleRecord> samples;
};

struct BenchmarkOptions {
  SetMode mode = SetMode::kClosed;
  bool shuffle = false;
  std::uint64_t shuffle_seed = 0;
  /// When set, answers come from this factory (e.g. a model answerer)
  /// instead of the rule-based simulated answerer.
  std::function<std::function<std::string(const Session&, const std::string&)>(const Sample&)> answerer_factory;
};

/// Streams samples (file order unless shuffled) through full sessions that
/// share one tree and cluster store, and aggregates SR, MSC and mean QGC.
/// `counters` must be the counters the generator records into.
inline BenchmarkReport run_benchmark(DatasetState& state, const Config& config, const SessionServices& services,
                                     CallCounters& counters, const BenchmarkOptions& options = {}) {
  const auto& dataset = state.dataset;
  if (dataset.samples.empty()) throw EmptyDataset("dataset " + dataset.id + " has no samples");
  const auto started = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(dataset.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (options.shuffle) {
    std::mt19937_64 shuffle_rng(options.shuffle_seed);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
  }

  BenchmarkReport report;
  report.dataset_id = dataset.id;
  report.n_samples = order.size();
  const auto qgc_start = counters.qgc.load();

  for (const auto index : order) {
    const Sample sample = dataset.samples[index];
    std::seed_seq seq{static_cast<std::uint32_t>(config.search.rng_seed),
                      static_cast<std::uint32_t>(config.search.rng_seed >> 32), static_cast<std::uint32_t>(index)};
    std::mt19937_64 seeder(seq);
    const auto qgc_before = counters.qgc.load();

    Session session(sample.id, state, services, config, options.mode, sample.problem_description, seeder());
    auto answerer = options.answerer_factory ? options.answerer_factory(sample) : nullptr;

    SampleRecord record;
    record.sample_id = sample.id;
    record.target = sample.target;

    auto out = session.advance();
    while (session.status() == Status::kActive && out.question) {
      std::string answer;
      if (answerer) {
        answer = answerer(session, *out.question);
      } else {
        const Outcome* target = state.dataset.catalog.find_by_label(sample.target);
        const Outcome fallback{sample.target, sample.target, {}};
        answer = simulated_answer(asked_question(session), target ? *target : fallback, dataset.domain);
      }
      try {
        out = session.advance(answer);
      } catch (const UninterpretableAnswer&) {
        break;  // counts as a failed conversation
      }
      if (const auto* target = state.dataset.catalog.find_by_label(sample.target)) {
        record.target_tracked = record.target_tracked && session.node().set.contains(target->id);
      }
    }

    record.success = session.status() == Status::kSuccess &&
                     text::fold(session.success_label()) == text::fold(sample.target);
    record.turns = session.turn();
    record.qgc = counters.qgc.load() - qgc_before;
    for (int calls : session.planning_generation_calls()) {
      record.max_planning_calls = std::max(record.max_planning_calls, calls);
    }
    record.transcript = transcript_to_json(session);
    report.samples.push_back(std::move(record));
  }

  report.qgc_total = counters.qgc.load() - qgc_start;
  std::size_t successes = 0;
  double success_turns = 0.0;
  for (const auto& r : report.samples) {
    if (r.success) {
      ++successes;
      success_turns += r.turns;
    }
  }
  const auto n = static_cast<double>(report.n_samples);
  report.sr = 100.0 * static_cast<double>(successes) / n;
  if (successes > 0) report.msc = success_turns / static_cast<double>(successes);
  report.mean_qgc = static_cast<double>(report.qgc_total) / n;
  if (report.n_samples > 1) {
    report.mean_qgc_warm =
        static_cast<double>(report.qgc_total - report.samples.front().qgc) / static_cast<double>(report.n_samples - 1);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

inline nlohmann::json report_to_json(const BenchmarkReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"sample_id", s.sample_id},
                       {"target", s.target},
                       {"success", s.success},
                       {"turns", s.turns},
                       {"qgc", s.qgc},
                       {"max_planning_calls", s.max_planning_calls},
                       {"target_tracked", s.target_tracked},
                       {"transcript", s.transcript}});
  }
  return {{"dataset_id", r.dataset_id},
          {"n_samples", r.n_samples},
          {"sr", r.sr},
          {"msc", r.msc ? nlohmann::json(*r.msc) : nlohmann::json(nullptr)},
          {"mean_qgc", r.mean_qgc},
          {"mean_qgc_warm", r.mean_qgc_warm ? nlohmann::json(*r.mean_qgc_warm) : nlohmann::json(nullptr)},
          {"qgc_total", r.qgc_total},
          {"seconds", r.seconds},
          {"samples", std::move(samples)}};
}

inline std::string report_table(const BenchmarkReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << std::left << std::setw(24) << "dataset" << std::right << std::setw(8) << "samples" << std::setw(9) << "SR"
     << std::setw(8) << "MSC" << std::setw(10) << "QGC" << std::setw(10) << "QGC-warm" << '\n';
  os << std::left << std::setw(24) << r.dataset_id << std::right << std::setw(8) << r.n_samples << std::setw(9)
     << r.sr << std::setw(8);
  if (r.msc) os << *r.msc; else os << "-";
  os << std::setw(10) << r.mean_qgc << std::setw(10);
  if (r.mean_qgc_warm) os << *r.mean_qgc_warm; else os << "-";
  os << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Prompt-count bounds

struct QgcBounds {
  std::uint64_t exhaustive_first = 0;       // ((2m)^(d_s+1) - 1) / (2m - 1)
  std::uint64_t exhaustive_subsequent = 0;  // (2m)^d_s
  std::uint64_t mcts_max_per_turn = 0;      // K * d_s

  bool operator==(const QgcBounds&) const = default;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw std::overflow_error("qgc bound overflows");
  return a * b;
}

}  // namespace detail

/// Generation-prompt counts of exhaustive depth-d_s expansion (first turn and
/// later turns) against the per-turn ceiling of K depth-limited rollouts.
inline QgcBounds qgc_bounds(std::uint64_t m, std::uint64_t d_s, std::uint64_t k) {
  if (m < 1 || d_s < 1 || k < 1) throw std::invalid_argument("qgc_bounds: m, d_s and K must be >= 1");
  const std::uint64_t branching = detail::checked_mul(2, m);
  // Geometric series 1 + b + ... + b^d_s, summed directly to stay exact.
  std::uint64_t power = 1;
  std::uint64_t series = 1;
  for (std::uint64_t i = 0; i < d_s; ++i) {
    power = detail::checked_mul(power, branching);
    if (series > std::numeric_limits<std::uint64_t>::max() - power) throw std::overflow_error("qgc bound overflows");
    series += power;
  }
  return {series, power, detail::checked_mul(k, d_s)};
}

}  // namespace inquire
