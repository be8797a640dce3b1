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

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "inquire/config.hpp"
#include "inquire/generators.hpp"
#include "inquire/question_tree.hpp"
#include "inquire/rewards.hpp"

namespace inquire {

using Rng = std::mt19937_64;

/// Feedback-augmented UCT. Unvisited questions score +infinity so each
/// candidate is tried once before any statistics are compared. Unknown or
/// absent clusters contribute no bonus.
inline double uct_score(const QuestionNode& q, long parent_visits, std::optional<ClusterId> cluster,
                        double exploration) {
  if (q.visits == 0) return std::numeric_limits<double>::infinity();
  const auto n = static_cast<double>(q.visits);
  const double exploit = q.r_total / n;
  const double explore =
      exploration * std::sqrt(std::log(static_cast<double>(std::max(parent_visits, 1L))) / n);
  return exploit + explore + (cluster ? q.bonus_for(*cluster) : 0.0);
}

/// Generates candidate questions for an unexpanded, non-terminal answer node
/// and attaches them. Propagates GenerationFailed.
inline void expand(AnswerNode& node, QuestionGenerator& gen, const SearchConfig& cfg) {
  if (node.terminal() || node.expanded()) return;
  const GenerationRequest request{node.set, node.context, cfg.fanout};
  auto candidates = gen.generate_candidates(request);
  if (candidates.empty()) throw GenerationFailed("generator returned no candidates");
  for (auto& p : candidates) {
    const double p_yes = static_cast<double>(p.yes_set.size()) /
                         static_cast<double>(p.yes_set.size() + p.no_set.size());
    attach_question(node, std::move(p), information_gain(p_yes, cfg.reward));
  }
}

/// Adds the rollout value to every question on the path and bumps visits.
inline void backpropagate(double value, std::span<QuestionNode* const> path) {
  for (auto* q : path) {
    q->r_total += value;
    q->visits += 1;
  }
}

struct RolloutResult {
  double value = 0.0;
  int levels = 0;  // descent levels actually taken
  bool expanded = false;
};

/// Random depth-limited descent from a selected question. Each level picks
/// a uniformly random answer branch and then a uniformly random candidate
/// question there. Only the first level may expand an unexpanded answer node
/// (and only when `allow_expansion`); deeper unexpanded nodes end the
/// descent. Returns the expected reward of the last node reached.
inline RolloutResult simulate_rollout(QuestionNode& start, const SearchConfig& cfg, QuestionGenerator& gen,
                                      Rng& rng, bool allow_expansion = true) {
  RolloutResult result;
  QuestionNode* question = &start;
  const AnswerNode* last_answer = nullptr;
  std::bernoulli_distribution coin(0.5);

  for (int level = 0; level < cfg.sim_depth; ++level) {
    AnswerNode& answer = question->child(coin(rng) ? Branch::kYes : Branch::kNo);
    ++result.levels;
    last_answer = &answer;
    if (answer.terminal()) break;
    if (!answer.expanded()) {
      if (level > 0 || !allow_expansion) break;
      expand(answer, gen, cfg);
      result.expanded = true;
    }
    std::uniform_int_distribution<std::size_t> pick(0, answer.children.size() - 1);
    question = answer.children[pick(rng)].get();
    last_answer = nullptr;
  }
  result.value = last_answer ? expected_reward(*last_answer) : expected_reward(*question);
  return result;
}

/// Root child with the highest feedback UCT; first index wins ties. The
/// parent visit count of a root child is the visit total of its siblings.
inline QuestionNode& select_child(AnswerNode& root, std::optional<ClusterId> cluster, double exploration) {
  long parent_visits = 0;
  for (const auto& q : root.children) parent_visits += q->visits;
  QuestionNode* best = nullptr;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& q : root.children) {
    const double s = uct_score(*q, parent_visits, cluster, exploration);
    if (best == nullptr || s > best_score) {
      best = q.get();
      best_score = s;
    }
  }
  return *best;
}

/// Candidate question of root with the highest expected reward; first index
/// wins ties.
inline QuestionNode& best_question(AnswerNode& root) {
  if (root.children.empty()) throw std::logic_error("best_question on an unexpanded node");
  QuestionNode* best = nullptr;
  double best_value = 0.0;
  for (const auto& q : root.children) {
    const double v = expected_reward(*q);
    if (best == nullptr || v > best_value) {
      best = q.get();
      best_value = v;
    }
  }
  return *best;
}

struct PlanStats {
  int iterations = 0;
  int expansions = 0;
};

/// Runs K select/expand/simulate/backpropagate iterations with `root` as the
/// search root and returns the candidate question to ask. Each iteration
/// issues at most one generation request, so a planning turn costs at most K.
inline QuestionNode& plan_question(AnswerNode& root, std::optional<ClusterId> cluster, const SearchConfig& cfg,
                                   QuestionGenerator& gen, Rng& rng, PlanStats* stats = nullptr) {
  if (root.terminal()) throw std::invalid_argument("plan_question on a terminal node");
  PlanStats local;
  for (int k = 0; k < cfg.iterations; ++k) {
    bool budget = true;
    if (!root.expanded()) {
      expand(root, gen, cfg);
      ++local.expansions;
      budget = false;
    }
    QuestionNode& selected = select_child(root, cluster, cfg.exploration);
    const auto rollout = simulate_rollout(selected, cfg, gen, rng, budget);
    if (rollout.expanded) ++local.expansions;
    QuestionNode* path[] = {&selected};
    backpropagate(rollout.value, path);
    ++local.iterations;
  }
  if (stats) *stats = local;
  return best_question(root);
}

}  // namespace inquire
