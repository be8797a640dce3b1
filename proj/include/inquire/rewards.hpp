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
#include <string>

#include "inquire/errors.hpp"
#include "inquire/question_tree.hpp"

namespace inquire {

struct RewardConfig {
  double lambda = 0.4;
};

/// Sharpened binary-entropy reward of a split with YES probability p_yes.
/// Base-2 logarithm, 0 log 0 = 0, so a balanced split scores exactly 1.
inline double information_gain(double p_yes, const RewardConfig& cfg = {}) {
  if (!(p_yes >= 0.0 && p_yes <= 1.0)) {
    throw DomainError("information_gain: p_yes outside [0, 1]: " + std::to_string(p_yes));
  }
  if (!(cfg.lambda > 0.0)) throw DomainError("information_gain: lambda must be positive");
  const auto plogp = [](double p) { return p > 0.0 ? p * std::log2(p) : 0.0; };
  const double p_no = 1.0 - p_yes;
  const double entropy = -plogp(p_yes) - plogp(p_no);
  return entropy / (1.0 + std::abs(p_yes - p_no) / cfg.lambda);
}

/// Sum of r_ig over the questions from the tree root down to q inclusive.
inline double accumulated_reward(const QuestionNode& q) {
  double total = 0.0;
  for (const QuestionNode* cur = &q; cur != nullptr;) {
    total += cur->r_ig;
    cur = cur->parent ? cur->parent->parent : nullptr;
  }
  return total;
}

namespace detail {

inline double expected_reward_below(const AnswerNode& a, double parent_accumulated);

inline double expected_reward_at(const QuestionNode& q, double accumulated) {
  if (q.is_leaf()) return accumulated;
  return q.p_yes * expected_reward_below(*q.yes_child, accumulated) +
         (1.0 - q.p_yes) * expected_reward_below(*q.no_child, accumulated);
}

inline double expected_reward_below(const AnswerNode& a, double parent_accumulated) {
  if (!a.expanded()) return parent_accumulated;
  double sum = 0.0;
  for (const auto& child : a.children) {
    sum += expected_reward_at(*child, parent_accumulated + child->r_ig);
  }
  return sum / static_cast<double>(a.children.size());
}

}  // namespace detail

/// Expected reward of asking q: its accumulated reward if both answers are
/// unexplored, otherwise the p_yes-weighted mix of its answer children.
inline double expected_reward(const QuestionNode& q) {
  return detail::expected_reward_at(q, accumulated_reward(q));
}

/// Expected reward at an answer node: the mean over its candidate questions,
/// or the parent question's accumulated reward when nothing was generated yet
/// (0 for an unexpanded root).
inline double expected_reward(const AnswerNode& a) {
  const double base = a.parent ? accumulated_reward(*a.parent) : 0.0;
  return detail::expected_reward_below(a, base);
}

}  // namespace inquire
