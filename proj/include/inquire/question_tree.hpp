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

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "inquire/core_types.hpp"

namespace inquire {

using ClusterId = int;

enum class Branch { kYes, kNo };

inline const char* branch_name(Branch b) { return b == Branch::kYes ? "yes" : "no"; }

/// One (question, answer) pair on the path from a root to a node.
struct ContextEntry {
  std::string question;
  Branch answer = Branch::kYes;

  bool operator==(const ContextEntry&) const = default;
};

struct QuestionNode;

/// A possibility set reached by a sequence of answers. Children are the
/// candidate questions generated for this set.
struct AnswerNode {
  PossibilitySet set;
  int depth = 0;
  std::vector<std::unique_ptr<QuestionNode>> children;
  QuestionNode* parent = nullptr;
  Branch branch = Branch::kYes;
  std::vector<ContextEntry> context;

  bool terminal() const noexcept { return set.size() <= 2; }
  bool expanded() const noexcept { return !children.empty(); }
};

/// A candidate question with its search statistics. The two answer children
/// always exist; they may themselves be unexpanded.
struct QuestionNode {
  Partition partition;
  double p_yes = 0.0;
  double r_ig = 0.0;
  double r_total = 0.0;
  long visits = 0;
  std::map<ClusterId, double> bonus;
  std::unique_ptr<AnswerNode> yes_child;
  std::unique_ptr<AnswerNode> no_child;
  AnswerNode* parent = nullptr;

  const std::string& question() const noexcept { return partition.question; }

  AnswerNode& child(Branch b) { return b == Branch::kYes ? *yes_child : *no_child; }
  const AnswerNode& child(Branch b) const { return b == Branch::kYes ? *yes_child : *no_child; }

  double bonus_for(ClusterId k) const {
    const auto it = bonus.find(k);
    return it == bonus.end() ? 0.0 : it->second;
  }

  /// Depth of the answer node at which this question is asked.
  int depth() const noexcept { return parent ? parent->depth : 0; }

  /// Both answer children are leaves of the current tree.
  bool is_leaf() const noexcept { return !yes_child->expanded() && !no_child->expanded(); }
};

inline std::unique_ptr<AnswerNode> make_root(PossibilitySet set) {
  auto root = std::make_unique<AnswerNode>();
  root->set = std::move(set);
  return root;
}

/// Attaches a question (already normalized against node.set) under node and
/// creates both answer children. r_ig is supplied by the caller so this file
/// stays independent of the reward definition.
inline QuestionNode& attach_question(AnswerNode& node, Partition partition, double r_ig) {
  auto q = std::make_unique<QuestionNode>();
  const auto total = partition.yes_set.size() + partition.no_set.size();
  q->p_yes = total == 0 ? 0.0
                        : static_cast<double>(partition.yes_set.size()) / static_cast<double>(total);
  q->r_ig = r_ig;
  q->parent = &node;
  for (const Branch b : {Branch::kYes, Branch::kNo}) {
    auto child = std::make_unique<AnswerNode>();
    child->set = b == Branch::kYes ? partition.yes_set : partition.no_set;
    child->depth = node.depth + 1;
    child->parent = q.get();
    child->branch = b;
    child->context = node.context;
    child->context.push_back({partition.question, b});
    (b == Branch::kYes ? q->yes_child : q->no_child) = std::move(child);
  }
  q->partition = std::move(partition);
  node.children.push_back(std::move(q));
  return *node.children.back();
}

/// First-layer roots of one dataset's tree.
class RootRegistry {
 public:
  explicit RootRegistry(std::string dataset_id = {}) : dataset_id_(std::move(dataset_id)) {}

  RootRegistry(RootRegistry&&) noexcept = default;
  RootRegistry& operator=(RootRegistry&&) noexcept = default;

  const std::string& dataset_id() const noexcept { return dataset_id_; }
  std::vector<std::unique_ptr<AnswerNode>>& roots() noexcept { return roots_; }
  const std::vector<std::unique_ptr<AnswerNode>>& roots() const noexcept { return roots_; }

  AnswerNode& add_root(PossibilitySet set) {
    roots_.push_back(make_root(std::move(set)));
    return *roots_.back();
  }

 private:
  std::string dataset_id_;
  std::vector<std::unique_ptr<AnswerNode>> roots_;
};

/// Returns the first root (registry order) whose set contains every member of
/// the candidate set, or appends a new root holding the candidate set.
inline AnswerNode& find_or_create_root(RootRegistry& registry, const PossibilitySet& candidate) {
  if (candidate.empty()) throw std::invalid_argument("find_or_create_root: empty candidate set");
  for (auto& root : registry.roots()) {
    if (root->set.is_superset_of(candidate)) return *root;
  }
  return registry.add_root(candidate);
}

/// Depth-first visit of every node below (and including) an answer node.
template <typename OnAnswer, typename OnQuestion>
void walk(const AnswerNode& node, OnAnswer&& on_answer, OnQuestion&& on_question) {
  on_answer(node);
  for (const auto& q : node.children) {
    on_question(*q);
    walk(*q->yes_child, on_answer, on_question);
    walk(*q->no_child, on_answer, on_question);
  }
}

/// Structural summary used by the service's stats endpoint.
struct TreeStats {
  std::size_t roots = 0;
  std::size_t answer_nodes = 0;
  std::size_t question_nodes = 0;
  std::size_t expanded_nodes = 0;
  std::map<int, std::size_t> depth_histogram;  // answer-node depth -> count
  std::map<ClusterId, std::size_t> bonus_entries;
  double bonus_total = 0.0;
  double bonus_max = 0.0;
};

inline TreeStats tree_stats(const RootRegistry& registry) {
  TreeStats s;
  s.roots = registry.roots().size();
  for (const auto& root : registry.roots()) {
    walk(
        *root,
        [&](const AnswerNode& a) {
          ++s.answer_nodes;
          if (a.expanded()) ++s.expanded_nodes;
          ++s.depth_histogram[a.depth];
        },
        [&](const QuestionNode& q) {
          ++s.question_nodes;
          for (const auto& [k, b] : q.bonus) {
            ++s.bonus_entries[k];
            s.bonus_total += b;
            if (b > s.bonus_max) s.bonus_max = b;
          }
        });
  }
  return s;
}

}  // namespace inquire
