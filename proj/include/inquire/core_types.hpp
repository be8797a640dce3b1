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
#include <deque>
#include <stdexcept>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "inquire/errors.hpp"
#include "inquire/text.hpp"

namespace inquire {

using OutcomeId = std::string;

/// One candidate target: a disease, a fault, a 20-questions item.
struct Outcome {
  OutcomeId id;
  std::string label;
  /// Boolean attributes, only present for datasets driven by the attribute
  /// oracle.
  std::vector<bool> signature;

  bool operator==(const Outcome&) const = default;
};

/// Insertion-ordered set of outcome ids. Iteration order is deterministic,
/// which every downstream tie-break relies on.
class PossibilitySet {
 public:
  PossibilitySet() = default;
  PossibilitySet(std::initializer_list<OutcomeId> ids) {
    for (const auto& id : ids) insert(id);
  }
  explicit PossibilitySet(const std::vector<OutcomeId>& ids) {
    for (const auto& id : ids) insert(id);
  }

  /// Returns false when the id is already present.
  bool insert(const OutcomeId& id) {
    if (!index_.insert(id).second) return false;
    members_.push_back(id);
    return true;
  }

  bool contains(const OutcomeId& id) const { return index_.count(id) != 0; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  const std::vector<OutcomeId>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }
  const OutcomeId& operator[](std::size_t i) const { return members_[i]; }

  bool is_superset_of(const PossibilitySet& other) const {
    for (const auto& id : other) {
      if (!contains(id)) return false;
    }
    return true;
  }

  bool intersects(const PossibilitySet& other) const {
    const auto& small = size() <= other.size() ? *this : other;
    const auto& large = size() <= other.size() ? other : *this;
    for (const auto& id : small) {
      if (large.contains(id)) return true;
    }
    return false;
  }

  /// Order-sensitive equality.
  bool operator==(const PossibilitySet& other) const { return members_ == other.members_; }

  /// Order-insensitive equality.
  bool same_members(const PossibilitySet& other) const {
    return size() == other.size() && is_superset_of(other);
  }

 private:
  std::vector<OutcomeId> members_;
  std::unordered_set<OutcomeId> index_;
};

/// A candidate question together with the YES/NO split it induces.
struct Partition {
  std::string question;
  PossibilitySet yes_set;
  PossibilitySet no_set;

  bool operator==(const Partition&) const = default;
};

/// Repairs generator output against the parent set: foreign ids are dropped,
/// ids listed on both sides stay on the YES side, and unmentioned ids go to
/// the NO side. Both output sets follow the parent's order.
///
/// Throws RejectedPartition for an empty question or for a split that leaves
/// one side empty while the parent has more than one member.
inline Partition normalize_partition(const Partition& raw, const PossibilitySet& parent) {
  if (parent.empty()) throw std::invalid_argument("normalize_partition: empty parent set");
  const auto question = std::string(text::trim(raw.question));
  if (question.empty()) throw RejectedPartition("partition has an empty question");

  Partition out;
  out.question = question;
  for (const auto& id : parent) {
    if (raw.yes_set.contains(id)) {
      out.yes_set.insert(id);
    } else {
      out.no_set.insert(id);
    }
  }
  if (parent.size() > 1 && (out.yes_set.empty() || out.no_set.empty())) {
    throw RejectedPartition("partition does not split the set: \"" + question + "\"");
  }
  return out;
}

/// The outcomes of one dataset, addressable by id and by folded label.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Outcome> outcomes) {
    for (auto& o : outcomes) add(std::move(o));
  }

  /// Adds an outcome; id defaults to the label. Throws DatasetError on a
  /// duplicate id or label, an empty label, or a signature length mismatch.
  const Outcome& add(Outcome outcome) {
    if (text::trim(outcome.label).empty()) throw DatasetError("outcome with empty label");
    if (outcome.id.empty()) outcome.id = outcome.label;
    if (by_id_.count(outcome.id)) throw DatasetError("duplicate outcome id: " + outcome.id);
    const auto key = text::fold(outcome.label);
    if (by_label_.count(key)) throw DatasetError("duplicate outcome label: " + outcome.label);
    if (!outcome.signature.empty()) {
      if (signature_length_ == 0) {
        signature_length_ = outcome.signature.size();
      } else if (outcome.signature.size() != signature_length_) {
        throw DatasetError("outcome signature length mismatch for " + outcome.id);
      }
    }
    by_id_.emplace(outcome.id, outcomes_.size());
    by_label_.emplace(key, outcomes_.size());
    outcomes_.push_back(std::move(outcome));
    return outcomes_.back();
  }

  const Outcome* find(const OutcomeId& id) const {
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &outcomes_[it->second];
  }

  const Outcome* find_by_label(std::string_view label) const {
    const auto it = by_label_.find(text::fold(label));
    return it == by_label_.end() ? nullptr : &outcomes_[it->second];
  }

  const Outcome& at(const OutcomeId& id) const {
    const auto* o = find(id);
    if (!o) throw DatasetError("unknown outcome id: " + id);
    return *o;
  }

  const std::string& label_of(const OutcomeId& id) const { return at(id).label; }

  std::vector<std::string> labels_of(const PossibilitySet& set) const {
    std::vector<std::string> out;
    out.reserve(set.size());
    for (const auto& id : set) out.push_back(label_of(id));
    return out;
  }

  PossibilitySet all() const {
    PossibilitySet s;
    for (const auto& o : outcomes_) s.insert(o.id);
    return s;
  }

  /// Length shared by every non-empty signature. Outcomes added without
  /// attributes (e.g. open-set proposals) carry an empty signature.
  std::size_t signature_length() const noexcept { return signature_length_; }

  const std::deque<Outcome>& outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return outcomes_.size(); }

 private:
  std::deque<Outcome> outcomes_;  // stable references across add()
  std::unordered_map<OutcomeId, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_label_;
  std::size_t signature_length_ = 0;
};

}  // namespace inquire
