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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "inquire/errors.hpp"
#include "inquire/question_tree.hpp"

namespace inquire {

inline constexpr int kTreeSnapshotVersion = 1;

namespace detail {

using nlohmann::json;

inline json set_to_json(const PossibilitySet& s) { return json(s.members()); }

inline json answer_to_json(const AnswerNode& a);

inline json question_to_json(const QuestionNode& q) {
  json bonus = json::object();
  for (const auto& [k, b] : q.bonus) bonus[std::to_string(k)] = b;
  return {
      {"question", q.partition.question},
      {"yes_set", set_to_json(q.partition.yes_set)},
      {"no_set", set_to_json(q.partition.no_set)},
      {"p_yes", q.p_yes},
      {"r_ig", q.r_ig},
      {"r_total", q.r_total},
      {"visits", q.visits},
      {"bonus", std::move(bonus)},
      {"yes_child", answer_to_json(*q.yes_child)},
      {"no_child", answer_to_json(*q.no_child)},
  };
}

inline json answer_to_json(const AnswerNode& a) {
  json context = json::array();
  for (const auto& c : a.context) {
    context.push_back({{"question", c.question}, {"answer", branch_name(c.answer)}});
  }
  json children = json::array();
  for (const auto& q : a.children) children.push_back(question_to_json(*q));
  return {
      {"set", set_to_json(a.set)},
      {"depth", a.depth},
      {"context", std::move(context)},
      {"children", std::move(children)},
  };
}

[[noreturn]] inline void corrupt(const std::string& what) {
  throw CorruptSnapshot("corrupt tree snapshot: " + what);
}

inline PossibilitySet set_from_json(const json& j, const char* field) {
  if (!j.is_array()) corrupt(std::string(field) + " is not an array");
  PossibilitySet s;
  for (const auto& id : j) {
    if (!id.is_string()) corrupt(std::string(field) + " holds a non-string id");
    if (!s.insert(id.get<std::string>())) corrupt(std::string(field) + " holds a duplicate id");
  }
  return s;
}

inline const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) corrupt(std::string("missing field '") + name + "'");
  return j.at(name);
}

inline void answer_from_json(const json& j, AnswerNode& node);

inline void question_from_json(const json& j, AnswerNode& parent) {
  Partition p;
  p.question = field(j, "question").get<std::string>();
  p.yes_set = set_from_json(field(j, "yes_set"), "yes_set");
  p.no_set = set_from_json(field(j, "no_set"), "no_set");
  if (p.question.empty()) corrupt("empty question text");
  if (p.yes_set.intersects(p.no_set)) corrupt("question '" + p.question + "' has overlapping children");
  if (p.yes_set.size() + p.no_set.size() != parent.set.size() ||
      !parent.set.is_superset_of(p.yes_set) || !parent.set.is_superset_of(p.no_set)) {
    corrupt("question '" + p.question + "' does not partition its parent set");
  }

  const double r_ig = field(j, "r_ig").get<double>();
  auto& q = attach_question(parent, std::move(p), r_ig);
  if (field(j, "p_yes").get<double>() != q.p_yes) corrupt("p_yes disagrees with the partition sizes");
  q.r_total = field(j, "r_total").get<double>();
  q.visits = field(j, "visits").get<long>();
  if (q.visits < 0) corrupt("negative visit count");
  if (q.visits == 0 && q.r_total != 0.0) corrupt("nonzero r_total on an unvisited question");
  for (const auto& [key, value] : field(j, "bonus").items()) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(key, &used);
    } catch (const std::exception&) {
      corrupt("non-numeric bonus key '" + key + "'");
    }
    if (used != key.size()) corrupt("non-numeric bonus key '" + key + "'");
    const double b = value.get<double>();
    if (!(b >= 0.0)) corrupt("negative bonus");
    q.bonus[k] = b;
  }

  answer_from_json(field(j, "yes_child"), *q.yes_child);
  answer_from_json(field(j, "no_child"), *q.no_child);
}

inline void answer_from_json(const json& j, AnswerNode& node) {
  // attach_question already populated set/depth/context for non-roots; the
  // stored copies must agree with the derived ones.
  const auto set = set_from_json(field(j, "set"), "set");
  if (!(set == node.set)) corrupt("answer node set disagrees with its parent partition");
  if (field(j, "depth").get<int>() != node.depth) corrupt("answer node depth mismatch");
  const auto& ctx = field(j, "context");
  if (!ctx.is_array() || ctx.size() != node.context.size()) corrupt("ancestral context length mismatch");
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto answer = field(ctx[i], "answer").get<std::string>();
    if (field(ctx[i], "question").get<std::string>() != node.context[i].question ||
        answer != branch_name(node.context[i].answer)) {
      corrupt("ancestral context disagrees with the path");
    }
  }
  const auto& children = field(j, "children");
  if (!children.is_array()) corrupt("children is not an array");
  if (!children.empty() && node.terminal()) corrupt("terminal answer node has children");
  for (const auto& c : children) question_from_json(c, node);
}

}  // namespace detail

inline nlohmann::json tree_to_json(const RootRegistry& registry) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& r : registry.roots()) roots.push_back(detail::answer_to_json(*r));
  return {{"version", kTreeSnapshotVersion},
          {"dataset_id", registry.dataset_id()},
          {"roots", std::move(roots)}};
}

inline RootRegistry tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("version")) detail::corrupt("missing version");
  if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kTreeSnapshotVersion) {
    throw VersionMismatch("unsupported tree snapshot version: " + j.at("version").dump());
  }
  try {
    RootRegistry registry(detail::field(j, "dataset_id").get<std::string>());
    const auto& roots = detail::field(j, "roots");
    if (!roots.is_array()) detail::corrupt("roots is not an array");
    for (const auto& r : roots) {
      auto& root = registry.add_root(detail::set_from_json(detail::field(r, "set"), "set"));
      if (root.set.empty()) detail::corrupt("empty root set");
      detail::answer_from_json(r, root);
    }
    return registry;
  } catch (const nlohmann::json::exception& e) {
    detail::corrupt(e.what());
  }
}

inline void snapshot_save(const RootRegistry& registry, const std::filesystem::path& path) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write snapshot: " + tmp);
    out << tree_to_json(registry).dump(1) << '\n';
    if (!out) throw Error("failed writing snapshot: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline RootRegistry snapshot_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read snapshot: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptSnapshot(std::string("tree snapshot is not valid JSON: ") + e.what());
  }
  return tree_from_json(j);
}

}  // namespace inquire
