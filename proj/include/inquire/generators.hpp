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
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "inquire/core_types.hpp"
#include "inquire/llm_gateway.hpp"
#include "inquire/question_tree.hpp"

namespace inquire {

/// Input to a question generator: the set to split, the answers that led to
/// it, and how many candidates to propose.
struct GenerationRequest {
  const PossibilitySet& set;
  const std::vector<ContextEntry>& context;
  int fanout = 3;
};

/// Produces up to `fanout` normalized, distinct-text partitions of a set.
/// Implementations throw GenerationFailed when nothing usable comes back.
class QuestionGenerator {
 public:
  virtual ~QuestionGenerator() = default;
  virtual std::vector<Partition> generate_candidates(const GenerationRequest& request) = 0;
};

namespace detail {

/// Normalizes, drops rejected and duplicate-question candidates, and caps the
/// result at the fanout.
inline std::vector<Partition> keep_valid(std::vector<Partition> raw, const PossibilitySet& parent,
                                         int fanout) {
  std::vector<Partition> out;
  std::vector<std::string> seen;
  for (auto& p : raw) {
    if (static_cast<int>(out.size()) >= fanout) break;
    Partition normalized;
    try {
      normalized = normalize_partition(p, parent);
    } catch (const RejectedPartition&) {
      continue;
    }
    auto key = text::fold(normalized.question);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(std::move(key));
    out.push_back(std::move(normalized));
  }
  return out;
}

inline void check_request(const GenerationRequest& request) {
  if (request.set.size() <= 2) throw std::invalid_argument("generation requested for a terminal set");
  if (request.fanout < 1) throw std::invalid_argument("generation fanout must be >= 1");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Attribute oracle

/// Deterministic generator over outcome signatures: one candidate question
/// per attribute, ranked by |count_yes - count_no| and then attribute index.
/// It stands in for the model wherever a test needs exact, repeatable splits.
class OracleGenerator : public QuestionGenerator {
 public:
  /// `questions[i]` is the text for attribute i; missing entries get a
  /// generic wording.
  OracleGenerator(const Catalog& catalog, std::vector<std::string> questions = {},
                  CallCounters* counters = nullptr)
      : catalog_(&catalog), questions_(std::move(questions)), counters_(counters) {}

  std::vector<Partition> generate_candidates(const GenerationRequest& request) override {
    detail::check_request(request);
    if (counters_) record_generation_call(*counters_);
    const auto n_attributes = catalog_->signature_length();
    for (const auto& id : request.set) {
      if (catalog_->at(id).signature.size() != n_attributes) {
        throw GenerationFailed("outcome '" + catalog_->label_of(id) + "' has no attribute signature");
      }
    }

    struct Ranked {
      std::size_t imbalance;
      std::size_t attribute;
      Partition partition;
    };
    std::vector<Ranked> ranked;
    for (std::size_t a = 0; a < n_attributes; ++a) {
      Partition p;
      p.question = question_text(a);
      for (const auto& id : request.set) {
        (catalog_->at(id).signature[a] ? p.yes_set : p.no_set).insert(id);
      }
      if (p.yes_set.empty() || p.no_set.empty()) continue;
      const auto y = p.yes_set.size();
      const auto n = p.no_set.size();
      ranked.push_back({y > n ? y - n : n - y, a, std::move(p)});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& l, const Ranked& r) {
      return l.imbalance != r.imbalance ? l.imbalance < r.imbalance : l.attribute < r.attribute;
    });

    std::vector<Partition> raw;
    for (auto& r : ranked) raw.push_back(std::move(r.partition));
    auto out = detail::keep_valid(std::move(raw), request.set, request.fanout);
    if (out.empty()) throw GenerationFailed("no attribute separates the current set");
    return out;
  }

  std::string question_text(std::size_t attribute) const {
    if (attribute < questions_.size() && !questions_[attribute].empty()) return questions_[attribute];
    return "Does X have attribute " + std::to_string(attribute) + "?";
  }

 private:
  const Catalog* catalog_;
  std::vector<std::string> questions_;
  CallCounters* counters_;
};

// ---------------------------------------------------------------------------
// Response parsing

/// A generated question before its item names are resolved to outcome ids.
struct RawPartition {
  std::string question;
  std::vector<std::string> yes_items;
  std::vector<std::string> no_items;
};

namespace detail {

/// Strips list decoration around one item name: quotes, brackets, bullets,
/// trailing periods.
inline std::string clean_item(std::string_view item) {
  item = text::trim(item);
  const auto strip = [](char c) {
    return c == '"' || c == '\'' || c == '`' || c == '[' || c == ']' || c == '*' || c == '.' ||
           c == '-' || c == '(' || c == ')';
  };
  while (!item.empty() && strip(item.front())) item.remove_prefix(1);
  while (!item.empty() && strip(item.back())) item.remove_suffix(1);
  return std::string(text::trim(item));
}

inline std::vector<std::string> split_items(std::string_view list) {
  std::vector<std::string> out;
  for (const auto& piece : text::split(list, ',')) {
    auto item = clean_item(piece);
    const auto key = text::fold(item);
    if (item.empty() || key == "none" || key == "n/a" || key == "...") continue;
    out.push_back(std::move(item));
  }
  return out;
}

/// Removes markdown emphasis and leading bullets from a response line.
inline std::string plain_line(std::string_view line) {
  std::string out;
  for (char c : line) {
    if (c != '*' && c != '#') out.push_back(c);
  }
  auto t = text::trim(out);
  while (!t.empty() && (t.front() == '-' || t.front() == '>')) t = text::trim(t.substr(1));
  return std::string(t);
}

/// If `line` is "<label>: rest" (case-insensitive label), returns rest.
inline std::optional<std::string> after_label(std::string_view line, std::string_view label) {
  if (!text::starts_with_ci(line, label)) return std::nullopt;
  auto rest = text::trim(line.substr(label.size()));
  if (rest.empty() || rest.front() != ':') return std::nullopt;
  rest.remove_prefix(1);
  return std::string(text::trim(rest));
}

/// Matches "Question <n>: text" and returns text.
inline std::optional<std::string> question_header(std::string_view line) {
  if (!text::starts_with_ci(line, "question")) return std::nullopt;
  auto rest = text::trim(line.substr(8));
  std::size_t digits = 0;
  while (digits < rest.size() && std::isdigit(static_cast<unsigned char>(rest[digits]))) ++digits;
  if (digits == 0) return std::nullopt;
  rest = text::trim(rest.substr(digits));
  if (rest.empty() || (rest.front() != ':' && rest.front() != '.')) return std::nullopt;
  rest.remove_prefix(1);
  return std::string(text::trim(rest));
}

}  // namespace detail

/// Extracts every well-formed "Question i:" block with its YES and NO
/// lists. Count lines are ignored. Blocks missing the question text or
/// either list are skipped. Throws ParseFailed when nothing is extracted.
inline std::vector<RawPartition> parse_generation_response(std::string_view response) {
  std::vector<RawPartition> out;
  std::optional<RawPartition> current;
  bool has_yes = false;
  bool has_no = false;

  const auto flush = [&] {
    if (current && !current->question.empty() && has_yes && has_no) out.push_back(std::move(*current));
    current.reset();
    has_yes = has_no = false;
  };

  for (const auto& raw_line : text::split(response, '\n')) {
    const auto line = detail::plain_line(raw_line);
    if (line.empty()) continue;
    if (auto q = detail::question_header(line)) {
      flush();
      current = RawPartition{std::move(*q), {}, {}};
      continue;
    }
    if (!current) continue;
    if (auto yes = detail::after_label(line, "YES")) {
      if (has_yes) {  // a second YES line means the block is garbled
        current->question.clear();
        continue;
      }
      current->yes_items = detail::split_items(*yes);
      has_yes = true;
    } else if (auto no = detail::after_label(line, "NO")) {
      if (has_no) {
        current->question.clear();
        continue;
      }
      current->no_items = detail::split_items(*no);
      has_no = true;
    }
  }
  flush();
  if (out.empty()) throw ParseFailed("no question blocks found in generation response");
  return out;
}

/// Resolves item names against the outcome catalog (folded exact match);
/// unknown names are dropped here and repaired by normalization later.
inline Partition resolve_partition(const RawPartition& raw, const Catalog& catalog) {
  Partition p;
  p.question = raw.question;
  for (const auto& name : raw.yes_items) {
    if (const auto* o = catalog.find_by_label(name)) p.yes_set.insert(o->id);
  }
  for (const auto& name : raw.no_items) {
    if (const auto* o = catalog.find_by_label(name)) p.no_set.insert(o->id);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Model-backed generator

inline std::string render_ancestral_context(const TemplateRegistry& templates, std::string_view domain,
                                            const std::vector<ContextEntry>& context) {
  if (context.empty()) return {};
  std::vector<std::string> pairs;
  for (const auto& c : context) {
    pairs.push_back(c.question + " " + (c.answer == Branch::kYes ? "Yes" : "No"));
  }
  return templates.render(domain, "ancestral_context", {{"qa_pairs", text::join(pairs, "; ")}});
}

/// One generation prompt per expansion; the response carries all m
/// candidate questions.
class LlmGenerator : public QuestionGenerator {
 public:
  LlmGenerator(LlmGateway& gateway, const TemplateRegistry& templates, std::string domain,
               const Catalog& catalog)
      : gateway_(&gateway), templates_(&templates), domain_(std::move(domain)), catalog_(&catalog) {}

  std::string render_request(const GenerationRequest& request) const {
    const auto m = std::to_string(request.fanout);
    return templates_->render(
        domain_, "generation_prompt",
        {{"item_set", text::join(catalog_->labels_of(request.set), ", ")},
         {"ancestral_context", render_ancestral_context(*templates_, domain_, request.context)},
         {"m", m},
         {"n", m}});
  }

  std::vector<Partition> generate_candidates(const GenerationRequest& request) override {
    detail::check_request(request);
    const auto response = gateway_->generate(single_prompt(render_request(request)));
    std::vector<RawPartition> parsed;
    try {
      parsed = parse_generation_response(response);
    } catch (const ParseFailed& e) {
      throw GenerationFailed(e.what());
    }
    std::vector<Partition> resolved;
    for (const auto& raw : parsed) resolved.push_back(resolve_partition(raw, *catalog_));
    auto out = detail::keep_valid(std::move(resolved), request.set, request.fanout);
    if (out.empty()) throw GenerationFailed("every generated question was degenerate after repair");
    return out;
  }

 private:
  LlmGateway* gateway_;
  const TemplateRegistry* templates_;
  std::string domain_;
  const Catalog* catalog_;
};

// ---------------------------------------------------------------------------
// Constrained and open possibility sets

/// Keeps the outcomes the model classifies as plausible for the problem
/// description. Falls back to the full set when nothing valid survives.
inline PossibilitySet constrain_possibilities(std::string_view problem_description,
                                              const PossibilitySet& full_set, const Catalog& catalog,
                                              LlmGateway& gateway, const TemplateRegistry& templates,
                                              std::string_view domain) {
  if (full_set.empty()) throw std::invalid_argument("constrain_possibilities: empty set");
  const auto prompt = templates.render(domain, "classify_prompt",
                                       {{"item_set", text::join(catalog.labels_of(full_set), ", ")},
                                        {"problem_description", std::string(problem_description)}});
  const auto response = gateway.other(single_prompt(prompt));

  PossibilitySet yes;
  for (const auto& raw_line : text::split(response, '\n')) {
    const auto line = detail::plain_line(raw_line);
    if (auto items = detail::after_label(line, "YES")) {
      for (const auto& name : detail::split_items(*items)) {
        if (const auto* o = catalog.find_by_label(name); o && full_set.contains(o->id)) yes.insert(o->id);
      }
    }
  }
  if (yes.empty()) return full_set;
  // Keep the full set's order.
  PossibilitySet ordered;
  for (const auto& id : full_set) {
    if (yes.contains(id)) ordered.insert(id);
  }
  return ordered;
}

/// Parses a `["a", "b", ...]` style list, tolerating surrounding prose.
inline std::vector<std::string> parse_label_list(std::string_view response) {
  const auto open = response.find('[');
  const auto close = response.rfind(']');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    const auto body = response.substr(open, close - open + 1);
    try {
      const auto j = nlohmann::json::parse(body);
      std::vector<std::string> out;
      for (const auto& item : j) {
        if (item.is_string()) {
          auto s = detail::clean_item(item.get<std::string>());
          if (!s.empty()) out.push_back(std::move(s));
        }
      }
      return out;
    } catch (const nlohmann::json::exception&) {
      return detail::split_items(body);
    }
  }
  std::string flat(response);
  std::replace(flat.begin(), flat.end(), '\n', ',');
  return detail::split_items(flat);
}

/// Proposes (empty history and no existing items) or renews an open
/// possibility set of exactly `size` labels that contains every existing
/// label. New labels are registered in the catalog with id = label.
inline PossibilitySet open_set_update(const std::vector<std::pair<std::string, std::string>>& history,
                                      const std::vector<std::string>& existing, int size,
                                      std::string_view problem_description, Catalog& catalog,
                                      LlmGateway& gateway, const TemplateRegistry& templates,
                                      std::string_view domain) {
  if (size < 1) throw std::invalid_argument("open_set_update: size must be >= 1");
  if (static_cast<int>(existing.size()) > size) {
    throw std::invalid_argument("open_set_update: more existing items than the requested size");
  }
  const auto size_text = std::to_string(size);
  ChatRequest request;
  if (history.empty() && existing.empty()) {
    request = single_prompt(templates.render(
        domain, "open_initial",
        {{"problem_description", std::string(problem_description)}, {"size", size_text}}));
  } else {
    std::vector<std::string> quoted;
    for (const auto& e : existing) quoted.push_back("\"" + e + "\"");
    for (const auto& [question, answer] : history) {
      request.messages.push_back({Role::kAssistant, question});
      request.messages.push_back({Role::kUser, answer});
    }
    request.messages.push_back(
        {Role::kUser, templates.render(domain, "open_renewal",
                                       {{"size", size_text}, {"existing_items", text::join(quoted, ", ")}})});
  }
  const auto proposals = parse_label_list(gateway.other(request));

  std::vector<std::string> labels;
  const auto has = [&](std::string_view label) {
    return std::any_of(labels.begin(), labels.end(),
                       [&](const std::string& l) { return text::fold(l) == text::fold(label); });
  };
  for (const auto& p : proposals) {
    if (!has(p)) labels.push_back(p);
  }
  for (const auto& e : existing) {
    if (!has(e)) labels.push_back(e);
  }
  // Truncate from the end, never dropping an existing label.
  const auto is_existing = [&](const std::string& l) {
    return std::any_of(existing.begin(), existing.end(),
                       [&](const std::string& e) { return text::fold(e) == text::fold(l); });
  };
  for (auto i = labels.size(); labels.size() > static_cast<std::size_t>(size) && i-- > 0;) {
    if (!is_existing(labels[i])) labels.erase(labels.begin() + static_cast<std::ptrdiff_t>(i));
  }
  if (labels.size() != static_cast<std::size_t>(size)) {
    throw ProviderError("open-set proposal yielded " + std::to_string(labels.size()) + " labels, expected " +
                        size_text);
  }

  PossibilitySet out;
  for (const auto& l : labels) {
    const auto* o = catalog.find_by_label(l);
    out.insert(o ? o->id : catalog.add(Outcome{l, l, {}}).id);
  }
  return out;
}

}  // namespace inquire
