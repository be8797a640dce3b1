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

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "inquire/core_types.hpp"
#include "inquire/errors.hpp"

namespace inquire {

/// One conversation to run: the user's description and the hidden target.
struct Sample {
  std::string id;
  std::string problem_description;
  std::string target;  // outcome label
};

/// A benchmark dataset. Document layout:
///
///   {"dataset_id": "...", "domain": "twenty_questions|medical|troubleshooting",
///    "attributes": ["Is X ...?", ...],              // optional, oracle only
///    "outcomes": [{"id": "...", "label": "...", "signature": [0, 1, ...]}],
///    "samples": [{"id": "...", "problem_description": "...", "target": "..."}]}
struct Dataset {
  std::string id;
  std::string domain = "twenty_questions";
  std::vector<std::string> attribute_questions;
  Catalog catalog;
  std::vector<Sample> samples;

  /// Outcome id of a sample's target, if the target is in the catalog.
  std::optional<OutcomeId> target_id(const Sample& s) const {
    if (const auto* o = catalog.find_by_label(s.target)) return o->id;
    return std::nullopt;
  }
};

inline Dataset dataset_from_json(const nlohmann::json& j, std::string fallback_id = {}) {
  try {
    Dataset d;
    d.id = j.value("dataset_id", fallback_id);
    if (d.id.empty()) throw DatasetError("dataset has no dataset_id");
    d.domain = j.value("domain", std::string("twenty_questions"));
    if (j.contains("attributes")) d.attribute_questions = j.at("attributes").get<std::vector<std::string>>();
    for (const auto& o : j.value("outcomes", nlohmann::json::array())) {
      Outcome outcome;
      outcome.label = o.at("label").get<std::string>();
      outcome.id = o.value("id", outcome.label);
      if (o.contains("signature")) {
        for (const auto& bit : o.at("signature")) {
          outcome.signature.push_back(bit.is_boolean() ? bit.get<bool>() : bit.get<int>() != 0);
        }
      }
      d.catalog.add(std::move(outcome));
    }
    for (const auto& s : j.value("samples", nlohmann::json::array())) {
      Sample sample;
      sample.id = s.at("id").is_string() ? s.at("id").get<std::string>() : s.at("id").dump();
      sample.problem_description = s.value("problem_description", std::string());
      sample.target = s.at("target").get<std::string>();
      if (text::trim(sample.target).empty()) throw DatasetError("sample " + sample.id + " has an empty target");
      if (d.catalog.size() > 0 && !d.catalog.find_by_label(sample.target)) {
        throw DatasetError("sample " + sample.id + " targets unknown outcome '" + sample.target + "'");
      }
      d.samples.push_back(std::move(sample));
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("malformed dataset: ") + e.what());
  }
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read dataset: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("dataset is not valid JSON: " + std::string(e.what()));
  }
  return dataset_from_json(j, path.stem().string());
}

/// 2^bits outcomes whose signatures are the binary expansions of their
/// index, one sample per outcome. Used by tests and the demo.
inline Dataset synthetic_binary_dataset(int bits, std::string id = "synthetic") {
  Dataset d;
  d.id = std::move(id);
  for (int a = 0; a < bits; ++a) d.attribute_questions.push_back("Is bit " + std::to_string(a) + " of X set?");
  const int n = 1 << bits;
  for (int i = 0; i < n; ++i) {
    Outcome o;
    o.id = "o" + std::to_string(i);
    o.label = "item " + std::to_string(i);
    for (int a = 0; a < bits; ++a) o.signature.push_back(((i >> a) & 1) != 0);
    d.catalog.add(o);
    d.samples.push_back(Sample{"s" + std::to_string(i), "", o.label});
  }
  return d;
}

}  // namespace inquire
