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

#include <random>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace inquire;
using inquire::testing::ids;

TEST(PossibilitySet, KeepsInsertionOrderAndRejectsDuplicates) {
  PossibilitySet s;
  EXPECT_TRUE(s.insert("c"));
  EXPECT_TRUE(s.insert("a"));
  EXPECT_FALSE(s.insert("c"));
  EXPECT_EQ(s.members(), (std::vector<OutcomeId>{"c", "a"}));
  EXPECT_TRUE(s.contains("a"));
  EXPECT_FALSE(s.contains("b"));
}

TEST(PossibilitySet, SupersetAndMembership) {
  const auto big = ids({"a", "b", "c"});
  EXPECT_TRUE(big.is_superset_of(ids({"c", "a"})));
  EXPECT_FALSE(big.is_superset_of(ids({"c", "d"})));
  EXPECT_TRUE(big.intersects(ids({"z", "b"})));
  EXPECT_FALSE(big.intersects(ids({"z"})));
  EXPECT_TRUE(ids({"a", "b"}).same_members(ids({"b", "a"})));
  EXPECT_FALSE(ids({"a", "b"}) == ids({"b", "a"}));
}

TEST(NormalizePartition, BalancedSplitIsUnchanged) {
  const auto parent = ids({"flu", "pneumonia", "enteritis", "asthma"});
  const Partition raw{"Do you have difficulty breathing?", ids({"pneumonia", "asthma"}), ids({"flu", "enteritis"})};
  EXPECT_EQ(normalize_partition(raw, parent), raw);
}

TEST(NormalizePartition, OneSidedSplitIsRejected) {
  EXPECT_THROW(normalize_partition({"q?", ids({"a", "b"}), {}}, ids({"a", "b"})), RejectedPartition);
  EXPECT_THROW(normalize_partition({"q?", {}, ids({"a", "b"})}, ids({"a", "b"})), RejectedPartition);
}

TEST(NormalizePartition, DropsForeignAndRoutesMissingToNo) {
  const auto out = normalize_partition({"q?", ids({"a", "z"}), ids({"b"})}, ids({"a", "b", "c"}));
  EXPECT_EQ(out.yes_set, ids({"a"}));
  EXPECT_EQ(out.no_set, ids({"b", "c"}));
}

TEST(NormalizePartition, DuplicatesStayOnYesSide) {
  const auto out = normalize_partition({"q?", ids({"a", "b"}), ids({"b", "c"})}, ids({"a", "b", "c"}));
  EXPECT_EQ(out.yes_set, ids({"a", "b"}));
  EXPECT_EQ(out.no_set, ids({"c"}));
}

TEST(NormalizePartition, EmptyQuestionIsRejected) {
  EXPECT_THROW(normalize_partition({"   ", ids({"a"}), ids({"b"})}, ids({"a", "b"})), RejectedPartition);
}

TEST(NormalizePartition, SingletonParentAcceptsOneSidedSplit) {
  const auto out = normalize_partition({"q?", ids({"a"}), {}}, ids({"a"}));
  EXPECT_EQ(out.yes_set, ids({"a"}));
  EXPECT_TRUE(out.no_set.empty());
}

TEST(NormalizePartition, RandomSubsetsAreExhaustiveDisjointAndIdempotent) {
  std::mt19937 rng(1234);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> size_dist(1, 64);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = size_dist(rng);
    PossibilitySet parent;
    for (int i = 0; i < n; ++i) parent.insert("o" + std::to_string(i));
    Partition raw{"q?", {}, {}};
    // Ids beyond the parent exercise the foreign-item rule.
    for (int i = 0; i < n + 8; ++i) {
      const auto id = "o" + std::to_string(i);
      if (coin(rng)) raw.yes_set.insert(id);
      if (coin(rng)) raw.no_set.insert(id);
    }
    Partition out;
    try {
      out = normalize_partition(raw, parent);
    } catch (const RejectedPartition&) {
      // Rejection must coincide with a one-sided repaired split.
      std::size_t yes_in_parent = 0;
      for (const auto& id : parent) yes_in_parent += raw.yes_set.contains(id);
      EXPECT_TRUE(n > 1 && (yes_in_parent == 0 || yes_in_parent == parent.size()));
      continue;
    }
    ASSERT_EQ(out.yes_set.size() + out.no_set.size(), parent.size());
    ASSERT_FALSE(out.yes_set.intersects(out.no_set));
    for (const auto& id : parent) ASSERT_TRUE(out.yes_set.contains(id) || out.no_set.contains(id));
    for (const auto& id : out.yes_set) ASSERT_TRUE(raw.yes_set.contains(id));
    ASSERT_EQ(normalize_partition(out, parent), out);
    ++checked;
  }
  EXPECT_GT(checked, 1000);
}

TEST(Catalog, RejectsDuplicatesAndEmptyLabels) {
  Catalog c;
  c.add({"a", "Alpha", {true}});
  EXPECT_THROW(c.add({"a", "Other", {true}}), DatasetError);
  EXPECT_THROW(c.add({"b", "alpha ", {true}}), DatasetError);
  EXPECT_THROW(c.add({"c", "  ", {true}}), DatasetError);
  EXPECT_THROW(c.add({"d", "Delta", {true, false}}), DatasetError);
}

TEST(Catalog, LooksUpByFoldedLabel) {
  Catalog c;
  c.add({"gu", "Gastric Ulcer", {}});
  ASSERT_NE(c.find_by_label("  gastric   ulcer "), nullptr);
  EXPECT_EQ(c.find_by_label("gastric ulcer")->id, "gu");
  EXPECT_EQ(c.find_by_label("ulcer"), nullptr);
}

TEST(Catalog, AcceptsOutcomesWithoutSignatureNextToSignedOnes) {
  Catalog c;
  c.add({"a", "a", {true, false}});
  c.add({"b", "b", {}});
  EXPECT_EQ(c.signature_length(), 2u);
}

TEST(Dataset, ParsesDocumentAndValidatesTargets) {
  const auto doc = nlohmann::json::parse(R"({
    "dataset_id": "tiny", "domain": "troubleshooting",
    "outcomes": [{"id": "rl", "label": "radiator leak"}, {"label": "hose leak"}],
    "samples": [{"id": 1, "problem_description": "steam", "target": "Radiator Leak"}]})");
  const auto d = dataset_from_json(doc);
  EXPECT_EQ(d.id, "tiny");
  EXPECT_EQ(d.domain, "troubleshooting");
  EXPECT_EQ(d.catalog.size(), 2u);
  EXPECT_EQ(d.catalog.find_by_label("hose leak")->id, "hose leak");
  ASSERT_EQ(d.samples.size(), 1u);
  EXPECT_EQ(d.samples[0].id, "1");
  EXPECT_EQ(d.target_id(d.samples[0]), std::optional<OutcomeId>("rl"));

  auto bad = doc;
  bad["samples"][0]["target"] = "unknown";
  EXPECT_THROW(dataset_from_json(bad), DatasetError);
  EXPECT_THROW(dataset_from_json(nlohmann::json::parse(R"({"outcomes": 3})"), "x"), DatasetError);
}

TEST(Dataset, BundledFilesLoad) {
  const auto animals = load_dataset(std::string(INQUIRE_DATA_DIR) + "/animals.json");
  EXPECT_EQ(animals.catalog.size(), 16u);
  EXPECT_EQ(animals.samples.size(), 16u);
  const auto cars = load_dataset(std::string(INQUIRE_DATA_DIR) + "/car_faults.json");
  EXPECT_EQ(cars.domain, "troubleshooting");
  EXPECT_THROW(load_dataset("/nonexistent/file.json"), DatasetError);
}

TEST(Dataset, SyntheticSignaturesAreDistinct) {
  const auto d = synthetic_binary_dataset(7);
  EXPECT_EQ(d.catalog.size(), 128u);
  std::set<std::vector<bool>> seen;
  for (const auto& o : d.catalog.outcomes()) seen.insert(o.signature);
  EXPECT_EQ(seen.size(), 128u);
}

TEST(Config, DefaultsAndOverrides) {
  const Config c;
  EXPECT_EQ(c.search.iterations, 10);
  EXPECT_DOUBLE_EQ(c.search.exploration, 0.2);
  EXPECT_EQ(c.search.sim_depth, 3);
  EXPECT_EQ(c.search.fanout, 3);
  EXPECT_DOUBLE_EQ(c.search.reward.lambda, 0.4);
  EXPECT_DOUBLE_EQ(c.delta, 0.6);
  EXPECT_DOUBLE_EQ(c.tau, 0.9);
  EXPECT_DOUBLE_EQ(c.beta, 0.2);
  EXPECT_DOUBLE_EQ(c.gamma, 0.9);

  const auto o = apply_config(c, nlohmann::json{{"K", 4}, {"T", 6}, {"seed", 9}});
  EXPECT_EQ(o.search.iterations, 4);
  EXPECT_EQ(o.max_turns, 6);
  EXPECT_EQ(o.search.rng_seed, 9u);
  EXPECT_EQ(apply_config(Config{}, config_to_json(o)).search.iterations, 4);

  EXPECT_THROW(apply_config(c, nlohmann::json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(apply_config(c, nlohmann::json{{"K", 0}}), ConfigError);
  EXPECT_THROW(apply_config(c, nlohmann::json{{"gamma", 1.0}}), ConfigError);
  EXPECT_THROW(apply_config(c, nlohmann::json{{"lambda", 0.0}}), ConfigError);
  EXPECT_THROW(apply_config(c, nlohmann::json{{"K", "ten"}}), ConfigError);
  EXPECT_NO_THROW(load_config(std::string(INQUIRE_DATA_DIR) + "/config.json"));
}
