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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace inquire;
using inquire::testing::ids;

namespace {

/// Independent medoid: full cosine matrix, strict first maximum.
std::size_t brute_medoid(const std::vector<Embedding>& members) {
  std::size_t best = 0;
  double best_sum = -1e300;
  for (std::size_t i = 0; i < members.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < members.size(); ++j) {
      double dot = 0.0, ni = 0.0, nj = 0.0;
      for (std::size_t d = 0; d < members[i].size(); ++d) {
        dot += members[i][d] * members[j][d];
        ni += members[i][d] * members[i][d];
        nj += members[j][d] * members[j][d];
      }
      sum += dot / std::sqrt(ni * nj);
    }
    if (sum > best_sum) {
      best = i;
      best_sum = sum;
    }
  }
  return best;
}

bool medoid_is_member(const ClusterStore& store) {
  for (const auto& c : store.clusters()) {
    if (c.medoid_index >= c.members.size()) return false;
  }
  return true;
}

}  // namespace

TEST(Cosine, MatchesHandValues) {
  EXPECT_DOUBLE_EQ(cosine_similarity(Embedding{1, 0}, Embedding{0, 1}), 0.0);
  EXPECT_NEAR(cosine_similarity(Embedding{1, 1}, Embedding{1, 0}), 0.7071067811865475, 1e-15);
  EXPECT_DOUBLE_EQ(cosine_similarity(Embedding{2, 0}, Embedding{5, 0}), 1.0);
  EXPECT_THROW(cosine_similarity(Embedding{1, 0}, Embedding{1, 0, 0}), DimensionMismatch);
}

TEST(AssignCluster, IdenticalToMedoidJoins) {
  ClusterStore store;
  const auto k = assign_cluster({0.3, 0.4}, store);
  EXPECT_EQ(assign_cluster({0.3, 0.4}, store), k);
  EXPECT_EQ(store.clusters().size(), 1u);
  EXPECT_EQ(store.clusters()[0].members.size(), 2u);
}

TEST(AssignCluster, OrthogonalOpensNewCluster) {
  ClusterStore store;
  EXPECT_EQ(assign_cluster({0, 1}, store), 0);
  EXPECT_EQ(assign_cluster({1, 0}, store), 1);
}

TEST(AssignCluster, BelowThresholdOpensNewCluster) {
  ClusterStore store(0.9);
  assign_cluster({1, 0}, store);
  EXPECT_EQ(assign_cluster({1, 1}, store), 1);  // cos 0.7071 < 0.9
  ClusterStore loose(0.7);
  assign_cluster({1, 0}, loose);
  EXPECT_EQ(assign_cluster({1, 1}, loose), 0);  // cos 0.7071 >= 0.7
}

TEST(AssignCluster, PicksMostSimilarQualifyingCluster) {
  ClusterStore store(0.5);
  assign_cluster({1, 0, 0}, store);
  assign_cluster({0, 1, 0}, store);
  EXPECT_EQ(assign_cluster({0.6, 0.8, 0}, store), 1);
}

TEST(AssignCluster, RejectsBadEmbeddings) {
  ClusterStore store;
  assign_cluster({1, 2, 3}, store);
  EXPECT_THROW(assign_cluster({1, 2}, store), DimensionMismatch);
  EXPECT_THROW(assign_cluster({0, 0, 0}, store), DimensionMismatch);
  EXPECT_THROW(assign_cluster({}, store), DimensionMismatch);
  EXPECT_THROW(ClusterStore(0.0), ConfigError);
  EXPECT_THROW(ClusterStore(0.9, 0.0), ConfigError);
  EXPECT_THROW(ClusterStore(0.9, 0.2, 1.0), ConfigError);
}

TEST(AssignCluster, MedoidReassignmentIsIdempotent) {
  ClusterStore store(0.8);
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int i = 0; i < 30; ++i) assign_cluster({1 + noise(rng), noise(rng), noise(rng)}, store);
  for (const auto& c : store.clusters()) {
    ClusterStore copy = store;
    EXPECT_EQ(assign_cluster(c.medoid(), copy), c.id);
  }
}

TEST(Medoid, SmallCases) {
  Cluster single{0, {{1, 2}}, 0};
  EXPECT_EQ(recompute_medoid(single), 0u);
  Cluster pair{0, {{1, 0}, {1, 1}}, 1};
  EXPECT_EQ(recompute_medoid(pair), 0u);
  Cluster three{0, {{1, 0}, {0.9, 0.1}, {0, 1}}, 0};
  EXPECT_EQ(recompute_medoid(three), brute_medoid(three.members));
  EXPECT_EQ(recompute_medoid(three), 1u);
}

TEST(Medoid, AgreesWithBruteForceOnRandomClusters) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> size(3, 10);
  std::uniform_int_distribution<int> dims(2, 16);
  std::normal_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Cluster c;
    const int n = size(rng);
    const int d = dims(rng);
    for (int i = 0; i < n; ++i) {
      Embedding e(static_cast<std::size_t>(d));
      for (auto& x : e) x = value(rng);
      c.members.push_back(std::move(e));
    }
    ASSERT_EQ(recompute_medoid(c), brute_medoid(c.members)) << "trial " << trial;
  }
}

TEST(Medoid, StaysMemberAfterEveryAssignment) {
  ClusterStore store(0.6);
  std::mt19937 rng(77);
  std::normal_distribution<double> value(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    Embedding e(4);
    for (auto& x : e) x = value(rng) + (i % 3 == 0 ? 2.0 : 0.0);
    assign_cluster(e, store);
    ASSERT_TRUE(medoid_is_member(store));
  }
  for (const auto& c : store.clusters()) {
    Cluster copy = c;
    EXPECT_EQ(recompute_medoid(copy), c.medoid_index);
  }
}

TEST(Feedback, RootBonusIsBetaTimesTotal) {
  auto root = make_root(ids({"a", "b", "c", "d"}));
  auto& q = attach_question(*root, {"q?", ids({"a", "b"}), ids({"c", "d"})}, 1.0);
  q.r_total = 5.0;
  q.visits = 5;
  ClusterStore store(0.9, 0.2, 0.9);
  QuestionNode* trajectory[] = {&q};
  propagate_feedback(trajectory, 0, store);
  EXPECT_DOUBLE_EQ(q.bonus_for(0), 1.0);
  EXPECT_EQ(q.r_total, 5.0);
  EXPECT_EQ(q.visits, 5);
}

TEST(Feedback, DecaysWithDepthAndSkipsUnsimulated) {
  const auto dataset = synthetic_binary_dataset(5);
  auto root = make_root(dataset.catalog.all());
  OracleGenerator oracle(dataset.catalog);
  SearchConfig cfg;
  std::vector<QuestionNode*> trajectory;
  AnswerNode* node = root.get();
  for (int d = 0; d < 4; ++d) {
    expand(*node, oracle, cfg);
    auto* q = node->children[0].get();
    q->r_total = 5.0;
    q->visits = 2;
    trajectory.push_back(q);
    node = q->yes_child.get();
  }
  auto* untouched = root->children[1].get();
  ClusterStore store(0.9, 0.2, 0.9);
  propagate_feedback(trajectory, 4, store);
  EXPECT_DOUBLE_EQ(trajectory[0]->bonus_for(4), 1.0);
  EXPECT_DOUBLE_EQ(trajectory[3]->bonus_for(4), 0.2 * 5.0 * 0.729);
  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    EXPECT_LT(trajectory[i]->bonus_for(4), trajectory[i - 1]->bonus_for(4));
  }
  EXPECT_TRUE(untouched->bonus.empty());
  EXPECT_EQ(trajectory[0]->bonus_for(3), 0.0);

  auto& fresh = *root->children[2];
  QuestionNode* zero[] = {&fresh};
  propagate_feedback(zero, 4, store);
  EXPECT_EQ(fresh.bonus_for(4), 0.0);
}

TEST(ClusterSnapshot, RoundTripsAndValidates) {
  ClusterStore store(0.85, 0.3, 0.8);
  assign_cluster({1, 0}, store);
  assign_cluster({0.99, 0.05}, store);
  assign_cluster({0, 1}, store);
  const auto path = std::filesystem::temp_directory_path() / "inquire_clusters_test.json";
  save_clusters(store, path);
  const auto back = load_clusters(path);
  std::filesystem::remove(path);
  EXPECT_EQ(clusters_to_json(back), clusters_to_json(store));
  EXPECT_DOUBLE_EQ(back.tau(), 0.85);

  auto j = clusters_to_json(store);
  j["version"] = 9;
  EXPECT_THROW(clusters_from_json(j), VersionMismatch);
  j = clusters_to_json(store);
  j["clusters"][0]["medoid_index"] = 7;
  EXPECT_THROW(clusters_from_json(j), CorruptSnapshot);
  j = clusters_to_json(store);
  j["clusters"][1]["members"][0] = {1, 2, 3};
  EXPECT_THROW(clusters_from_json(j), CorruptSnapshot);
}

TEST(HashedEmbedder, DeterministicUnitVectors) {
  HashedBagOfWords embed;
  const auto a = embed.embed("My car will not start");
  const auto b = embed.embed("my CAR will not start!");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 256u);
  double norm = 0.0;
  for (double x : a) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  const auto empty = embed.embed("  ?! ");
  EXPECT_TRUE(std::all_of(empty.begin(), empty.end(), [](double x) { return x == 0.0; }));
  EXPECT_GT(cosine_similarity(a, embed.embed("the car will not start")),
            cosine_similarity(a, embed.embed("squealing brakes when stopping")));
}
