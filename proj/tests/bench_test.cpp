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

#include <gtest/gtest.h>

#include "support.hpp"

using namespace inquire;

namespace {

Config bench_config() {
  Config c;
  c.max_turns = 20;
  c.delta = 0.6;
  c.search.iterations = 10;
  c.search.sim_depth = 3;
  c.search.fanout = 3;
  return c;
}

struct OracleBench {
  explicit OracleBench(Dataset d) : state(std::move(d), bench_config()),
        oracle(state.dataset.catalog, state.dataset.attribute_questions, &counters) {}
  BenchmarkReport run(const BenchmarkOptions& o = {}) {
    return run_benchmark(state, bench_config(), SessionServices{&oracle, &embedder}, counters, o);
  }
  DatasetState state;
  CallCounters counters;
  OracleGenerator oracle;
  HashedBagOfWords embedder;
};

}  // namespace

TEST(SimulatedAnswer, FollowsPartitionMembership) {
  const auto c = inquire::testing::labels_catalog({"flu", "pneumonia", "enteritis", "asthma"});
  const Partition breathing{"Do you have difficulty breathing?", PossibilitySet({"pneumonia", "asthma"}),
                            PossibilitySet({"flu", "enteritis"})};
  EXPECT_EQ(simulated_answer(&breathing, c.at("pneumonia"), "medical"), "Yes.");
  EXPECT_EQ(simulated_answer(&breathing, c.at("flu"), "medical"), "No.");
}

TEST(SimulatedAnswer, ConfirmsOnlyTheExactTarget) {
  const Outcome leak{"radiator leak", "radiator leak", {}};
  EXPECT_EQ(simulated_answer(std::string("Radiator Leak"), leak, "troubleshooting"),
            "You are right. My device has issues with 'radiator leak'.");
  EXPECT_EQ(simulated_answer(std::string("hose leak"), leak, "troubleshooting"), "No.");
  EXPECT_EQ(simulated_answer(std::string("radiator leak"), leak), "You guessed it. X is 'radiator leak'.");
  EXPECT_EQ(simulated_answer(std::string("radiator leak"), leak, "medical"),
            "You are right. I am experiencing 'radiator leak'.");
}

TEST(RunBenchmark, EmptyDatasetIsRejected) {
  auto d = synthetic_binary_dataset(3);
  d.samples.clear();
  OracleBench b(std::move(d));
  EXPECT_THROW(b.run(), EmptyDataset);
}

TEST(RunBenchmark, EightOutcomesAllSolvedQuickly) {
  OracleBench b(synthetic_binary_dataset(3));
  const auto r = b.run();
  EXPECT_EQ(r.n_samples, 8u);
  EXPECT_DOUBLE_EQ(r.sr, 100.0);
  ASSERT_TRUE(r.msc);
  EXPECT_LE(*r.msc, 4.0);
  for (const auto& s : r.samples) {
    EXPECT_TRUE(s.target_tracked);
    EXPECT_LE(s.max_planning_calls, 10);
  }
}

TEST(RunBenchmark, AggregatesMatchRecords) {
  OracleBench b(synthetic_binary_dataset(5));
  const auto r = b.run();
  double successes = 0, turns = 0, qgc = 0;
  for (const auto& s : r.samples) {
    successes += s.success;
    if (s.success) turns += s.turns;
    qgc += static_cast<double>(s.qgc);
  }
  EXPECT_DOUBLE_EQ(r.sr, 100.0 * successes / static_cast<double>(r.n_samples));
  ASSERT_TRUE(r.msc);
  EXPECT_DOUBLE_EQ(*r.msc, turns / successes);
  EXPECT_DOUBLE_EQ(r.mean_qgc, qgc / static_cast<double>(r.n_samples));
  EXPECT_EQ(r.qgc_total, b.counters.qgc.load());
  ASSERT_TRUE(r.mean_qgc_warm);
  EXPECT_DOUBLE_EQ(*r.mean_qgc_warm, (qgc - static_cast<double>(r.samples.front().qgc)) /
                                         static_cast<double>(r.n_samples - 1));
}

TEST(RunBenchmark, WarmTreeNeedsNoNewGenerations) {
  OracleBench b(synthetic_binary_dataset(4));
  const auto first = b.run();
  EXPECT_GT(first.qgc_total, 0u);
  const auto second = b.run();
  EXPECT_EQ(second.qgc_total, 0u);
  EXPECT_DOUBLE_EQ(second.sr, 100.0);
}

TEST(RunBenchmark, RerunInSameClusterDoesNotTakeLonger) {
  auto d = synthetic_binary_dataset(4);
  for (auto& s : d.samples) s.problem_description = "guess the number I am thinking of";
  OracleBench b(std::move(d));
  const auto first = b.run();
  const auto second = b.run();
  ASSERT_EQ(first.samples.size(), second.samples.size());
  for (std::size_t i = 0; i < first.samples.size(); ++i) {
    EXPECT_LE(second.samples[i].turns, first.samples[i].turns) << first.samples[i].sample_id;
  }
  EXPECT_EQ(b.state.clusters.clusters().size(), 1u);
}

TEST(RunBenchmark, ShuffleIsSeededPermutation) {
  OracleBench a(synthetic_binary_dataset(3));
  OracleBench b(synthetic_binary_dataset(3));
  const auto ra = a.run({SetMode::kClosed, true, 5});
  const auto rb = b.run({SetMode::kClosed, true, 5});
  std::vector<std::string> oa, ob;
  for (const auto& s : ra.samples) oa.push_back(s.sample_id);
  for (const auto& s : rb.samples) ob.push_back(s.sample_id);
  EXPECT_EQ(oa, ob);
  EXPECT_EQ(report_to_json(ra).at("samples").dump(), report_to_json(rb).at("samples").dump());
}

TEST(BenchmarkReport, MeanQgcArithmetic) {
  // Ten samples, three generation calls in total.
  BenchmarkReport r;
  r.n_samples = 10;
  r.qgc_total = 3;
  r.mean_qgc = static_cast<double>(r.qgc_total) / static_cast<double>(r.n_samples);
  EXPECT_DOUBLE_EQ(r.mean_qgc, 0.3);
  const auto j = report_to_json(r);
  EXPECT_DOUBLE_EQ(j.at("mean_qgc").get<double>(), 0.3);
  EXPECT_TRUE(j.at("msc").is_null());
  EXPECT_NE(report_table(r).find("0.30"), std::string::npos);
}

TEST(QgcBounds, KnownValues) {
  EXPECT_EQ(qgc_bounds(3, 3, 10), (QgcBounds{259, 216, 30}));
  EXPECT_EQ(qgc_bounds(1, 1, 1), (QgcBounds{3, 2, 1}));
  EXPECT_EQ(qgc_bounds(2, 2, 5), (QgcBounds{21, 16, 10}));
}

TEST(QgcBounds, RejectsZeroAndOverflow) {
  EXPECT_THROW(qgc_bounds(0, 3, 10), std::invalid_argument);
  EXPECT_THROW(qgc_bounds(3, 0, 10), std::invalid_argument);
  EXPECT_THROW(qgc_bounds(3, 3, 0), std::invalid_argument);
  EXPECT_THROW(qgc_bounds(1000, 10, 1), std::overflow_error);
  EXPECT_NO_THROW(qgc_bounds(1, 62, 1));
  EXPECT_THROW(qgc_bounds(1, 64, 1), std::overflow_error);
}
