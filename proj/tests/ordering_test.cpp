// Copyright 2026 The apcjoin Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "apc/ordering.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "apc/pruning.hpp"
#include "test_support.hpp"

namespace apc {
namespace {

using Meta = PartitionMeta<double>;
using Box = Aabb<double>;

Meta meta(std::string id, Box b, std::uint64_t count = 1) { return {std::move(id), std::move(b), count}; }

const Meta kOrigin = meta("O", Box{{-3, 0}, {0, 3}});

std::vector<Meta> scenario() {
  return {meta("P1", Box{{-5, -4}, {2, 3}}), meta("P2", Box{{1, 2}, {2, 3}}),
          meta("P3", Box{{4, 5}, {0, 2}})};
}

std::set<std::string> pruned_ids(const PrunePlan<double>& plan) {
  std::set<std::string> out;
  for (const auto& p : plan.pruned) out.insert(p.id);
  return out;
}

TEST(BuildDag, ScenarioHasSingleEdge) {
  const auto cands = scenario();
  const auto dag = build_dag<double>(kOrigin, cands);
  using E = std::pair<std::string, std::string>;
  EXPECT_EQ(dag.edge_list(), (std::vector<E>{{"P2", "P3"}}));
  // Cross-check every ordered pair against the definition-level oracle.
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (i == j) continue;
      EXPECT_EQ(dag.has_edge(i, j),
                testing::brute_all_points_closer(*kOrigin.bounds, *cands[i].bounds, *cands[j].bounds));
    }
  }
}

TEST(BuildDag, TrivialShapes) {
  const std::vector<Meta> one{meta("A", Box{{0, 1}, {0, 1}})};
  EXPECT_EQ(build_dag<double>(kOrigin, one).edge_count(), 0u);

  const std::vector<Meta> twins{meta("A", Box{{4, 5}, {4, 5}}), meta("B", Box{{4, 5}, {4, 5}})};
  EXPECT_EQ(build_dag<double>(kOrigin, twins).edge_count(), 0u);

  const std::vector<Meta> none;
  const auto empty = build_dag<double>(kOrigin, none);
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_TRUE(topological_order(empty).empty());
}

TEST(BuildDag, ErrorPaths) {
  const std::vector<Meta> dup{meta("A", Box{{0, 1}, {0, 1}}), meta("A", Box{{2, 3}, {0, 1}})};
  EXPECT_THROW(build_dag<double>(kOrigin, dup), UsageError);
  const std::vector<Meta> mismatch{meta("A", Box{{0, 1}})};
  EXPECT_THROW(build_dag<double>(kOrigin, mismatch), UsageError);
  const Meta unbounded{"O", std::nullopt, 0};
  const auto cands = scenario();
  EXPECT_THROW(build_dag<double>(unbounded, cands), UsageError);
  const std::vector<Meta> rows_without_bounds{{"A", std::nullopt, 3}};
  EXPECT_THROW(build_dag<double>(kOrigin, rows_without_bounds), UsageError);
}

TEST(ProximityDagType, RejectsSelfEdge) {
  ProximityDag<double> dag("O", {"A", "B"}, {0.0, 1.0});
  EXPECT_THROW(dag.add_edge(1, 1), std::logic_error);
}

TEST(TopologicalOrder, Examples) {
  const auto cands = scenario();
  const auto order = topological_order(build_dag<double>(kOrigin, cands));
  const auto p2 = std::find(order.begin(), order.end(), "P2");
  const auto p3 = std::find(order.begin(), order.end(), "P3");
  EXPECT_LT(p2, p3);
  // P1 and P2 share origin gap 1, so id decides; P3 has gap 16.
  EXPECT_EQ(order, (std::vector<std::string>{"P1", "P2", "P3"}));
}

TEST(TopologicalOrder, ChainAndCycle) {
  // Tie rule alone would reverse the chain.
  ProximityDag<double> chain("O", {"A", "B", "C"}, {3.0, 2.0, 1.0});
  chain.add_edge(0, 1);
  chain.add_edge(1, 2);
  EXPECT_EQ(topological_order(chain), (std::vector<std::string>{"A", "B", "C"}));

  ProximityDag<double> loop("O", {"A", "B"}, {0.0, 0.0});
  loop.add_edge(0, 1);
  loop.add_edge(1, 0);
  EXPECT_THROW(topological_order(loop), std::logic_error);
}

TEST(TopologicalOrder, UnboundedNodesLast) {
  ProximityDag<double> dag("O", {"A", "B", "C"}, {std::nullopt, 5.0, 1.0});
  EXPECT_EQ(topological_order(dag), (std::vector<std::string>{"C", "B", "A"}));
}

TEST(PruneByDag, ScenarioK1) {
  const auto cands = scenario();
  const auto plan = prune_by_dag(build_dag<double>(kOrigin, cands), std::span<const Meta>(cands), 1);
  EXPECT_EQ(pruned_ids(plan), (std::set<std::string>{"P3"}));
  EXPECT_EQ(plan.required, (std::vector<std::string>{"P1", "P2"}));
  ASSERT_EQ(plan.pruned.size(), 1u);
  EXPECT_EQ(plan.pruned[0].reason, PruneReason::kCloserSet);
  EXPECT_EQ(plan.pruned[0].closer_set, (std::vector<std::string>{"P2"}));
  EXPECT_EQ(plan.pruned[0].closer_points, 1u);
  EXPECT_TRUE(plan.is_pruned("P3"));
  EXPECT_FALSE(plan.is_pruned("P1"));
}

TEST(PruneByDag, ScenarioK2KeepsEverything) {
  const auto cands = scenario();
  const auto plan = prune_by_dag(build_dag<double>(kOrigin, cands), std::span<const Meta>(cands), 2);
  EXPECT_TRUE(plan.pruned.empty());
  EXPECT_EQ(plan.required, (std::vector<std::string>{"P1", "P2", "P3"}));
}

TEST(PruneByDag, SingleCandidateAndErrors) {
  const std::vector<Meta> one{meta("A", Box{{0, 1}, {0, 1}})};
  const auto dag = build_dag<double>(kOrigin, one);
  const auto plan = prune_by_dag(dag, std::span<const Meta>(one), 1);
  EXPECT_EQ(plan.required, (std::vector<std::string>{"A"}));
  EXPECT_TRUE(plan.pruned.empty());
  EXPECT_THROW(prune_by_dag(dag, std::span<const Meta>(one), 0), UsageError);
  const auto cands = scenario();
  EXPECT_THROW(prune_by_dag(dag, std::span<const Meta>(cands), 1), UsageError);
}

TEST(PruneByDag, EmptyPartitionsArePruned) {
  auto cands = scenario();
  cands.push_back({"P4", std::nullopt, 0});
  cands.push_back(meta("P5", Box{{-1, 0}, {0, 1}}, 0));
  const auto plan = prune_by_dag(build_dag<double>(kOrigin, cands), std::span<const Meta>(cands), 5);
  std::map<std::string, PruneReason> reasons;
  for (const auto& p : plan.pruned) reasons[p.id] = p.reason;
  EXPECT_EQ(reasons.at("P4"), PruneReason::kEmpty);
  EXPECT_EQ(reasons.at("P5"), PruneReason::kEmpty);
  EXPECT_EQ(plan.required, (std::vector<std::string>{"P1", "P2", "P3"}));
}

TEST(PruneByDag, ClosureCountsIndirectAncestors) {
  // Three nested shells along one axis: A -> B -> C, and A -> C by transitivity.
  const Meta origin = meta("O", Box{{0, 1}});
  const std::vector<Meta> cands{meta("A", Box{{2, 3}}, 1), meta("B", Box{{10, 11}}, 1),
                                meta("C", Box{{30, 31}}, 1)};
  const auto dag = build_dag<double>(origin, cands);
  EXPECT_TRUE(dag.has_edge(0, 1));
  EXPECT_TRUE(dag.has_edge(1, 2));
  EXPECT_TRUE(dag.has_edge(0, 2));
  const auto plan = prune_by_dag(dag, std::span<const Meta>(cands), 2);
  EXPECT_EQ(pruned_ids(plan), (std::set<std::string>{"C"}));
  EXPECT_EQ(plan.pruned[0].closer_points, 2u);
}

TEST(PruneByBaseline, ScenarioK1PrunesNothing) {
  const auto cands = scenario();
  const auto plan = prune_by_baseline<double>(kOrigin, cands, 1);
  EXPECT_TRUE(plan.pruned.empty());
  ASSERT_TRUE(plan.prune_dist_sq.has_value());
  EXPECT_EQ(*plan.prune_dist_sq, 34.0);
  EXPECT_EQ(bmin_dist_sq(*kOrigin.bounds, *cands[2].bounds), 16.0);
  EXPECT_EQ(plan.required.size(), 3u);
}

TEST(PruneByBaseline, FarCandidateBeyondEnclosing) {
  const Meta origin = meta("O", Box{{0, 1}, {0, 1}});
  const std::vector<Meta> cands{meta("far", Box{{50, 60}, {50, 60}}, 4),
                                meta("near", Box{{-1, 2}, {-1, 2}}, 1)};
  const auto plan = prune_by_baseline<double>(origin, cands, 1);
  EXPECT_EQ(pruned_ids(plan), (std::set<std::string>{"far"}));
  EXPECT_EQ(plan.pruned[0].reason, PruneReason::kBeyondPruneDist);
  EXPECT_EQ(plan.pruned[0].bmin_dist_sq, 2 * 49.0 * 49.0);
  EXPECT_EQ(*plan.prune_dist_sq, 8.0);
  EXPECT_EQ(plan.required, (std::vector<std::string>{"near"}));
}

TEST(PruneByBaseline, TooFewRowsPrunesNothing) {
  const auto cands = scenario();
  const auto plan = prune_by_baseline<double>(kOrigin, cands, 4);
  EXPECT_FALSE(plan.prune_dist_sq.has_value());
  EXPECT_TRUE(plan.pruned.empty());
  EXPECT_THROW(prune_by_baseline<double>(kOrigin, cands, 0), UsageError);
}

TEST(PruneNone, LoadsEverything) {
  const auto cands = scenario();
  const auto plan = prune_none<double>(kOrigin, cands);
  EXPECT_EQ(plan.required, (std::vector<std::string>{"P1", "P2", "P3"}));
  EXPECT_TRUE(plan.pruned.empty());
}

TEST(PruneMethodNames, RoundTrip) {
  for (auto m : {PruneMethod::kNone, PruneMethod::kBaseline, PruneMethod::kApcDag}) {
    EXPECT_EQ(parse_prune_method(to_string(m)), m);
  }
  EXPECT_EQ(to_string(PruneMethod::kApcDag), "apc-dag");
  EXPECT_THROW(parse_prune_method("fast"), UsageError);
  EXPECT_EQ(to_string(PruneReason::kEmpty), "empty");
  EXPECT_EQ(to_string(PruneReason::kCloserSet), "closer-set");
  EXPECT_EQ(to_string(PruneReason::kBeyondPruneDist), "prune-dist");
}

// Properties ----------------------------------------------------------------

template <Scalar T>
std::vector<PartitionMeta<T>> random_ensemble(testing::BoxGen<T>& gen, std::size_t n,
                                              std::size_t dims, std::mt19937_64& rng) {
  std::vector<PartitionMeta<T>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto count = std::uniform_int_distribution<std::uint64_t>(0, 4)(rng);
    out.push_back({"c" + std::to_string(i), gen.box(dims), count});
  }
  return out;
}

template <Scalar T>
void check_order_properties(std::uint64_t seed, bool grid) {
  testing::BoxGen<T> gen(seed, grid);
  std::mt19937_64 rng(seed + 1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t dims = 1 + t % 4;
    const std::size_t n = 2 + t % 12;
    const PartitionMeta<T> origin{"O", gen.box(dims), 1};
    const auto cands = random_ensemble(gen, n, dims, rng);
    const auto dag = build_dag<T>(origin, cands);
    const auto order = topological_order(dag);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    ASSERT_EQ(pos.size(), n);

    for (std::size_t a = 0; a < n; ++a) {
      ASSERT_FALSE(dag.has_edge(a, a));
      ASSERT_FALSE(all_points_closer_opt(*origin.bounds, *cands[a].bounds, *cands[a].bounds));
      for (std::size_t b = 0; b < n; ++b) {
        if (!dag.has_edge(a, b)) continue;
        ASSERT_FALSE(dag.has_edge(b, a));
        ASSERT_LT(pos[cands[a].id], pos[cands[b].id]);
        for (std::size_t c = 0; c < n; ++c) {
          if (dag.has_edge(b, c)) { ASSERT_TRUE(dag.has_edge(a, c)); }
        }
      }
    }

    for (std::uint64_t k : {1u, 2u, 5u, 50u}) {
      const auto by_dag = prune_by_dag(dag, std::span<const PartitionMeta<T>>(cands), k);
      const auto by_base = prune_by_baseline<T>(origin, cands, k);
      for (const auto* plan : {&by_dag, &by_base}) {
        std::set<std::string> all;
        for (const auto& id : plan->required) ASSERT_TRUE(all.insert(id).second);
        for (const auto& p : plan->pruned) ASSERT_TRUE(all.insert(p.id).second);
        ASSERT_EQ(all.size(), n);
      }
      for (const auto& p : by_base.pruned) ASSERT_TRUE(by_dag.is_pruned(p.id)) << p.id << " k=" << k;
    }
  }
}

TEST(OrderProperties, FloatGrid) { check_order_properties<double>(601, true); }
TEST(OrderProperties, FloatContinuous) { check_order_properties<double>(602, false); }
TEST(OrderProperties, IntGrid) { check_order_properties<std::int64_t>(603, true); }
TEST(OrderProperties, IntWide) { check_order_properties<std::int64_t>(604, false); }

TEST(OrderProperties, ClusteredEnsemblesProduceEdges) {
  // Small boxes scattered along a ray from the origin box produce dense DAGs.
  std::mt19937_64 rng(605);
  std::uniform_real_distribution<double> jitter(0, 1);
  std::size_t edges = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Meta> cands;
    for (int i = 0; i < 10; ++i) {
      const double x = 3 + 4 * i + jitter(rng);
      const double y = jitter(rng);
      cands.push_back(meta("c" + std::to_string(i), Box{{x, x + 0.5}, {y, y + 0.5}}, 1));
    }
    const Meta origin = meta("O", Box{{0, 1}, {0, 1}});
    const auto dag = build_dag<double>(origin, cands);
    edges += dag.edge_count();
    const auto by_dag = prune_by_dag(dag, std::span<const Meta>(cands), 3);
    const auto by_base = prune_by_baseline<double>(origin, cands, 3);
    for (const auto& p : by_base.pruned) ASSERT_TRUE(by_dag.is_pruned(p.id));
    ASSERT_GE(by_dag.pruned.size(), by_base.pruned.size());
  }
  EXPECT_GT(edges, 1000u);
}

}  // namespace
}  // namespace apc
