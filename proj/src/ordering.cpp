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

#include <algorithm>
#include <bit>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "apc/pruning.hpp"

namespace apc {

std::string_view to_string(PruneMethod m) {
  switch (m) {
    case PruneMethod::kNone:
      return "none";
    case PruneMethod::kBaseline:
      return "baseline";
    case PruneMethod::kApcDag:
      return "apc-dag";
  }
  return "?";
}

PruneMethod parse_prune_method(std::string_view text) {
  if (text == "none") return PruneMethod::kNone;
  if (text == "baseline") return PruneMethod::kBaseline;
  if (text == "apc-dag") return PruneMethod::kApcDag;
  throw UsageError("unknown prune method '" + std::string(text) + "'");
}

std::string_view to_string(PruneReason r) {
  switch (r) {
    case PruneReason::kEmpty:
      return "empty";
    case PruneReason::kCloserSet:
      return "closer-set";
    case PruneReason::kBeyondPruneDist:
      return "prune-dist";
  }
  return "?";
}

template <Scalar T>
bool PrunePlan<T>::is_pruned(const std::string& id) const {
  return std::any_of(pruned.begin(), pruned.end(),
                     [&](const PrunedPartition<T>& p) { return p.id == id; });
}

template <Scalar T>
ProximityDag<T>::ProximityDag(std::string origin, std::vector<std::string> nodes,
                              std::vector<std::optional<Wide<T>>> origin_gap)
    : origin_(std::move(origin)),
      nodes_(std::move(nodes)),
      origin_gap_(std::move(origin_gap)),
      adj_(nodes_.size() * nodes_.size(), false),
      succ_(nodes_.size()),
      pred_(nodes_.size()) {
  if (origin_gap_.size() != nodes_.size()) throw std::logic_error("gap/node size mismatch");
}

template <Scalar T>
void ProximityDag<T>::add_edge(std::size_t from, std::size_t to) {
  if (from == to) throw std::logic_error("self-edge on " + nodes_[from]);
  const std::size_t slot = from * nodes_.size() + to;
  if (adj_[slot]) return;
  adj_[slot] = true;
  succ_[from].push_back(to);
  pred_[to].push_back(from);
  ++edges_;
}

template <Scalar T>
std::vector<std::pair<std::string, std::string>> ProximityDag<T>::edge_list() const {
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(edges_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j : succ_[i]) out.emplace_back(nodes_[i], nodes_[j]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <Scalar T>
bool ProximityDag<T>::tie_less(std::size_t a, std::size_t b) const {
  const auto& ga = origin_gap_[a];
  const auto& gb = origin_gap_[b];
  if (ga.has_value() != gb.has_value()) return ga.has_value();
  if (ga && *ga != *gb) return *ga < *gb;
  return nodes_[a] < nodes_[b];
}

namespace {

template <Scalar T>
void check_candidates(std::span<const PartitionMeta<T>> candidates) {
  std::unordered_set<std::string> seen;
  for (const auto& c : candidates) {
    if (!seen.insert(c.id).second) throw UsageError("duplicate partition id '" + c.id + "'");
    if (!c.bounds && c.count > 0) {
      throw UsageError("partition '" + c.id + "' has rows but no bounds");
    }
  }
}

template <Scalar T>
const Aabb<T>& origin_bounds(const PartitionMeta<T>& origin) {
  if (!origin.bounds) throw UsageError("origin partition '" + origin.id + "' has no bounds");
  return *origin.bounds;
}

template <Scalar T>
void check_dag_matches(const ProximityDag<T>& dag, std::span<const PartitionMeta<T>> candidates) {
  if (dag.size() != candidates.size()) throw UsageError("DAG was built over other candidates");
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (dag.node(i) != candidates[i].id) throw UsageError("DAG was built over other candidates");
  }
}

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& bits, std::size_t i) { bits[i / 64] |= std::uint64_t{1} << (i % 64); }

}  // namespace

template <Scalar T>
ProximityDag<T> build_dag(const PartitionMeta<T>& origin,
                          std::span<const PartitionMeta<T>> candidates) {
  check_candidates(candidates);
  const Aabb<T>& o = origin_bounds(origin);

  std::vector<std::string> ids;
  std::vector<std::optional<Wide<T>>> gaps;
  for (const auto& c : candidates) {
    ids.push_back(c.id);
    gaps.push_back(c.bounds ? std::optional<Wide<T>>(bmin_dist_sq(o, *c.bounds)) : std::nullopt);
  }
  ProximityDag<T> dag(origin.id, std::move(ids), std::move(gaps));

  const std::size_t n = candidates.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!candidates[i].bounds) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !candidates[j].bounds) continue;
      if (all_points_closer_opt(o, *candidates[i].bounds, *candidates[j].bounds)) {
        dag.add_edge(i, j);
      }
    }
  }
  return dag;
}

namespace {

template <Scalar T>
std::vector<std::size_t> topological_indices(const ProximityDag<T>& dag) {
  const std::size_t n = dag.size();
  std::vector<std::size_t> indegree(n);
  for (std::size_t i = 0; i < n; ++i) indegree[i] = dag.predecessors(i).size();

  // Min-heap on the tie rule.
  auto after = [&](std::size_t a, std::size_t b) { return dag.tie_less(b, a); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(after)> ready(after);
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order.push_back(i);
    for (std::size_t j : dag.successors(i)) {
      if (--indegree[j] == 0) ready.push(j);
    }
  }
  if (order.size() != n) {
    throw std::logic_error("proximity order for origin '" + dag.origin() + "' contains a cycle");
  }
  return order;
}

}  // namespace

template <Scalar T>
std::vector<std::string> topological_order(const ProximityDag<T>& dag) {
  std::vector<std::string> out;
  for (std::size_t i : topological_indices(dag)) out.push_back(dag.node(i));
  return out;
}

template <Scalar T>
PrunePlan<T> prune_by_dag(const ProximityDag<T>& dag, std::span<const PartitionMeta<T>> candidates,
                          std::uint64_t k) {
  if (k == 0) throw UsageError("k must be at least 1");
  check_dag_matches(dag, candidates);
  const std::size_t n = dag.size();
  const std::vector<std::size_t> position = topological_indices(dag);

  // Ancestor bitsets in topological order give the transitive closure.
  const std::size_t words = (n + 63) / 64;
  std::vector<Bits> ancestors(n, Bits(words, 0));
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t b = position[pos];
    for (std::size_t a : dag.predecessors(b)) {
      set_bit(ancestors[b], a);
      for (std::size_t w = 0; w < words; ++w) ancestors[b][w] |= ancestors[a][w];
    }
  }

  PrunePlan<T> plan;
  plan.origin = dag.origin();
  plan.method = PruneMethod::kApcDag;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t b = position[pos];
    const auto& meta = candidates[b];
    if (meta.count == 0) {
      plan.pruned.push_back({meta.id, PruneReason::kEmpty, {}, 0, {}});
      continue;
    }
    std::uint64_t closer_points = 0;
    std::vector<std::string> closer;
    for (std::size_t w = 0; w < words; ++w) {
      for (std::uint64_t bits = ancestors[b][w]; bits != 0; bits &= bits - 1) {
        const std::size_t a = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        closer_points += candidates[a].count;
        closer.push_back(candidates[a].id);
      }
    }
    if (closer_points >= k) {
      std::sort(closer.begin(), closer.end());
      plan.pruned.push_back({meta.id, PruneReason::kCloserSet, std::move(closer), closer_points, {}});
    } else {
      plan.required.push_back(meta.id);
    }
  }
  return plan;
}

template <Scalar T>
PrunePlan<T> prune_by_baseline(const PartitionMeta<T>& origin,
                               std::span<const PartitionMeta<T>> candidates, std::uint64_t k) {
  if (k == 0) throw UsageError("k must be at least 1");
  check_candidates(candidates);
  const Aabb<T>& o = origin_bounds(origin);

  struct Entry {
    std::size_t index;
    Wide<T> bmin;
    Wide<T> bmax;
  };
  std::vector<Entry> bounded;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.count == 0 || !c.bounds) continue;
    bounded.push_back({i, bmin_dist_sq(o, *c.bounds), bmax_dist_sq(o, *c.bounds)});
  }
  std::sort(bounded.begin(), bounded.end(), [&](const Entry& a, const Entry& b) {
    if (a.bmax != b.bmax) return a.bmax < b.bmax;
    return candidates[a.index].id < candidates[b.index].id;
  });

  PrunePlan<T> plan;
  plan.origin = origin.id;
  plan.method = PruneMethod::kBaseline;
  std::uint64_t seen = 0;
  for (const Entry& e : bounded) {
    seen += candidates[e.index].count;
    if (seen >= k) {
      plan.prune_dist_sq = e.bmax;
      break;
    }
  }

  for (const Entry& e : bounded) {
    const auto& c = candidates[e.index];
    if (plan.prune_dist_sq && e.bmin > *plan.prune_dist_sq) {
      plan.pruned.push_back({c.id, PruneReason::kBeyondPruneDist, {}, 0, e.bmin});
    } else {
      plan.required.push_back(c.id);
    }
  }
  for (const auto& c : candidates) {
    if (c.count == 0) plan.pruned.push_back({c.id, PruneReason::kEmpty, {}, 0, {}});
  }
  return plan;
}

template <Scalar T>
PrunePlan<T> prune_none(const PartitionMeta<T>& origin,
                        std::span<const PartitionMeta<T>> candidates) {
  check_candidates(candidates);
  PrunePlan<T> plan;
  plan.origin = origin.id;
  plan.method = PruneMethod::kNone;
  for (const auto& c : candidates) plan.required.push_back(c.id);
  return plan;
}

template <Scalar T>
PrunePlan<T> plan_for(PruneMethod method, const PartitionMeta<T>& origin,
                      std::span<const PartitionMeta<T>> candidates, std::uint64_t k) {
  switch (method) {
    case PruneMethod::kNone:
      return prune_none(origin, candidates);
    case PruneMethod::kBaseline:
      return prune_by_baseline(origin, candidates, k);
    case PruneMethod::kApcDag:
      return prune_by_dag(build_dag(origin, candidates), candidates, k);
  }
  throw UsageError("unknown prune method");
}

#define APC_INSTANTIATE_ORDERING(T)                                                             \
  template class ProximityDag<T>;                                                               \
  template struct PrunePlan<T>;                                                                 \
  template ProximityDag<T> build_dag(const PartitionMeta<T>&, std::span<const PartitionMeta<T>>); \
  template std::vector<std::string> topological_order(const ProximityDag<T>&);                  \
  template PrunePlan<T> prune_by_dag(const ProximityDag<T>&, std::span<const PartitionMeta<T>>,  \
                                     std::uint64_t);                                            \
  template PrunePlan<T> prune_by_baseline(const PartitionMeta<T>&,                              \
                                          std::span<const PartitionMeta<T>>, std::uint64_t);    \
  template PrunePlan<T> prune_none(const PartitionMeta<T>&, std::span<const PartitionMeta<T>>); \
  template PrunePlan<T> plan_for(PruneMethod, const PartitionMeta<T>&,                          \
                                 std::span<const PartitionMeta<T>>, std::uint64_t);

APC_INSTANTIATE_ORDERING(double)
APC_INSTANTIATE_ORDERING(std::int64_t)

#undef APC_INSTANTIATE_ORDERING

}  // namespace apc
