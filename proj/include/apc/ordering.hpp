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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "apc/geometry.hpp"

namespace apc {

/// Zone-map record for one partition: bounds plus exact row count.
/// Bounds may be looser than the data; they are absent only when count == 0.
template <Scalar T>
struct PartitionMeta {
  std::string id;
  std::optional<Aabb<T>> bounds;
  std::uint64_t count = 0;
};

/// Proximity partial order over candidate partitions for one origin. An edge
/// e -> b means every origin point is strictly closer to every point of e than
/// to any point of b.
template <Scalar T>
class ProximityDag {
 public:
  ProximityDag(std::string origin, std::vector<std::string> nodes,
               std::vector<std::optional<Wide<T>>> origin_gap);

  const std::string& origin() const { return origin_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& node(std::size_t i) const { return nodes_[i]; }

  /// bmin_dist_sq from the origin bounds; absent for unbounded (empty) nodes.
  const std::optional<Wide<T>>& origin_gap(std::size_t i) const { return origin_gap_[i]; }

  void add_edge(std::size_t from, std::size_t to);
  bool has_edge(std::size_t from, std::size_t to) const { return adj_[from * nodes_.size() + to]; }
  const std::vector<std::size_t>& successors(std::size_t i) const { return succ_[i]; }
  const std::vector<std::size_t>& predecessors(std::size_t i) const { return pred_[i]; }
  std::size_t edge_count() const { return edges_; }

  /// Edges as (from, to) id pairs, sorted.
  std::vector<std::pair<std::string, std::string>> edge_list() const;

  /// True when a precedes b under the tie rule: smaller origin gap first,
  /// unbounded nodes last, then id.
  bool tie_less(std::size_t a, std::size_t b) const;

 private:
  std::string origin_;
  std::vector<std::string> nodes_;
  std::vector<std::optional<Wide<T>>> origin_gap_;
  std::vector<bool> adj_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::vector<std::size_t>> pred_;
  std::size_t edges_ = 0;
};

enum class PruneMethod { kNone, kBaseline, kApcDag };

std::string_view to_string(PruneMethod m);
PruneMethod parse_prune_method(std::string_view text);

enum class PruneReason {
  kEmpty,           // zero rows
  kCloserSet,       // closer partitions hold at least k points
  kBeyondPruneDist  // baseline: BMinDist exceeds PruneDist
};

std::string_view to_string(PruneReason r);

template <Scalar T>
struct PrunedPartition {
  std::string id;
  PruneReason reason = PruneReason::kEmpty;
  std::vector<std::string> closer_set;  // kCloserSet: partitions ordered ahead
  std::uint64_t closer_points = 0;      // kCloserSet: their total rows
  Wide<T> bmin_dist_sq{};               // kBeyondPruneDist
};

template <Scalar T>
struct PrunePlan {
  std::string origin;
  PruneMethod method = PruneMethod::kNone;
  std::vector<std::string> required;  // load order
  std::vector<PrunedPartition<T>> pruned;
  std::optional<Wide<T>> prune_dist_sq;  // baseline only; absent means unbounded

  bool is_pruned(const std::string& id) const;
};

/// Evaluates the optimized test over every ordered candidate pair.
template <Scalar T>
ProximityDag<T> build_dag(const PartitionMeta<T>& origin,
                          std::span<const PartitionMeta<T>> candidates);

/// Kahn's algorithm with the DAG's tie rule. Throws std::logic_error on a cycle.
template <Scalar T>
std::vector<std::string> topological_order(const ProximityDag<T>& dag);

/// Static k-saturation rule over the transitive closure: B is pruned when the
/// partitions ordered ahead of it hold at least k rows in total.
template <Scalar T>
PrunePlan<T> prune_by_dag(const ProximityDag<T>& dag, std::span<const PartitionMeta<T>> candidates,
                          std::uint64_t k);

/// Bound-to-bound baseline: saturate k in BMaxDist order, then drop every
/// partition whose BMinDist exceeds the saturating partition's BMaxDist.
template <Scalar T>
PrunePlan<T> prune_by_baseline(const PartitionMeta<T>& origin,
                               std::span<const PartitionMeta<T>> candidates, std::uint64_t k);

/// Everything with rows is required; the reference for the other methods.
template <Scalar T>
PrunePlan<T> prune_none(const PartitionMeta<T>& origin,
                        std::span<const PartitionMeta<T>> candidates);

/// Dispatches on method.
template <Scalar T>
PrunePlan<T> plan_for(PruneMethod method, const PartitionMeta<T>& origin,
                      std::span<const PartitionMeta<T>> candidates, std::uint64_t k);

extern template class ProximityDag<double>;
extern template class ProximityDag<std::int64_t>;

}  // namespace apc
