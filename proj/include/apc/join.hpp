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

// Exact AkNN join with partition pruning as its first stage. Each origin
// partition gets a PrunePlan; only the plan's required candidate partitions
// are read, and every origin row is matched against them by exhaustive scan.
// Whatever the pruning method, the output must equal the unpruned join.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "apc/ordering.hpp"
#include "apc/storage.hpp"

namespace apc {

template <Scalar T>
struct Neighbor {
  std::string partition;
  std::uint64_t row = 0;
  Wide<T> dist_sq{};

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// k nearest candidates of one origin row, ascending by distance; equal
/// distances are ordered by (partition id, row).
template <Scalar T>
struct NeighborList {
  std::string origin_partition;
  std::uint64_t row = 0;
  std::vector<Neighbor<T>> neighbors;

  friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

struct OriginReport {
  std::string origin;
  std::size_t candidates = 0;
  std::size_t pruned = 0;
  std::size_t loaded = 0;
  std::vector<std::string> loaded_ids;  // in plan order
  std::uint64_t points_compared = 0;
  bool skipped_empty = false;
};

struct JoinReport {
  PruneMethod method = PruneMethod::kNone;
  std::uint64_t k = 0;
  std::vector<OriginReport> origins;
  std::vector<std::string> warnings;
  double plan_seconds = 0;
  double load_seconds = 0;
  double compute_seconds = 0;

  std::size_t total_loaded() const;
  std::size_t total_pruned() const;
};

template <Scalar T>
struct JoinResult {
  std::vector<NeighborList<T>> lists;  // origin partitions by ascending id, rows ascending
  JoinReport report;
};

struct JoinOptions {
  bool validate = false;  // check every loaded row against its declared bounds
};

template <Scalar T>
JoinResult<T> aknn_join(const DatasetManifest& origin, const DatasetManifest& candidates,
                        std::uint64_t k, PruneMethod method, const JoinOptions& options = {});

/// A partition's rows tagged with its id.
template <Scalar T>
struct LabeledPoints {
  std::string id;
  PointSet<T> points;
};

/// Exhaustive reference: scores every candidate row for every origin row and
/// fully sorts. Shares no code with the join's selection path.
template <Scalar T>
std::vector<NeighborList<T>> brute_force_oracle(std::span<const LabeledPoints<T>> origin,
                                                std::span<const LabeledPoints<T>> candidates,
                                                std::uint64_t k);

/// Newline-delimited JSON, one record per origin row.
template <Scalar T>
void write_neighbor_lists(std::ostream& out, std::span<const NeighborList<T>> lists);

template <Scalar T>
std::string neighbor_lists_ndjson(std::span<const NeighborList<T>> lists);

std::string to_json(const JoinReport& report);

}  // namespace apc
