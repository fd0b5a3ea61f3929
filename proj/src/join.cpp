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

#include "apc/join.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace apc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_compatible(const DatasetManifest& a, const DatasetManifest& b) {
  if (a.dims != b.dims) {
    throw UsageError("datasets differ in dimensionality: " + std::to_string(a.dims) + " vs " +
                     std::to_string(b.dims));
  }
  if (a.scalar_kind != b.scalar_kind) {
    throw UsageError("datasets differ in scalar kind: " + std::string(to_string(a.scalar_kind)) +
                     " vs " + std::string(to_string(b.scalar_kind)));
  }
}

// Heap entry. `rank` is the candidate partition's position in ascending id
// order, so comparing ranks is comparing ids.
template <Scalar T>
struct Scored {
  Wide<T> dist;
  std::size_t rank;
  std::uint64_t row;

  bool operator<(const Scored& o) const {
    return std::tie(dist, rank, row) < std::tie(o.dist, o.rank, o.row);
  }
};

}  // namespace

std::size_t JoinReport::total_loaded() const {
  std::size_t n = 0;
  for (const auto& o : origins) n += o.loaded;
  return n;
}

std::size_t JoinReport::total_pruned() const {
  std::size_t n = 0;
  for (const auto& o : origins) n += o.pruned;
  return n;
}

template <Scalar T>
JoinResult<T> aknn_join(const DatasetManifest& origin, const DatasetManifest& candidates,
                        std::uint64_t k, PruneMethod method, const JoinOptions& options) {
  if (k == 0) throw UsageError("k must be at least 1");
  check_compatible(origin, candidates);
  if (origin.scalar_kind != ScalarTraits<T>::kind) throw UsageError("join scalar type mismatch");

  JoinResult<T> result;
  result.report.method = method;
  result.report.k = k;
  if (candidates.total_count() == 0) {
    result.report.warnings.push_back("candidate dataset holds no rows; neighbor lists are empty");
  }

  const std::vector<PartitionMeta<T>> cand_meta = partition_metas<T>(candidates);
  std::vector<PartitionMeta<T>> origin_meta = partition_metas<T>(origin);
  std::sort(origin_meta.begin(), origin_meta.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  std::map<std::string, std::size_t> rank_of;
  for (const auto& c : cand_meta) rank_of.emplace(c.id, 0);
  std::vector<std::string> id_of_rank;
  for (auto& [id, rank] : rank_of) {
    rank = id_of_rank.size();
    id_of_rank.push_back(id);
  }

  // Candidate partitions are read at most once and shared across origins.
  std::map<std::string, PointSet<T>> cache;
  auto load = [&](const std::string& id) -> const PointSet<T>& {
    auto it = cache.find(id);
    if (it == cache.end()) {
      const auto start = Clock::now();
      it = cache.emplace(id, read_partition<T>(candidates, id, options.validate)).first;
      result.report.load_seconds += seconds_since(start);
    }
    return it->second;
  };

  for (const auto& om : origin_meta) {
    OriginReport rep;
    rep.origin = om.id;
    rep.candidates = cand_meta.size();
    if (om.count == 0) {
      rep.skipped_empty = true;
      rep.pruned = rep.candidates;
      result.report.origins.push_back(std::move(rep));
      continue;
    }

    auto start = Clock::now();
    const PrunePlan<T> plan = plan_for<T>(method, om, cand_meta, k);
    result.report.plan_seconds += seconds_since(start);
    rep.pruned = plan.pruned.size();
    rep.loaded = plan.required.size();
    rep.loaded_ids = plan.required;

    start = Clock::now();
    const PointSet<T> queries = read_partition<T>(origin, om.id, options.validate);
    result.report.load_seconds += seconds_since(start);
    std::vector<std::pair<std::size_t, const PointSet<T>*>> sources;
    for (const auto& id : plan.required) sources.emplace_back(rank_of.at(id), &load(id));

    start = Clock::now();
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const auto query = queries.row(q);
      std::priority_queue<Scored<T>> best;  // max-heap holding the k best so far
      for (const auto& [rank, points] : sources) {
        for (std::size_t r = 0; r < points->size(); ++r) {
          Scored<T> s{dist_sq<T>(query, points->row(r)), rank, r};
          if (best.size() < k) {
            best.push(s);
          } else if (s < best.top()) {
            best.pop();
            best.push(s);
          }
        }
        rep.points_compared += points->size();
      }
      NeighborList<T> list{om.id, q, {}};
      list.neighbors.resize(best.size());
      for (std::size_t i = best.size(); i-- > 0;) {
        const Scored<T>& s = best.top();
        list.neighbors[i] = {id_of_rank[s.rank], s.row, s.dist};
        best.pop();
      }
      result.lists.push_back(std::move(list));
    }
    result.report.compute_seconds += seconds_since(start);
    result.report.origins.push_back(std::move(rep));
  }
  return result;
}

template <Scalar T>
std::vector<NeighborList<T>> brute_force_oracle(std::span<const LabeledPoints<T>> origin,
                                                std::span<const LabeledPoints<T>> candidates,
                                                std::uint64_t k) {
  if (k == 0) throw UsageError("k must be at least 1");
  std::vector<const LabeledPoints<T>*> origins;
  for (const auto& o : origin) origins.push_back(&o);
  std::sort(origins.begin(), origins.end(), [](auto* a, auto* b) { return a->id < b->id; });

  std::vector<NeighborList<T>> out;
  for (const auto* o : origins) {
    for (std::size_t q = 0; q < o->points.size(); ++q) {
      std::vector<Neighbor<T>> all;
      for (const auto& c : candidates) {
        for (std::size_t r = 0; r < c.points.size(); ++r) {
          all.push_back({c.id, r, dist_sq<T>(o->points.row(q), c.points.row(r))});
        }
      }
      std::sort(all.begin(), all.end(), [](const Neighbor<T>& a, const Neighbor<T>& b) {
        return std::tie(a.dist_sq, a.partition, a.row) < std::tie(b.dist_sq, b.partition, b.row);
      });
      if (all.size() > k) all.resize(k);
      out.push_back({o->id, q, std::move(all)});
    }
  }
  return out;
}

template <Scalar T>
void write_neighbor_lists(std::ostream& out, std::span<const NeighborList<T>> lists) {
  for (const auto& list : lists) {
    out << "{\"origin_partition\":" << nlohmann::json(list.origin_partition).dump()
        << ",\"row\":" << list.row << ",\"neighbors\":[";
    for (std::size_t i = 0; i < list.neighbors.size(); ++i) {
      const auto& n = list.neighbors[i];
      if (i > 0) out << ',';
      out << "{\"partition\":" << nlohmann::json(n.partition).dump() << ",\"row\":" << n.row
          << ",\"dist_sq\":" << format_wide(n.dist_sq) << '}';
    }
    out << "]}\n";
  }
}

template <Scalar T>
std::string neighbor_lists_ndjson(std::span<const NeighborList<T>> lists) {
  std::ostringstream out;
  write_neighbor_lists<T>(out, lists);
  return out.str();
}

std::string to_json(const JoinReport& report) {
  nlohmann::ordered_json doc;
  doc["method"] = std::string(to_string(report.method));
  doc["k"] = report.k;
  doc["candidates_loaded"] = report.total_loaded();
  doc["candidates_pruned"] = report.total_pruned();
  nlohmann::ordered_json origins = nlohmann::ordered_json::array();
  for (const auto& o : report.origins) {
    nlohmann::ordered_json entry;
    entry["origin"] = o.origin;
    entry["candidates"] = o.candidates;
    entry["pruned"] = o.pruned;
    entry["loaded"] = o.loaded;
    entry["loaded_ids"] = o.loaded_ids;
    entry["points_compared"] = o.points_compared;
    if (o.skipped_empty) entry["skipped_empty"] = true;
    origins.push_back(std::move(entry));
  }
  doc["origins"] = std::move(origins);
  doc["seconds"] = {{"plan", report.plan_seconds},
                    {"load", report.load_seconds},
                    {"compute", report.compute_seconds}};
  doc["warnings"] = report.warnings;
  return doc.dump(2) + "\n";
}

#define APC_INSTANTIATE_JOIN(T)                                                                    \
  template JoinResult<T> aknn_join(const DatasetManifest&, const DatasetManifest&, std::uint64_t,  \
                                   PruneMethod, const JoinOptions&);                               \
  template std::vector<NeighborList<T>> brute_force_oracle(std::span<const LabeledPoints<T>>,      \
                                                           std::span<const LabeledPoints<T>>,      \
                                                           std::uint64_t);                         \
  template void write_neighbor_lists(std::ostream&, std::span<const NeighborList<T>>);             \
  template std::string neighbor_lists_ndjson(std::span<const NeighborList<T>>);

APC_INSTANTIATE_JOIN(double)
APC_INSTANTIATE_JOIN(std::int64_t)

#undef APC_INSTANTIATE_JOIN

}  // namespace apc
