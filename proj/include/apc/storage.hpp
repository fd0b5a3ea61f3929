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

// On-disk partitioned datasets. A dataset is a directory holding
// `manifest.json` plus one headerless data file per partition. Data files are
// row-major little-endian arrays of 8-byte scalars (IEEE-754 doubles or two's
// complement int64); all metadata, including the per-partition bounds that
// play the role of row-group min/max statistics, lives in the manifest.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "apc/geometry.hpp"
#include "apc/ordering.hpp"

namespace apc {

inline constexpr const char* kManifestFile = "manifest.json";

/// Row-major point block with a fixed dimensionality.
template <Scalar T>
struct PointSet {
  std::size_t dims = 0;
  std::vector<T> data;

  PointSet() = default;
  explicit PointSet(std::size_t d, std::vector<T> values = {}) : dims(d), data(std::move(values)) {
    if (dims == 0) throw UsageError("point set needs at least one dimension");
    if (data.size() % dims != 0) throw UsageError("point data not a multiple of dims");
  }

  std::size_t size() const { return dims == 0 ? 0 : data.size() / dims; }
  bool empty() const { return data.empty(); }
  std::span<const T> row(std::size_t i) const { return {data.data() + i * dims, dims}; }
  void push_back(std::span<const T> p) {
    detail::check_dims(p.size(), dims);
    data.insert(data.end(), p.begin(), p.end());
  }
};

using AnyAabb = std::variant<Aabb<double>, Aabb<std::int64_t>>;

struct PartitionEntry {
  std::string id;
  std::string path;  // relative to the dataset directory
  std::uint64_t count = 0;
  std::optional<AnyAabb> bounds;
};

struct DatasetManifest {
  std::string name;
  std::size_t dims = 0;
  ScalarKind scalar_kind = ScalarKind::kFloat64;
  std::vector<PartitionEntry> partitions;
  std::filesystem::path root;  // directory the manifest was loaded from; not serialized

  const PartitionEntry& partition(const std::string& id) const;
  std::uint64_t total_count() const;

  /// Copy restricted to the given ids, in the given order.
  DatasetManifest select(std::span<const std::string> ids) const;
};

template <Scalar T>
struct PartitionStats {
  std::optional<Aabb<T>> bounds;  // tight per-dimension [min, max]; absent when empty
  std::uint64_t count = 0;
};

template <Scalar T>
PartitionStats<T> compute_stats(const PointSet<T>& points);

/// Partition contents to be written. Bounds default to the tight stats.
template <Scalar T>
struct PartitionData {
  std::string id;
  PointSet<T> points;
  std::optional<Aabb<T>> bounds;
};

std::string to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);

/// Accepts either the dataset directory or the manifest file itself.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Writes data files and the manifest into dir (created if needed). Throws
/// DataError when declared bounds miss a point or a value is out of range.
template <Scalar T>
DatasetManifest write_dataset(const std::filesystem::path& dir, const std::string& name,
                              std::size_t dims, std::span<const PartitionData<T>> partitions);

/// Reads one partition. With validate set, every row is checked against the
/// declared bounds.
template <Scalar T>
PointSet<T> read_partition(const DatasetManifest& manifest, const std::string& id,
                           bool validate = false);

/// Typed zone-map view of the manifest.
template <Scalar T>
std::vector<PartitionMeta<T>> partition_metas(const DatasetManifest& manifest);

/// Full consistency check: files exist, lengths match counts, points lie in
/// bounds. Returns one message per problem found.
std::vector<std::string> verify_dataset(const DatasetManifest& manifest);

// Synthetic data.

enum class Layout { kUniformGridCells, kGaussianClusters, kOverlappingRandomBoxes, kFourBox };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

struct GeneratorSpec {
  std::string name = "synthetic";
  std::size_t dims = 2;
  ScalarKind scalar_kind = ScalarKind::kFloat64;
  std::size_t partitions = 8;
  std::size_t points = 100;      // rows per partition (upper end when min_points is set)
  std::optional<std::size_t> min_points;  // rows drawn uniformly from [min_points, points]
  Layout layout = Layout::kUniformGridCells;
  std::uint64_t seed = 1;
  double slack = 0.0;  // widens every declared bound by this many coordinate units
};

void validate(const GeneratorSpec& spec);

/// Deterministic for a fixed spec. The fig3 layout ignores dims, partitions
/// and points and yields partitions O, P1, P2, P3 with one centred row each.
template <Scalar T>
std::vector<PartitionData<T>> generate_partitions(const GeneratorSpec& spec);

DatasetManifest generate_dataset(const GeneratorSpec& spec, const std::filesystem::path& dir);

}  // namespace apc
