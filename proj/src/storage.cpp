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

#include "apc/storage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace apc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

template <Scalar T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <Scalar T>
ordered_json bound_array(std::span<const T> values) {
  ordered_json arr = ordered_json::array();
  for (T v : values) arr.push_back(v);
  return arr;
}

template <Scalar T>
std::vector<T> parse_bound_array(const ordered_json& arr, std::size_t dims, const std::string& id) {
  if (!arr.is_array() || arr.size() != dims) {
    throw DataError("partition '" + id + "': bounds must be arrays of length " + std::to_string(dims));
  }
  std::vector<T> out;
  out.reserve(dims);
  for (const auto& v : arr) {
    if constexpr (std::same_as<T, std::int64_t>) {
      if (!v.is_number_integer()) throw DataError("partition '" + id + "': int64 bound is not an integer");
    } else {
      if (!v.is_number()) throw DataError("partition '" + id + "': bound is not a number");
    }
    const T value = v.get<T>();
    if (!admissible(value)) throw DataError("partition '" + id + "': bound out of range");
    out.push_back(value);
  }
  return out;
}

template <Scalar T>
void write_values(const fs::path& file, std::span<const T> values) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + file.string() + " for writing");
  std::vector<T> buf(values.begin(), values.end());
  for (T& v : buf) v = to_little_endian(v);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(T)));
  if (!out) throw DataError("write failed for " + file.string());
}

std::string partition_file_name(std::size_t index) {
  std::ostringstream name;
  name << "part-" << std::setw(5) << std::setfill('0') << index << ".bin";
  return name.str();
}

template <Scalar T>
std::optional<std::string> first_outside(const PointSet<T>& points, const Aabb<T>& bounds,
                                         const std::string& id) {
  for (std::size_t r = 0; r < points.size(); ++r) {
    if (!bounds.contains(points.row(r))) {
      return "partition '" + id + "' row " + std::to_string(r) + " lies outside its bounds";
    }
  }
  return std::nullopt;
}

}  // namespace

const PartitionEntry& DatasetManifest::partition(const std::string& id) const {
  for (const auto& p : partitions) {
    if (p.id == id) return p;
  }
  throw UsageError("unknown partition id '" + id + "' in dataset '" + name + "'");
}

std::uint64_t DatasetManifest::total_count() const {
  std::uint64_t total = 0;
  for (const auto& p : partitions) total += p.count;
  return total;
}

DatasetManifest DatasetManifest::select(std::span<const std::string> ids) const {
  DatasetManifest out = *this;
  out.partitions.clear();
  for (const auto& id : ids) out.partitions.push_back(partition(id));
  return out;
}

template <Scalar T>
PartitionStats<T> compute_stats(const PointSet<T>& points) {
  PartitionStats<T> stats;
  stats.count = points.size();
  if (points.empty()) return stats;
  std::vector<T> lo(points.row(0).begin(), points.row(0).end());
  std::vector<T> hi = lo;
  for (std::size_t r = 1; r < points.size(); ++r) {
    auto row = points.row(r);
    for (std::size_t d = 0; d < points.dims; ++d) {
      lo[d] = std::min(lo[d], row[d]);
      hi[d] = std::max(hi[d], row[d]);
    }
  }
  stats.bounds = Aabb<T>::from_bounds(lo, hi);
  return stats;
}

std::string to_json(const DatasetManifest& manifest) {
  ordered_json doc;
  doc["name"] = manifest.name;
  doc["dims"] = manifest.dims;
  doc["scalar_kind"] = std::string(to_string(manifest.scalar_kind));
  ordered_json parts = ordered_json::array();
  for (const auto& p : manifest.partitions) {
    ordered_json entry;
    entry["id"] = p.id;
    entry["path"] = p.path;
    entry["count"] = p.count;
    if (p.bounds) {
      std::visit(
          [&](const auto& box) {
            const auto lo = box.lo();
            const auto hi = box.hi();
            entry["lo"] = bound_array<typename std::decay_t<decltype(lo)>::value_type>(lo);
            entry["hi"] = bound_array<typename std::decay_t<decltype(hi)>::value_type>(hi);
          },
          *p.bounds);
    } else {
      entry["lo"] = nullptr;
      entry["hi"] = nullptr;
    }
    parts.push_back(std::move(entry));
  }
  doc["partitions"] = std::move(parts);
  return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest is not valid JSON: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.name = doc.at("name").get<std::string>();
    const auto dims = doc.at("dims").get<std::int64_t>();
    if (dims < 1) throw DataError("manifest dims must be positive");
    m.dims = static_cast<std::size_t>(dims);
    m.scalar_kind = parse_scalar_kind(doc.at("scalar_kind").get<std::string>());
    std::unordered_set<std::string> ids;
    for (const auto& entry : doc.at("partitions")) {
      PartitionEntry p;
      p.id = entry.at("id").get<std::string>();
      if (!ids.insert(p.id).second) throw DataError("duplicate partition id '" + p.id + "'");
      p.path = entry.at("path").get<std::string>();
      const auto count = entry.at("count").get<std::int64_t>();
      if (count < 0) throw DataError("partition '" + p.id + "' has negative count");
      p.count = static_cast<std::uint64_t>(count);
      const bool has_lo = entry.contains("lo") && !entry["lo"].is_null();
      const bool has_hi = entry.contains("hi") && !entry["hi"].is_null();
      if (has_lo != has_hi) throw DataError("partition '" + p.id + "' has only one of lo/hi");
      if (has_lo) {
        visit_scalar(m.scalar_kind, [&]<Scalar T>(T) {
          auto lo = parse_bound_array<T>(entry["lo"], m.dims, p.id);
          auto hi = parse_bound_array<T>(entry["hi"], m.dims, p.id);
          try {
            p.bounds = Aabb<T>::from_bounds(lo, hi);
          } catch (const UsageError& e) {
            throw DataError("partition '" + p.id + "': " + e.what());
          }
        });
      } else if (p.count > 0) {
        throw DataError("partition '" + p.id + "' has rows but no bounds");
      }
      m.partitions.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  const fs::path file = fs::is_directory(path) ? path / kManifestFile : path;
  std::ifstream in(file);
  if (!in) throw DataError("cannot open manifest " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  DatasetManifest m = manifest_from_json(buf.str());
  m.root = file.parent_path();
  return m;
}

template <Scalar T>
DatasetManifest write_dataset(const fs::path& dir, const std::string& name, std::size_t dims,
                              std::span<const PartitionData<T>> partitions) {
  if (dims == 0) throw UsageError("dims must be positive");
  DatasetManifest m;
  m.name = name;
  m.dims = dims;
  m.scalar_kind = ScalarTraits<T>::kind;
  m.root = dir;

  // Validate everything before touching the filesystem.
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& part = partitions[i];
    if (!ids.insert(part.id).second) throw DataError("duplicate partition id '" + part.id + "'");
    if (part.points.dims != dims) {
      throw DataError("partition '" + part.id + "' has dimensionality " +
                      std::to_string(part.points.dims) + ", expected " + std::to_string(dims));
    }
    for (T v : part.points.data) {
      if (!admissible(v)) throw DataError("partition '" + part.id + "' holds an out-of-range value");
    }
    PartitionEntry entry;
    entry.id = part.id;
    entry.path = partition_file_name(i);
    entry.count = part.points.size();
    if (part.bounds) {
      if (part.bounds->dims() != dims) throw DataError("partition '" + part.id + "' bounds have wrong dims");
      for (const auto& iv : part.bounds->intervals()) {
        if (!admissible(iv.lo) || !admissible(iv.hi)) {
          throw DataError("partition '" + part.id + "' bounds out of range");
        }
      }
      if (auto problem = first_outside(part.points, *part.bounds, part.id)) throw DataError(*problem);
      entry.bounds = *part.bounds;
    } else if (auto stats = compute_stats(part.points); stats.bounds) {
      entry.bounds = *stats.bounds;
    }
    m.partitions.push_back(std::move(entry));
  }

  fs::create_directories(dir);
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    write_values<T>(dir / m.partitions[i].path, partitions[i].points.data);
  }
  std::ofstream out(dir / kManifestFile, std::ios::trunc);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << to_json(m);
  if (!out) throw DataError("manifest write failed in " + dir.string());
  return m;
}

template <Scalar T>
PointSet<T> read_partition(const DatasetManifest& manifest, const std::string& id, bool validate) {
  if (manifest.scalar_kind != ScalarTraits<T>::kind) {
    throw UsageError("dataset '" + manifest.name + "' stores " +
                     std::string(to_string(manifest.scalar_kind)));
  }
  const PartitionEntry& entry = manifest.partition(id);
  const fs::path file = manifest.root / entry.path;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("partition '" + id + "': missing data file " + file.string());

  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  const std::uint64_t expected = entry.count * manifest.dims * sizeof(T);
  if (bytes != expected) {
    throw DataError("partition '" + id + "': file length " + std::to_string(bytes) +
                    " bytes, manifest implies " + std::to_string(expected));
  }

  std::vector<T> values(entry.count * manifest.dims);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(expected));
  if (!in && expected > 0) throw DataError("partition '" + id + "': short read");
  for (T& v : values) v = to_little_endian(v);
  PointSet<T> points(manifest.dims, std::move(values));

  if (validate) {
    for (T v : points.data) {
      if (!admissible(v)) throw DataError("partition '" + id + "' holds an out-of-range value");
    }
    if (entry.bounds) {
      if (auto problem = first_outside(points, std::get<Aabb<T>>(*entry.bounds), id)) {
        throw DataError(*problem);
      }
    }
  }
  return points;
}

template <Scalar T>
std::vector<PartitionMeta<T>> partition_metas(const DatasetManifest& manifest) {
  if (manifest.scalar_kind != ScalarTraits<T>::kind) {
    throw UsageError("dataset '" + manifest.name + "' stores " +
                     std::string(to_string(manifest.scalar_kind)));
  }
  std::vector<PartitionMeta<T>> out;
  out.reserve(manifest.partitions.size());
  for (const auto& p : manifest.partitions) {
    PartitionMeta<T> meta{p.id, std::nullopt, p.count};
    if (p.bounds) meta.bounds = std::get<Aabb<T>>(*p.bounds);
    out.push_back(std::move(meta));
  }
  return out;
}

std::vector<std::string> verify_dataset(const DatasetManifest& manifest) {
  std::vector<std::string> problems;
  for (const auto& p : manifest.partitions) {
    try {
      visit_scalar(manifest.scalar_kind, [&]<Scalar T>(T) {
        const PointSet<T> points = read_partition<T>(manifest, p.id, true);
        if (points.size() != p.count) problems.push_back("partition '" + p.id + "': row count mismatch");
      });
    } catch (const DataError& e) {
      problems.emplace_back(e.what());
    }
  }
  return problems;
}

// Synthetic data ------------------------------------------------------------

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::kUniformGridCells:
      return "uniform-grid-cells";
    case Layout::kGaussianClusters:
      return "gaussian-clusters";
    case Layout::kOverlappingRandomBoxes:
      return "overlapping-random-boxes";
    case Layout::kFourBox:
      return "fig3";
  }
  return "?";
}

Layout parse_layout(std::string_view text) {
  for (Layout l : {Layout::kUniformGridCells, Layout::kGaussianClusters,
                   Layout::kOverlappingRandomBoxes, Layout::kFourBox}) {
    if (text == to_string(l)) return l;
  }
  throw UsageError("unknown layout '" + std::string(text) + "'");
}

void validate(const GeneratorSpec& spec) {
  if (spec.layout == Layout::kFourBox) {
    if (spec.scalar_kind != ScalarKind::kFloat64) throw UsageError("fig3 layout is float64 only");
    return;
  }
  if (spec.dims == 0) throw UsageError("dims must be positive");
  if (spec.dims > 64) throw UsageError("dims above 64 are not supported by the generator");
  if (spec.partitions == 0) throw UsageError("partitions must be positive");
  if (spec.min_points && *spec.min_points > spec.points) {
    throw UsageError("min-points exceeds points");
  }
  if (!(spec.slack >= 0.0) || !std::isfinite(spec.slack)) throw UsageError("slack must be >= 0");
}

namespace {

// Coordinates are produced in a [0, kDomain] cube and scaled for int64 so the
// integer datasets keep useful resolution.
constexpr double kDomain = 1000.0;

template <Scalar T>
constexpr double scale() {
  return std::same_as<T, double> ? 1.0 : 1000.0;
}

template <Scalar T>
T quantize(double v) {
  if constexpr (std::same_as<T, double>) {
    return v;
  } else {
    return static_cast<std::int64_t>(std::llround(v * scale<T>()));
  }
}

template <Scalar T>
Aabb<T> widen_bounds(const Aabb<T>& box, double slack) {
  if (slack <= 0.0) return box;
  std::vector<Interval<T>> dims(box.intervals().begin(), box.intervals().end());
  T pad;
  if constexpr (std::same_as<T, double>) {
    pad = slack;
  } else {
    pad = static_cast<std::int64_t>(std::ceil(slack));
  }
  for (auto& iv : dims) {
    iv.lo -= pad;
    iv.hi += pad;
  }
  return Aabb<T>(std::move(dims));
}

std::vector<PartitionData<double>> four_box_partitions() {
  struct Box {
    const char* id;
    double xlo, xhi, ylo, yhi;
  };
  const Box boxes[] = {{"O", -3, 0, 0, 3}, {"P1", -5, -4, 2, 3}, {"P2", 1, 2, 2, 3}, {"P3", 4, 5, 0, 2}};
  std::vector<PartitionData<double>> out;
  for (const Box& b : boxes) {
    PartitionData<double> part{b.id, PointSet<double>(2), Aabb<double>{{b.xlo, b.xhi}, {b.ylo, b.yhi}}};
    const double center[] = {(b.xlo + b.xhi) / 2, (b.ylo + b.yhi) / 2};
    part.points.push_back(center);
    out.push_back(std::move(part));
  }
  return out;
}

std::string partition_id(std::size_t i, std::size_t total) {
  std::ostringstream id;
  const int width = static_cast<int>(std::to_string(total == 0 ? 0 : total - 1).size());
  id << 'p' << std::setw(std::max(width, 3)) << std::setfill('0') << i;
  return id.str();
}

}  // namespace

template <Scalar T>
std::vector<PartitionData<T>> generate_partitions(const GeneratorSpec& spec) {
  validate(spec);
  if constexpr (std::same_as<T, double>) {
    if (spec.layout == Layout::kFourBox) return four_box_partitions();
  }
  if (ScalarTraits<T>::kind != spec.scalar_kind) throw UsageError("generator scalar kind mismatch");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dims = spec.dims;
  const auto cells_per_axis = static_cast<std::size_t>(
      std::ceil(std::pow(static_cast<double>(spec.partitions), 1.0 / static_cast<double>(dims)) - 1e-9));

  std::vector<PartitionData<T>> out;
  out.reserve(spec.partitions);
  for (std::size_t i = 0; i < spec.partitions; ++i) {
    std::size_t rows = spec.points;
    if (spec.min_points) {
      rows = std::uniform_int_distribution<std::size_t>(*spec.min_points, spec.points)(rng);
    }

    // Per-partition sampling region; gaussian clusters use center/sigma instead.
    std::vector<double> lo(dims), hi(dims), center(dims);
    double sigma = 0.0;
    switch (spec.layout) {
      case Layout::kUniformGridCells: {
        const double width = kDomain / static_cast<double>(cells_per_axis);
        std::size_t code = i;
        for (std::size_t d = 0; d < dims; ++d) {
          const auto cell = static_cast<double>(code % cells_per_axis);
          code /= cells_per_axis;
          lo[d] = (cell + 0.05) * width;
          hi[d] = (cell + 0.95) * width;
        }
        break;
      }
      case Layout::kGaussianClusters: {
        for (double& c : center) c = kDomain * (0.1 + 0.8 * unit(rng));
        sigma = kDomain / (8.0 * static_cast<double>(cells_per_axis)) * (0.5 + unit(rng));
        break;
      }
      case Layout::kOverlappingRandomBoxes: {
        for (std::size_t d = 0; d < dims; ++d) {
          const double c = kDomain * unit(rng);
          const double half = kDomain * (0.05 + 0.25 * unit(rng));
          lo[d] = c - half;
          hi[d] = c + half;
        }
        break;
      }
      case Layout::kFourBox:
        throw UsageError("fig3 layout is float64 only");
    }

    PointSet<T> points(dims);
    points.data.reserve(rows * dims);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t d = 0; d < dims; ++d) {
        const double v = spec.layout == Layout::kGaussianClusters
                             ? center[d] + sigma * normal(rng)
                             : lo[d] + (hi[d] - lo[d]) * unit(rng);
        points.data.push_back(quantize<T>(v));
      }
    }

    PartitionData<T> part{partition_id(i, spec.partitions), std::move(points), std::nullopt};
    if (auto stats = compute_stats(part.points); stats.bounds) {
      part.bounds = widen_bounds(*stats.bounds, spec.slack);
    }
    out.push_back(std::move(part));
  }
  return out;
}

DatasetManifest generate_dataset(const GeneratorSpec& spec, const fs::path& dir) {
  validate(spec);
  if (spec.layout == Layout::kFourBox) {
    auto parts = generate_partitions<double>(spec);
    return write_dataset<double>(dir, spec.name, 2, parts);
  }
  return visit_scalar(spec.scalar_kind, [&]<Scalar T>(T) {
    auto parts = generate_partitions<T>(spec);
    return write_dataset<T>(dir, spec.name, spec.dims, parts);
  });
}

#define APC_INSTANTIATE_STORAGE(T)                                                                 \
  template PartitionStats<T> compute_stats(const PointSet<T>&);                                     \
  template DatasetManifest write_dataset(const fs::path&, const std::string&, std::size_t,          \
                                         std::span<const PartitionData<T>>);                        \
  template PointSet<T> read_partition(const DatasetManifest&, const std::string&, bool);            \
  template std::vector<PartitionMeta<T>> partition_metas(const DatasetManifest&);                   \
  template std::vector<PartitionData<T>> generate_partitions(const GeneratorSpec&);

APC_INSTANTIATE_STORAGE(double)
APC_INSTANTIATE_STORAGE(std::int64_t)

#undef APC_INSTANTIATE_STORAGE

}  // namespace apc
