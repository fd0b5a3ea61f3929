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

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "test_support.hpp"

namespace apc {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

template <Scalar T>
PartitionData<T> part(std::string id, std::size_t dims, std::vector<T> values,
                      std::optional<Aabb<T>> bounds = std::nullopt) {
  return {std::move(id), PointSet<T>(dims, std::move(values)), std::move(bounds)};
}

TEST(ComputeStats, Examples) {
  const auto two = compute_stats(PointSet<double>(2, {1, 2, 3, 0}));
  EXPECT_EQ(two.count, 2u);
  ASSERT_TRUE(two.bounds.has_value());
  EXPECT_EQ(two.bounds->lo(), (std::vector<double>{1, 0}));
  EXPECT_EQ(two.bounds->hi(), (std::vector<double>{3, 2}));

  const auto one = compute_stats(PointSet<std::int64_t>(3, {4, -5, 6}));
  EXPECT_EQ(one.count, 1u);
  EXPECT_EQ(one.bounds->lo(), one.bounds->hi());

  const auto none = compute_stats(PointSet<double>(2));
  EXPECT_EQ(none.count, 0u);
  EXPECT_FALSE(none.bounds.has_value());
}

TEST(WriteDataset, FourBoxLayoutFileSizes) {
  TempDir dir("four-box");
  GeneratorSpec spec;
  spec.layout = Layout::kFourBox;
  spec.name = "fig3";
  const auto m = generate_dataset(spec, dir.path());
  ASSERT_EQ(m.partitions.size(), 4u);
  EXPECT_EQ(m.dims, 2u);
  EXPECT_EQ(m.scalar_kind, ScalarKind::kFloat64);
  for (const auto& p : m.partitions) {
    EXPECT_EQ(p.count, 1u);
    EXPECT_EQ(fs::file_size(dir.path() / p.path), 16u);
  }
  EXPECT_TRUE(fs::exists(dir.path() / kManifestFile));

  const auto metas = partition_metas<double>(load_manifest(dir.path()));
  ASSERT_EQ(metas.size(), 4u);
  const std::vector<std::string> ids{"O", "P1", "P2", "P3"};
  const std::vector<Aabb<double>> boxes{Aabb<double>{{-3, 0}, {0, 3}}, Aabb<double>{{-5, -4}, {2, 3}},
                                        Aabb<double>{{1, 2}, {2, 3}}, Aabb<double>{{4, 5}, {0, 2}}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(metas[i].id, ids[i]);
    EXPECT_EQ(metas[i].bounds->lo(), boxes[i].lo());
    EXPECT_EQ(metas[i].bounds->hi(), boxes[i].hi());
    const auto pts = read_partition<double>(load_manifest(dir.path()), ids[i], true);
    const auto& box = boxes[i];
    EXPECT_EQ(pts.row(0)[0], (box[0].lo + box[0].hi) / 2);
    EXPECT_EQ(pts.row(0)[1], (box[1].lo + box[1].hi) / 2);
  }
}

TEST(WriteDataset, EmptyPartitionIsZeroLength) {
  TempDir dir("empty");
  const std::vector<PartitionData<double>> parts{part<double>("a", 2, {}),
                                                  part<double>("b", 2, {1, 1})};
  const auto m = write_dataset<double>(dir.path(), "e", 2, parts);
  EXPECT_EQ(fs::file_size(dir.path() / m.partition("a").path), 0u);
  EXPECT_FALSE(m.partition("a").bounds.has_value());
  const auto loaded = load_manifest(dir.path() / kManifestFile);
  EXPECT_EQ(read_partition<double>(loaded, "a", true).size(), 0u);
  EXPECT_TRUE(verify_dataset(loaded).empty());
}

TEST(WriteDataset, IntegerRoundTripIsBitExact) {
  TempDir dir("int");
  const std::int64_t big = kMaxIntCoord;
  const std::vector<PartitionData<std::int64_t>> parts{
      part<std::int64_t>("x", 3, {big, -big, 0, 1, 2, 3})};
  write_dataset<std::int64_t>(dir.path(), "ints", 3, parts);
  const auto m = load_manifest(dir.path());
  EXPECT_EQ(m.scalar_kind, ScalarKind::kInt64);
  EXPECT_EQ(read_partition<std::int64_t>(m, "x").data, parts[0].points.data);

  // Little-endian two's complement on disk.
  const std::string raw = slurp(dir.path() / m.partition("x").path);
  ASSERT_EQ(raw.size(), 48u);
  std::uint8_t second[8];
  std::memcpy(second, raw.data() + 8, 8);
  const std::uint64_t expect = static_cast<std::uint64_t>(-big);
  for (int b = 0; b < 8; ++b) EXPECT_EQ(second[b], static_cast<std::uint8_t>(expect >> (8 * b)));
}

TEST(WriteDataset, FloatRoundTripIsBitExact) {
  TempDir dir("float");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<double> values(4 * 50);
  for (double& v : values) v = u(rng);
  values[0] = -0.0;
  values[1] = 5e-324;
  const std::vector<PartitionData<double>> parts{part<double>("f", 4, values)};
  write_dataset<double>(dir.path(), "f", 4, parts);
  const auto back = read_partition<double>(load_manifest(dir.path()), "f");
  ASSERT_EQ(back.data.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.data[i]), std::bit_cast<std::uint64_t>(values[i]));
  }
}

TEST(WriteDataset, RejectsInconsistentInput) {
  TempDir dir("bad");
  const std::vector<PartitionData<double>> outside{
      part<double>("a", 2, {5, 5}, Aabb<double>{{0, 1}, {0, 1}})};
  EXPECT_THROW(write_dataset<double>(dir.path(), "x", 2, outside), DataError);
  const std::vector<PartitionData<double>> dup{part<double>("a", 2, {1, 1}), part<double>("a", 2, {2, 2})};
  EXPECT_THROW(write_dataset<double>(dir.path(), "x", 2, dup), DataError);
  const std::vector<PartitionData<double>> wrong_dims{part<double>("a", 3, {1, 1, 1})};
  EXPECT_THROW(write_dataset<double>(dir.path(), "x", 2, wrong_dims), DataError);
  const std::vector<PartitionData<std::int64_t>> too_big{
      part<std::int64_t>("a", 1, {std::int64_t{1} << 40})};
  EXPECT_THROW(write_dataset<std::int64_t>(dir.path(), "x", 1, too_big), DataError);
  const std::vector<PartitionData<double>> nan{part<double>("a", 1, {std::nan("")})};
  EXPECT_THROW(write_dataset<double>(dir.path(), "x", 1, nan), DataError);
}

TEST(WriteDataset, LooseBoundsAreKept) {
  TempDir dir("loose");
  const Aabb<double> loose{{-10, 10}, {-10, 10}};
  const std::vector<PartitionData<double>> parts{part<double>("a", 2, {1, 1}, loose)};
  const auto m = write_dataset<double>(dir.path(), "x", 2, parts);
  EXPECT_EQ(std::get<Aabb<double>>(*m.partition("a").bounds).lo(), loose.lo());
  EXPECT_EQ(std::get<Aabb<double>>(*m.partition("a").bounds).hi(), loose.hi());
}

class CorruptDataset : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::vector<PartitionData<double>> parts{part<double>("a", 2, {0, 0, 1, 1}),
                                                    part<double>("b", 2, {5, 5})};
    manifest_ = write_dataset<double>(dir_.path(), "c", 2, parts);
  }
  fs::path file(const std::string& id) const { return dir_.path() / manifest_.partition(id).path; }

  TempDir dir_{"corrupt"};
  DatasetManifest manifest_;
};

TEST_F(CorruptDataset, TruncatedFileIsLengthMismatch) {
  fs::resize_file(file("a"), 24);
  const auto m = load_manifest(dir_.path());
  try {
    read_partition<double>(m, "a");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("length"), std::string::npos);
  }
  const auto problems = verify_dataset(m);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("'a'"), std::string::npos);
}

TEST_F(CorruptDataset, MissingFile) {
  fs::remove(file("b"));
  EXPECT_THROW(read_partition<double>(load_manifest(dir_.path()), "b"), DataError);
}

TEST_F(CorruptDataset, OutOfBoundsPointNamesPartitionAndRow) {
  std::string raw = slurp(file("a"));
  const double moved = 99.0;
  std::memcpy(raw.data() + 16, &moved, 8);
  spit(file("a"), raw);
  const auto m = load_manifest(dir_.path());
  EXPECT_NO_THROW(read_partition<double>(m, "a", false));
  try {
    read_partition<double>(m, "a", true);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("'a'"), std::string::npos) << what;
    EXPECT_NE(what.find("row 1"), std::string::npos) << what;
  }
  EXPECT_EQ(verify_dataset(m).size(), 1u);
}

TEST_F(CorruptDataset, UnknownIdAndWrongKind) {
  const auto m = load_manifest(dir_.path());
  EXPECT_THROW(read_partition<double>(m, "zzz"), UsageError);
  EXPECT_THROW(read_partition<std::int64_t>(m, "a"), UsageError);
}

TEST(Manifest, JsonShapeAndRoundTrip) {
  TempDir dir("json");
  const std::vector<PartitionData<double>> parts{part<double>("a", 2, {1, 2, 3, 0}),
                                                  part<double>("b", 2, {})};
  const auto m = write_dataset<double>(dir.path(), "shape", 2, parts);
  const auto j = nlohmann::json::parse(slurp(dir.path() / kManifestFile));
  EXPECT_EQ(j.at("name"), "shape");
  EXPECT_EQ(j.at("dims"), 2);
  EXPECT_EQ(j.at("scalar_kind"), "float64");
  ASSERT_EQ(j.at("partitions").size(), 2u);
  const auto& a = j.at("partitions")[0];
  EXPECT_EQ(a.at("id"), "a");
  EXPECT_EQ(a.at("path"), "part-00000.bin");
  EXPECT_EQ(a.at("count"), 2);
  EXPECT_EQ(a.at("lo"), nlohmann::json::array({1.0, 0.0}));
  EXPECT_EQ(a.at("hi"), nlohmann::json::array({3.0, 2.0}));
  EXPECT_TRUE(j.at("partitions")[1].at("lo").is_null());

  const auto again = manifest_from_json(to_json(m));
  EXPECT_EQ(to_json(again), to_json(m));
  EXPECT_EQ(again.total_count(), 2u);
}

TEST(Manifest, MalformedInputIsDataError) {
  EXPECT_THROW(manifest_from_json("{"), DataError);
  EXPECT_THROW(manifest_from_json(R"({"name":"x","dims":0,"scalar_kind":"float64","partitions":[]})"),
               DataError);
  EXPECT_THROW(manifest_from_json(R"({"name":"x","dims":1,"scalar_kind":"int32","partitions":[]})"),
               DataError);
  EXPECT_THROW(manifest_from_json(R"({"name":"x","dims":1,"scalar_kind":"float64","partitions":[
      {"id":"a","path":"a.bin","count":1,"lo":[0],"hi":null}]})"),
               DataError);
  EXPECT_THROW(manifest_from_json(R"({"name":"x","dims":1,"scalar_kind":"float64","partitions":[
      {"id":"a","path":"a.bin","count":1,"lo":[2],"hi":[1]}]})"),
               DataError);
  EXPECT_THROW(manifest_from_json(R"({"name":"x","dims":1,"scalar_kind":"int64","partitions":[
      {"id":"a","path":"a.bin","count":1,"lo":[0.5],"hi":[1]}]})"),
               DataError);
  EXPECT_THROW(manifest_from_json(R"({"name":"x","dims":1,"scalar_kind":"float64","partitions":[
      {"id":"a","path":"a.bin","count":0},{"id":"a","path":"b.bin","count":0}]})"),
               DataError);
  EXPECT_THROW(load_manifest("/nonexistent/apc/dataset"), DataError);
}

TEST(Manifest, SelectKeepsRequestedOrder) {
  TempDir dir("select");
  GeneratorSpec spec;
  spec.layout = Layout::kFourBox;
  const auto m = generate_dataset(spec, dir.path());
  const std::vector<std::string> ids{"P3", "O"};
  const auto sub = m.select(ids);
  ASSERT_EQ(sub.partitions.size(), 2u);
  EXPECT_EQ(sub.partitions[0].id, "P3");
  EXPECT_EQ(sub.partitions[1].id, "O");
  const std::vector<std::string> bad{"nope"};
  EXPECT_THROW(m.select(bad), UsageError);
}

TEST(Generator, DeterministicManifestBytes) {
  for (auto layout : {Layout::kUniformGridCells, Layout::kGaussianClusters,
                      Layout::kOverlappingRandomBoxes}) {
    for (auto kind : {ScalarKind::kFloat64, ScalarKind::kInt64}) {
      GeneratorSpec spec;
      spec.layout = layout;
      spec.scalar_kind = kind;
      spec.dims = 3;
      spec.partitions = 9;
      spec.points = 40;
      spec.min_points = 0;
      spec.seed = 77;
      spec.slack = 1.5;
      TempDir a("gen-a");
      TempDir b("gen-b");
      generate_dataset(spec, a.path());
      generate_dataset(spec, b.path());
      EXPECT_EQ(slurp(a / kManifestFile), slurp(b / kManifestFile));
      const auto m = load_manifest(a.path());
      for (const auto& p : m.partitions) EXPECT_EQ(slurp(a / p.path), slurp(b / p.path));
      EXPECT_TRUE(verify_dataset(m).empty());
      spec.seed = 78;
      TempDir c("gen-c");
      generate_dataset(spec, c.path());
      EXPECT_NE(slurp(a / kManifestFile), slurp(c / kManifestFile));
    }
  }
}

TEST(Generator, GridCellsAreSeparated) {
  GeneratorSpec spec;
  spec.dims = 2;
  spec.partitions = 9;
  spec.points = 30;
  const auto parts = generate_partitions<double>(spec);
  ASSERT_EQ(parts.size(), 9u);
  EXPECT_EQ(parts[0].id, "p000");
  // Cells 0 and 2 share a row but are not adjacent.
  EXPECT_GT(bmin_dist_sq(*parts[0].bounds, *parts[2].bounds), 0.0);
  EXPECT_GT(bmin_dist_sq(*parts[0].bounds, *parts[8].bounds), 0.0);
}

TEST(Generator, OverlappingBoxesOverlap) {
  GeneratorSpec spec;
  spec.layout = Layout::kOverlappingRandomBoxes;
  spec.dims = 2;
  spec.partitions = 20;
  spec.points = 50;
  const auto parts = generate_partitions<double>(spec);
  int overlaps = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      overlaps += bmin_dist_sq(*parts[i].bounds, *parts[j].bounds) == 0.0 ? 1 : 0;
    }
  }
  EXPECT_GT(overlaps, 20);
}

TEST(Generator, SlackWidensBounds) {
  GeneratorSpec spec;
  spec.partitions = 1;
  spec.points = 10;
  const auto tight = generate_partitions<double>(spec);
  spec.slack = 2.0;
  const auto loose = generate_partitions<double>(spec);
  for (std::size_t d = 0; d < 2; ++d) {
    EXPECT_EQ((*loose[0].bounds)[d].lo, (*tight[0].bounds)[d].lo - 2.0);
    EXPECT_EQ((*loose[0].bounds)[d].hi, (*tight[0].bounds)[d].hi + 2.0);
  }
}

TEST(Generator, InvalidSpecs) {
  GeneratorSpec spec;
  spec.dims = 0;
  EXPECT_THROW(validate(spec), UsageError);
  spec = {};
  spec.partitions = 0;
  EXPECT_THROW(validate(spec), UsageError);
  spec = {};
  spec.min_points = 500;
  EXPECT_THROW(validate(spec), UsageError);
  spec = {};
  spec.slack = -1;
  EXPECT_THROW(validate(spec), UsageError);
  spec = {};
  spec.layout = Layout::kFourBox;
  spec.scalar_kind = ScalarKind::kInt64;
  EXPECT_THROW(validate(spec), UsageError);
  EXPECT_THROW(parse_layout("hexagons"), UsageError);
  EXPECT_EQ(parse_layout("gaussian-clusters"), Layout::kGaussianClusters);
}

}  // namespace
}  // namespace apc
