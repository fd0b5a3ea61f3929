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

#include "apc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "apc/pruning.hpp"

namespace apc {

std::string_view to_string(BenchVariant v) {
  return v == BenchVariant::kNaive ? "naive" : "optimized";
}

BenchVariant parse_bench_variant(std::string_view text) {
  if (text == "naive") return BenchVariant::kNaive;
  if (text == "optimized") return BenchVariant::kOptimized;
  throw UsageError("unknown bench variant '" + std::string(text) + "'");
}

namespace {

constexpr std::size_t kPoolSize = 1024;  // power of two

template <Scalar T>
struct Triple {
  Aabb<T> o, e, b;
};

template <Scalar T>
T coord(double v) {
  if constexpr (std::same_as<T, double>) {
    return v;
  } else {
    return static_cast<std::int64_t>(std::llround(v * 1000.0));
  }
}

template <Scalar T>
Aabb<T> unit_box(std::mt19937_64& rng, std::size_t dims, double shift0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Interval<T>> iv(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const double lo = unit(rng) + (d == 0 ? shift0 : 0.0);
    const double hi = lo + unit(rng);
    iv[d] = {coord<T>(lo), coord<T>(hi)};
  }
  return Aabb<T>(std::move(iv));
}

// O and E share the unit cube; B sits far along dimension 0, so the test
// holds at every corner of O.
template <Scalar T>
std::vector<Triple<T>> make_pool(std::size_t dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ (dims * 0x9E3779B97F4A7C15ULL));
  const double far = 10.0 * static_cast<double>(dims) + 10.0;
  std::vector<Triple<T>> pool;
  pool.reserve(kPoolSize);
  while (pool.size() < kPoolSize) {
    Triple<T> t{unit_box<T>(rng, dims, 0.0), unit_box<T>(rng, dims, 0.0), unit_box<T>(rng, dims, far)};
    if (all_points_closer_opt(t.o, t.e, t.b)) pool.push_back(std::move(t));
  }
  return pool;
}

template <class Fn>
double ns_per_call(std::uint64_t iterations, Fn&& fn) {
  using Clock = std::chrono::steady_clock;
  std::uint64_t hits = 0;
  const std::uint64_t warmup = std::max<std::uint64_t>(iterations / 10, 1);
  for (std::uint64_t i = 0; i < warmup; ++i) hits += fn(i) ? 1 : 0;
  const auto start = Clock::now();
  for (std::uint64_t i = 0; i < iterations; ++i) hits += fn(i) ? 1 : 0;
  const auto elapsed = std::chrono::duration<double, std::nano>(Clock::now() - start).count();
  static volatile std::uint64_t sink = 0;
  sink = sink + hits;
  return elapsed / static_cast<double>(iterations);
}

template <Scalar T>
void bench_kind(const BenchConfig& config, std::size_t dims, std::vector<BenchRecord>& out) {
  const std::vector<Triple<T>> pool = make_pool<T>(dims, config.seed);
  for (BenchVariant variant : config.variants) {
    if (variant == BenchVariant::kNaive && dims > kMaxCornerDims) continue;
    double ns = 0;
    if (variant == BenchVariant::kOptimized) {
      ns = ns_per_call(config.iterations, [&](std::uint64_t i) {
        const auto& t = pool[i & (kPoolSize - 1)];
        return all_points_closer_opt(t.o, t.e, t.b);
      });
    } else {
      ns = ns_per_call(config.iterations, [&](std::uint64_t i) {
        const auto& t = pool[i & (kPoolSize - 1)];
        return all_points_closer_naive(t.o, t.e, t.b).closer;
      });
    }
    out.push_back({ScalarTraits<T>::kind, dims, variant, ns, config.iterations});
  }
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.iterations < kMinBenchIterations) {
    throw UsageError("bench needs at least " + std::to_string(kMinBenchIterations) + " iterations");
  }
  std::vector<BenchRecord> out;
  for (ScalarKind kind : config.scalars) {
    for (std::size_t dims : config.dims) {
      if (dims == 0) throw UsageError("bench dims must be positive");
      visit_scalar(kind, [&]<Scalar T>(T) { bench_kind<T>(config, dims, out); });
    }
  }
  return out;
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream csv;
  csv << "scalar,dims,variant,ns_per_call\n";
  for (const auto& r : records) {
    csv << to_string(r.scalar) << ',' << r.dims << ',' << to_string(r.variant) << ','
        << r.ns_per_call << '\n';
  }
  return csv.str();
}

}  // namespace apc
