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

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "apc/scalar.hpp"

namespace apc {

enum class BenchVariant { kNaive, kOptimized };

std::string_view to_string(BenchVariant v);
BenchVariant parse_bench_variant(std::string_view text);

struct BenchRecord {
  ScalarKind scalar = ScalarKind::kFloat64;
  std::size_t dims = 0;
  BenchVariant variant = BenchVariant::kOptimized;
  double ns_per_call = 0;
  std::uint64_t iterations = 0;
};

inline constexpr std::uint64_t kMinBenchIterations = 100000;

struct BenchConfig {
  std::vector<std::size_t> dims{2, 3, 4, 8, 16, 24, 32};
  std::vector<ScalarKind> scalars{ScalarKind::kFloat64, ScalarKind::kInt64};
  std::vector<BenchVariant> variants{BenchVariant::kOptimized};
  std::uint64_t iterations = kMinBenchIterations;
  std::uint64_t seed = 7;
};

/// Times the pruning test over pre-generated triples. Inputs are built so the
/// test succeeds, which forces the corner scan through all 2^R corners; both
/// variants see the same triples for a given (scalar, dims). Naive rows are
/// skipped above the corner-enumeration limit.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

/// CSV with header scalar,dims,variant,ns_per_call.
std::string bench_csv(const std::vector<BenchRecord>& records);

}  // namespace apc
