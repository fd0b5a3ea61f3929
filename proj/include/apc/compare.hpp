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
#include <vector>

#include "apc/ordering.hpp"
#include "apc/storage.hpp"

namespace apc {

/// Planning-only comparison of pruning methods over generated workloads. Each
/// trial draws a candidate dataset and an origin dataset from the layout; the
/// The fig3 layout uses O as the only origin and P1..P3 as candidates.
struct CompareConfig {
  Layout layout = Layout::kOverlappingRandomBoxes;
  std::size_t trials = 5;
  std::vector<std::uint64_t> ks{1, 5, 50};
  std::uint64_t seed = 1;
  std::size_t dims = 2;
  ScalarKind scalar = ScalarKind::kFloat64;
  std::size_t partitions = 32;
  std::size_t points = 100;
  double slack = 0.0;
};

struct CompareRow {
  std::string layout;
  std::uint64_t k = 0;
  std::size_t trial = 0;
  PruneMethod method = PruneMethod::kNone;
  std::size_t partitions_loaded = 0;  // summed over origin partitions
};

std::vector<CompareRow> run_compare(const CompareConfig& config);

/// CSV with header layout,k,trial,method,partitions_loaded.
std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace apc
