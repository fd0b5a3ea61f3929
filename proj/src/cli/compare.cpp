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

#include "apc/compare.hpp"

#include <sstream>

namespace apc {

namespace {

template <Scalar T>
std::vector<PartitionMeta<T>> metas_of(const std::vector<PartitionData<T>>& parts) {
  std::vector<PartitionMeta<T>> out;
  for (const auto& p : parts) out.push_back({p.id, p.bounds, p.points.size()});
  return out;
}

template <Scalar T>
void compare_trial(const CompareConfig& config, std::size_t trial,
                   const std::vector<PartitionMeta<T>>& origins,
                   const std::vector<PartitionMeta<T>>& candidates, std::vector<CompareRow>& rows) {
  for (std::uint64_t k : config.ks) {
    for (PruneMethod method : {PruneMethod::kNone, PruneMethod::kBaseline, PruneMethod::kApcDag}) {
      std::size_t loaded = 0;
      for (const auto& o : origins) {
        if (o.count == 0) continue;
        loaded += plan_for<T>(method, o, candidates, k).required.size();
      }
      rows.push_back({std::string(to_string(config.layout)), k, trial, method, loaded});
    }
  }
}

}  // namespace

std::vector<CompareRow> run_compare(const CompareConfig& config) {
  if (config.ks.empty()) throw UsageError("compare needs at least one k");
  for (std::uint64_t k : config.ks) {
    if (k == 0) throw UsageError("k must be at least 1");
  }
  std::vector<CompareRow> rows;

  if (config.layout == Layout::kFourBox) {
    GeneratorSpec spec;
    spec.layout = Layout::kFourBox;
    auto metas = metas_of(generate_partitions<double>(spec));
    const std::vector<PartitionMeta<double>> origins(metas.begin(), metas.begin() + 1);
    const std::vector<PartitionMeta<double>> candidates(metas.begin() + 1, metas.end());
    for (std::size_t t = 0; t < config.trials; ++t) compare_trial(config, t, origins, candidates, rows);
    return rows;
  }

  visit_scalar(config.scalar, [&]<Scalar T>(T) {
    for (std::size_t t = 0; t < config.trials; ++t) {
      GeneratorSpec spec;
      spec.dims = config.dims;
      spec.scalar_kind = config.scalar;
      spec.partitions = config.partitions;
      spec.points = config.points;
      spec.layout = config.layout;
      spec.slack = config.slack;
      spec.seed = config.seed * 1000003 + 2 * t;
      const auto candidates = metas_of(generate_partitions<T>(spec));
      spec.seed += 1;
      const auto origins = metas_of(generate_partitions<T>(spec));
      compare_trial(config, t, origins, candidates, rows);
    }
  });
  return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream csv;
  csv << "layout,k,trial,method,partitions_loaded\n";
  for (const auto& r : rows) {
    csv << r.layout << ',' << r.k << ',' << r.trial << ',' << to_string(r.method) << ','
        << r.partitions_loaded << '\n';
  }
  return csv.str();
}

}  // namespace apc
