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

#include "apc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "apc/bench.hpp"
#include "apc/compare.hpp"
#include "apc/join.hpp"
#include "apc/ordering.hpp"
#include "apc/pruning.hpp"
#include "apc/storage.hpp"
#include "json.hpp"

namespace apc::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json wide_json(double v) { return v; }

ordered_json wide_json(__int128 v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return format_wide(v);
}

template <Scalar T>
ordered_json point_json(const Point<T>& p) {
  ordered_json arr = ordered_json::array();
  for (T v : p.coords()) arr.push_back(v);
  return arr;
}

// gen ------------------------------------------------------------------------

struct GenArgs {
  std::size_t dims = 2;
  std::string scalar = "float64";
  std::size_t partitions = 8;
  std::size_t points = 100;
  std::optional<std::size_t> min_points;
  std::string layout = "uniform-grid-cells";
  std::uint64_t seed = 1;
  double slack = 0.0;
  std::string name;
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  GeneratorSpec spec;
  spec.dims = a.dims;
  spec.scalar_kind = parse_scalar_kind(a.scalar);
  spec.partitions = a.partitions;
  spec.points = a.points;
  spec.min_points = a.min_points;
  spec.layout = parse_layout(a.layout);
  spec.seed = a.seed;
  spec.slack = a.slack;
  spec.name = a.name.empty() ? std::string(to_string(spec.layout)) : a.name;
  const DatasetManifest m = generate_dataset(spec, a.out);
  out << "wrote dataset '" << m.name << "' to " << a.out << ": " << m.partitions.size()
      << " partitions, " << m.total_count() << " rows, dims=" << m.dims << ", "
      << to_string(m.scalar_kind) << '\n';
  return kExitOk;
}

// stats ----------------------------------------------------------------------

struct StatsArgs {
  std::string dataset;
  bool verify = false;
};

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
  const DatasetManifest m = load_manifest(a.dataset);
  ordered_json doc;
  doc["name"] = m.name;
  doc["dims"] = m.dims;
  doc["scalar_kind"] = std::string(to_string(m.scalar_kind));
  doc["partitions"] = m.partitions.size();
  doc["rows"] = m.total_count();
  int status = kExitOk;
  if (a.verify) {
    const auto problems = verify_dataset(m);
    doc["verified"] = problems.empty();
    doc["problems"] = problems;
    for (const auto& p : problems) err << "verify: " << p << '\n';
    if (!problems.empty()) status = kExitVerifyFailed;
  }
  out << doc.dump(2) << '\n';
  return status;
}

// prune ----------------------------------------------------------------------

struct PruneArgs {
  std::string dataset;
  std::string origin_dataset;
  std::string origin;
  std::uint64_t k = 1;
  std::string method = "apc-dag";
  bool explain = false;
};

template <Scalar T>
ordered_json plan_json(const PrunePlan<T>& plan, std::uint64_t k) {
  ordered_json doc;
  doc["origin"] = plan.origin;
  doc["method"] = std::string(to_string(plan.method));
  doc["k"] = k;
  doc["required"] = plan.required;
  std::vector<std::string> pruned_ids;
  ordered_json reasons = ordered_json::array();
  for (const auto& p : plan.pruned) {
    pruned_ids.push_back(p.id);
    ordered_json r;
    r["id"] = p.id;
    r["reason"] = std::string(to_string(p.reason));
    if (p.reason == PruneReason::kCloserSet) {
      r["closer_set"] = p.closer_set;
      r["closer_points"] = p.closer_points;
    } else if (p.reason == PruneReason::kBeyondPruneDist) {
      r["bmin_dist_sq"] = wide_json(p.bmin_dist_sq);
    }
    reasons.push_back(std::move(r));
  }
  doc["pruned"] = pruned_ids;
  doc["pruned_detail"] = std::move(reasons);
  if (plan.method == PruneMethod::kBaseline) {
    doc["prune_dist_sq"] = plan.prune_dist_sq ? wide_json(*plan.prune_dist_sq) : ordered_json(nullptr);
  }
  return doc;
}

template <Scalar T>
int prune_typed(const PruneArgs& a, const DatasetManifest& cand_manifest,
                const DatasetManifest& origin_manifest, bool same_dataset, std::ostream& out) {
  const auto origin_metas = partition_metas<T>(origin_manifest);
  auto it = std::find_if(origin_metas.begin(), origin_metas.end(),
                         [&](const auto& m) { return m.id == a.origin; });
  if (it == origin_metas.end()) throw UsageError("unknown origin partition '" + a.origin + "'");
  const PartitionMeta<T> origin = *it;
  if (!origin.bounds) throw UsageError("origin partition '" + a.origin + "' is empty");

  std::vector<PartitionMeta<T>> candidates;
  for (auto& m : partition_metas<T>(cand_manifest)) {
    if (same_dataset && m.id == a.origin) continue;
    candidates.push_back(std::move(m));
  }

  const PruneMethod method = parse_prune_method(a.method);
  std::optional<ProximityDag<T>> dag;
  PrunePlan<T> plan;
  if (method == PruneMethod::kApcDag) {
    dag = build_dag<T>(origin, candidates);
    plan = prune_by_dag<T>(*dag, candidates, a.k);
  } else {
    plan = plan_for<T>(method, origin, candidates, a.k);
  }

  ordered_json doc = plan_json(plan, a.k);
  if (dag) {
    ordered_json edges = ordered_json::array();
    for (const auto& [from, to] : dag->edge_list()) edges.push_back({from, to});
    doc["edges"] = std::move(edges);
    doc["topological_order"] = topological_order(*dag);
  }
  if (a.explain) {
    // For every partition still required, show why each other bounded
    // partition fails to dominate it.
    ordered_json witnesses = ordered_json::array();
    for (const auto& b : candidates) {
      if (!b.bounds || plan.is_pruned(b.id)) continue;
      for (const auto& e : candidates) {
        if (&e == &b || !e.bounds || e.count == 0) continue;
        const PruneDecision<T> d = explain(*origin.bounds, *e.bounds, *b.bounds);
        if (d.closer) continue;
        const Witness<T>& w = *d.witness;
        ordered_json entry;
        entry["evaluation"] = e.id;
        entry["basis"] = b.id;
        entry["origin_corner"] = point_json(w.origin_corner);
        entry["eval_point"] = point_json(w.eval_point);
        entry["basis_point"] = point_json(w.basis_point);
        entry["eval_dist_sq"] = wide_json(dist_sq(w.origin_corner, w.eval_point));
        entry["basis_dist_sq"] = wide_json(dist_sq(w.origin_corner, w.basis_point));
        witnesses.push_back(std::move(entry));
      }
    }
    doc["witnesses"] = std::move(witnesses);
  }
  out << doc.dump(2) << '\n';
  return kExitOk;
}

int cmd_prune(const PruneArgs& a, std::ostream& out) {
  if (a.k == 0) throw UsageError("--k must be at least 1");
  const DatasetManifest cand = load_manifest(a.dataset);
  const bool same = a.origin_dataset.empty() ||
                    fs::weakly_canonical(a.origin_dataset) == fs::weakly_canonical(a.dataset);
  const DatasetManifest origin = same ? cand : load_manifest(a.origin_dataset);
  if (origin.dims != cand.dims || origin.scalar_kind != cand.scalar_kind) {
    throw UsageError("origin and candidate datasets differ in dims or scalar kind");
  }
  return visit_scalar(cand.scalar_kind,
                      [&]<Scalar T>(T) { return prune_typed<T>(a, cand, origin, same, out); });
}

// join -----------------------------------------------------------------------

struct JoinArgs {
  std::string origin_dataset;
  std::string candidate_dataset;
  std::vector<std::string> origin_ids;
  std::vector<std::string> candidate_ids;
  std::uint64_t k = 1;
  std::string method = "apc-dag";
  bool verify = false;
  bool validate = false;
  std::string out;
  std::string report;
};

template <Scalar T>
int join_typed(const JoinArgs& a, const DatasetManifest& origin, const DatasetManifest& cand,
               std::ostream& out, std::ostream& err) {
  const PruneMethod method = parse_prune_method(a.method);
  JoinOptions options;
  options.validate = a.validate;
  const JoinResult<T> result = aknn_join<T>(origin, cand, a.k, method, options);
  const std::string ndjson = neighbor_lists_ndjson<T>(result.lists);
  for (const auto& w : result.report.warnings) err << "warning: " << w << '\n';

  if (a.out.empty()) {
    out << ndjson;
  } else {
    std::ofstream f(a.out, std::ios::trunc);
    if (!f) throw UsageError("cannot write " + a.out);
    f << ndjson;
  }
  if (!a.report.empty()) {
    std::ofstream f(a.report, std::ios::trunc);
    if (!f) throw UsageError("cannot write " + a.report);
    f << to_json(result.report);
  }
  err << "join: method=" << to_string(method) << " k=" << a.k
      << " loaded=" << result.report.total_loaded() << " pruned=" << result.report.total_pruned()
      << '\n';

  if (a.verify) {
    const JoinResult<T> reference = aknn_join<T>(origin, cand, a.k, PruneMethod::kNone, options);
    const std::string expected = neighbor_lists_ndjson<T>(reference.lists);
    if (expected != ndjson) {
      std::istringstream got(ndjson), want(expected);
      std::string g, w;
      std::size_t line = 0;
      while (true) {
        const bool more_g = static_cast<bool>(std::getline(got, g));
        const bool more_w = static_cast<bool>(std::getline(want, w));
        ++line;
        if (!more_g && !more_w) break;
        if (g != w || more_g != more_w) {
          err << "verify: mismatch at record " << line << "\n  got:      " << g
              << "\n  expected: " << w << '\n';
          break;
        }
      }
      return kExitVerifyFailed;
    }
    err << "verify: output identical to unpruned join (" << result.lists.size() << " records)\n";
  }
  return kExitOk;
}

int cmd_join(const JoinArgs& a, std::ostream& out, std::ostream& err) {
  if (a.k == 0) throw UsageError("--k must be at least 1");
  DatasetManifest origin = load_manifest(a.origin_dataset);
  DatasetManifest cand = load_manifest(a.candidate_dataset);
  if (!a.origin_ids.empty()) origin = origin.select(a.origin_ids);
  if (!a.candidate_ids.empty()) cand = cand.select(a.candidate_ids);
  if (origin.dims != cand.dims) {
    throw UsageError("origin dims " + std::to_string(origin.dims) + " differ from candidate dims " +
                     std::to_string(cand.dims));
  }
  if (origin.scalar_kind != cand.scalar_kind) throw UsageError("datasets differ in scalar kind");
  return visit_scalar(origin.scalar_kind,
                      [&]<Scalar T>(T) { return join_typed<T>(a, origin, cand, out, err); });
}

// bench / compare ------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> dims{2, 3, 4, 8, 16, 24, 32};
  std::vector<std::string> scalars{"float64", "int64"};
  std::vector<std::string> variants{"optimized"};
  std::uint64_t iters = kMinBenchIterations;
  std::uint64_t seed = 7;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  BenchConfig config;
  config.dims = a.dims;
  config.scalars.clear();
  for (const auto& s : a.scalars) config.scalars.push_back(parse_scalar_kind(s));
  config.variants.clear();
  for (const auto& v : a.variants) {
    if (v == "both") {
      config.variants = {BenchVariant::kNaive, BenchVariant::kOptimized};
    } else {
      config.variants.push_back(parse_bench_variant(v));
    }
  }
  config.iterations = a.iters;
  config.seed = a.seed;
  out << bench_csv(run_bench(config));
  return kExitOk;
}

struct CompareArgs {
  std::string layout = "overlapping-random-boxes";
  std::size_t trials = 5;
  std::vector<std::uint64_t> ks{1, 5, 50};
  std::uint64_t seed = 1;
  std::size_t dims = 2;
  std::string scalar = "float64";
  std::size_t partitions = 32;
  std::size_t points = 100;
  double slack = 0.0;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  CompareConfig config;
  config.layout = parse_layout(a.layout);
  config.trials = a.trials;
  config.ks = a.ks;
  config.seed = a.seed;
  config.dims = a.dims;
  config.scalar = parse_scalar_kind(a.scalar);
  config.partitions = a.partitions;
  config.points = a.points;
  config.slack = a.slack;
  out << compare_csv(run_compare(config));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounds-only partition pruning for exact AkNN joins", "apcjoin"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic partitioned dataset");
  gen_cmd->add_option("--dims", gen.dims, "Dimensionality")->capture_default_str();
  gen_cmd->add_option("--scalar", gen.scalar, "float64 or int64")->capture_default_str();
  gen_cmd->add_option("--partitions", gen.partitions, "Partition count")->capture_default_str();
  gen_cmd->add_option("--points", gen.points, "Rows per partition (maximum with --min-points)")
      ->capture_default_str();
  gen_cmd->add_option("--min-points", gen.min_points, "Draw row counts from [min-points, points]");
  gen_cmd
      ->add_option("--layout", gen.layout,
                   "uniform-grid-cells, gaussian-clusters, overlapping-random-boxes or fig3")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
  gen_cmd->add_option("--slack", gen.slack, "Widen declared bounds by this much per side")
      ->capture_default_str();
  gen_cmd->add_option("--name", gen.name, "Dataset name (defaults to the layout)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a dataset manifest");
  stats_cmd->add_option("--dataset", stats.dataset, "Dataset directory or manifest")->required();
  stats_cmd->add_flag("--verify", stats.verify, "Check files and bounds against the manifest");

  PruneArgs prune;
  auto* prune_cmd = app.add_subcommand("prune", "Print the prune plan for one origin partition");
  prune_cmd->add_option("--dataset", prune.dataset, "Candidate dataset")->required();
  prune_cmd->add_option("--origin-dataset", prune.origin_dataset,
                        "Dataset holding the origin (defaults to --dataset; the origin is then "
                        "excluded from the candidates)");
  prune_cmd->add_option("--origin", prune.origin, "Origin partition id")->required();
  prune_cmd->add_option("--k", prune.k, "Neighbors per point")->capture_default_str();
  prune_cmd->add_option("--method", prune.method, "baseline or apc-dag")->capture_default_str();
  prune_cmd->add_flag("--explain", prune.explain, "Emit witnesses for partitions left required");

  JoinArgs join;
  auto* join_cmd = app.add_subcommand("join", "Run an exact AkNN join");
  join_cmd->add_option("--origin-dataset", join.origin_dataset, "Query side")->required();
  join_cmd->add_option("--candidate-dataset", join.candidate_dataset, "Neighbor side")->required();
  join_cmd->add_option("--origin-ids", join.origin_ids, "Restrict origin partitions")->delimiter(',');
  join_cmd->add_option("--candidate-ids", join.candidate_ids, "Restrict candidate partitions")
      ->delimiter(',');
  join_cmd->add_option("--k", join.k, "Neighbors per point")->capture_default_str();
  join_cmd->add_option("--method", join.method, "none, baseline or apc-dag")->capture_default_str();
  join_cmd->add_flag("--verify", join.verify, "Also run without pruning and diff the results");
  join_cmd->add_flag("--validate", join.validate, "Check loaded rows against declared bounds");
  join_cmd->add_option("--out", join.out, "Neighbor lists (NDJSON); stdout when omitted");
  join_cmd->add_option("--report", join.report, "Write the join report JSON here");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time the pruning test");
  bench_cmd->add_option("--dims", bench.dims, "Dimensionalities")->delimiter(',');
  bench_cmd->add_option("--scalar", bench.scalars, "Scalar kinds")->delimiter(',');
  bench_cmd->add_option("--variant", bench.variants, "optimized, naive or both")->delimiter(',');
  bench_cmd->add_option("--iters", bench.iters, "Timed calls per row")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Input seed")->capture_default_str();

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Count partitions loaded per pruning method");
  compare_cmd->add_option("--layout", compare.layout, "Generator layout")->capture_default_str();
  compare_cmd->add_option("--trials", compare.trials, "Workloads per layout")->capture_default_str();
  compare_cmd->add_option("--k", compare.ks, "k values")->delimiter(',');
  compare_cmd->add_option("--seed", compare.seed, "Base seed")->capture_default_str();
  compare_cmd->add_option("--dims", compare.dims, "Dimensionality")->capture_default_str();
  compare_cmd->add_option("--scalar", compare.scalar, "float64 or int64")->capture_default_str();
  compare_cmd->add_option("--partitions", compare.partitions, "Partitions per dataset")
      ->capture_default_str();
  compare_cmd->add_option("--points", compare.points, "Rows per partition")->capture_default_str();
  compare_cmd->add_option("--slack", compare.slack, "Bound widening")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (stats_cmd->parsed()) return cmd_stats(stats, out, err);
    if (prune_cmd->parsed()) return cmd_prune(prune, out);
    if (join_cmd->parsed()) return cmd_join(join, out, err);
    if (bench_cmd->parsed()) return cmd_bench(bench, out);
    if (compare_cmd->parsed()) return cmd_compare(compare, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace apc::cli
