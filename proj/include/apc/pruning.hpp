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

// AllPointsCloser: decides from bounds alone whether every point of an origin
// box O is strictly closer to every point of an evaluation box E than to any
// point of a basis box B. When it holds, B cannot contribute a neighbor to any
// point of O ahead of E's points.
//
// Two forms are provided. The corner scan checks MaxDist(c, E) < MinDist(c, B)
// at each of the 2^R corners c of O and is kept as the reference. The
// per-dimension form picks, for every dimension independently, the endpoint of
// O that is worst for the claim and sums the margins, which is O(R) and gives
// the same answer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "apc/geometry.hpp"

namespace apc {

/// Concrete triple showing that pruning B in favour of E is impossible.
template <Scalar T>
struct Witness {
  Point<T> origin_corner;
  Point<T> eval_point;
  Point<T> basis_point;
};

template <Scalar T>
struct PruneDecision {
  bool closer = false;
  std::optional<Witness<T>> witness;  // set iff !closer
};

namespace detail {

template <Scalar T>
void check_triple(const Aabb<T>& o, const Aabb<T>& e, const Aabb<T>& b) {
  check_dims(o.dims(), e.dims());
  check_dims(o.dims(), b.dims());
}

template <Scalar T>
Witness<T> witness_at(Point<T> c, const Aabb<T>& e, const Aabb<T>& b) {
  Witness<T> w{std::move(c), {}, {}};
  w.eval_point = farthest_point(w.origin_corner, e);
  w.basis_point = nearest_point(w.origin_corner, b);
  return w;
}

}  // namespace detail

/// Reference corner scan. Equality at any corner rejects.
template <Scalar T>
PruneDecision<T> all_points_closer_naive(const Aabb<T>& o, const Aabb<T>& e, const Aabb<T>& b) {
  detail::check_triple(o, e, b);
  if (o.dims() > kMaxCornerDims) {
    throw UsageError("corner scan limited to " + std::to_string(kMaxCornerDims) + " dimensions");
  }
  const std::size_t dims = o.dims();
  const std::uint64_t count = std::uint64_t{1} << dims;
  for (std::uint64_t i = 0; i < count; ++i) {
    Wide<T> to_basis{0};
    Wide<T> to_eval{0};
    for (std::size_t d = 0; d < dims; ++d) {
      const T c = ((i >> d) & 1U) != 0 ? o[d].hi : o[d].lo;
      to_basis += min_dist_sq_1d(c, b[d]);
      to_eval += max_dist_sq_1d(c, e[d]);
    }
    if (to_basis <= to_eval) {
      return {false, detail::witness_at(corner(o, i), e, b)};
    }
  }
  return {true, std::nullopt};
}

/// O(R) form. Each dimension contributes the smaller of the two endpoint
/// margins (MinDist^2 to B minus MaxDist^2 to E); the claim holds iff the
/// total is strictly positive.
template <Scalar T>
bool all_points_closer_opt(const Aabb<T>& o, const Aabb<T>& e, const Aabb<T>& b) {
  detail::check_triple(o, e, b);
  Wide<T> sum{0};
  for (std::size_t d = 0; d < o.dims(); ++d) {
    const T lo = o[d].lo;
    const T hi = o[d].hi;
    const Wide<T> at_lo = min_dist_sq_1d(lo, b[d]) - max_dist_sq_1d(lo, e[d]);
    const Wide<T> at_hi = min_dist_sq_1d(hi, b[d]) - max_dist_sq_1d(hi, e[d]);
    sum += at_hi < at_lo ? at_hi : at_lo;
  }
  return sum > Wide<T>{0};
}

/// Corner of O built from the per-dimension minimizers of the O(R) form
/// (lo on ties); absent iff all_points_closer_opt holds.
template <Scalar T>
std::optional<Point<T>> failing_corner(const Aabb<T>& o, const Aabb<T>& e, const Aabb<T>& b) {
  detail::check_triple(o, e, b);
  std::vector<T> c(o.dims());
  Wide<T> sum{0};
  for (std::size_t d = 0; d < o.dims(); ++d) {
    const T lo = o[d].lo;
    const T hi = o[d].hi;
    const Wide<T> at_lo = min_dist_sq_1d(lo, b[d]) - max_dist_sq_1d(lo, e[d]);
    const Wide<T> at_hi = min_dist_sq_1d(hi, b[d]) - max_dist_sq_1d(hi, e[d]);
    if (at_hi < at_lo) {
      c[d] = hi;
      sum += at_hi;
    } else {
      c[d] = lo;
      sum += at_lo;
    }
  }
  if (sum > Wide<T>{0}) return std::nullopt;
  return Point<T>(std::move(c));
}

/// Optimized decision plus a witness on failure; usable at any R.
template <Scalar T>
PruneDecision<T> explain(const Aabb<T>& o, const Aabb<T>& e, const Aabb<T>& b) {
  auto c = failing_corner(o, e, b);
  if (!c) return {true, std::nullopt};
  return {false, detail::witness_at(std::move(*c), e, b)};
}

/// One dimension of g(p) = MaxDist(p, E)^2 - MinDist(p, B)^2, evaluated at a
/// real coordinate p. Convex in p for every pair of well formed intervals.
inline double h_dim(double p, const Interval<double>& e, const Interval<double>& b) {
  return max_dist_sq_1d(p, e) - min_dist_sq_1d(p, b);
}

/// Sum of h_dim over all dimensions.
inline double g_value(std::span<const double> p, const Aabb<double>& e, const Aabb<double>& b) {
  detail::check_dims(p.size(), e.dims());
  detail::check_dims(p.size(), b.dims());
  double sum = 0.0;
  for (std::size_t d = 0; d < p.size(); ++d) sum += h_dim(p[d], e[d], b[d]);
  return sum;
}

}  // namespace apc
