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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apc/scalar.hpp"

namespace apc {

/// An R-dimensional coordinate vector.
template <Scalar T>
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<T> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<T> coords) : coords_(coords) {}
  explicit Point(std::span<const T> coords) : coords_(coords.begin(), coords.end()) {}

  std::size_t dims() const { return coords_.size(); }
  T operator[](std::size_t d) const { return coords_[d]; }
  T& operator[](std::size_t d) { return coords_[d]; }
  std::span<const T> coords() const { return coords_; }
  operator std::span<const T>() const { return coords_; }  // NOLINT

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<T> coords_;
};

/// Closed interval [lo, hi]; zero width is allowed.
template <Scalar T>
struct Interval {
  T lo{};
  T hi{};

  bool contains(T v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned bounding box. Membership is inclusive on every face and the
/// box need not be tight around whatever points it describes.
template <Scalar T>
class Aabb {
 public:
  Aabb() = default;

  explicit Aabb(std::vector<Interval<T>> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw UsageError("Aabb needs at least one dimension");
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      if (!(dims_[d].lo <= dims_[d].hi)) {
        throw UsageError("malformed interval in dimension " + std::to_string(d));
      }
    }
  }

  Aabb(std::initializer_list<Interval<T>> dims) : Aabb(std::vector<Interval<T>>(dims)) {}

  static Aabb from_bounds(std::span<const T> lo, std::span<const T> hi) {
    if (lo.size() != hi.size()) throw UsageError("lo/hi dimensionality differs");
    std::vector<Interval<T>> dims(lo.size());
    for (std::size_t d = 0; d < lo.size(); ++d) dims[d] = {lo[d], hi[d]};
    return Aabb(std::move(dims));
  }

  /// Degenerate box holding exactly p.
  static Aabb of_point(std::span<const T> p) { return from_bounds(p, p); }

  std::size_t dims() const { return dims_.size(); }
  const Interval<T>& operator[](std::size_t d) const { return dims_[d]; }
  std::span<const Interval<T>> intervals() const { return dims_; }

  bool contains(std::span<const T> p) const {
    if (p.size() != dims_.size()) return false;
    for (std::size_t d = 0; d < p.size(); ++d) {
      if (!dims_[d].contains(p[d])) return false;
    }
    return true;
  }

  std::vector<T> lo() const {
    std::vector<T> out(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) out[d] = dims_[d].lo;
    return out;
  }

  std::vector<T> hi() const {
    std::vector<T> out(dims_.size());
    for (std::size_t d = 0; d < dims_.size(); ++d) out[d] = dims_[d].hi;
    return out;
  }

  friend bool operator==(const Aabb&, const Aabb&) = default;

 private:
  std::vector<Interval<T>> dims_;
};

/// Corner enumeration is refused above this dimensionality.
inline constexpr std::size_t kMaxCornerDims = 30;

namespace detail {

inline void check_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    throw UsageError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace detail

// Per-dimension kernels. These are the building blocks of every distance
// below and of both AllPointsCloser variants.

template <Scalar T>
inline Wide<T> min_dist_sq_1d(T p, const Interval<T>& m) {
  if (p < m.lo) return square_diff(m.lo, p);
  if (m.hi < p) return square_diff(m.hi, p);
  return Wide<T>{0};
}

template <Scalar T>
inline Wide<T> max_dist_sq_1d(T p, const Interval<T>& m) {
  const Wide<T> to_lo = square_diff(m.lo, p);
  const Wide<T> to_hi = square_diff(m.hi, p);
  return to_hi >= to_lo ? to_hi : to_lo;
}

template <Scalar T>
Wide<T> dist_sq(std::span<const T> a, std::span<const T> b) {
  detail::check_dims(a.size(), b.size());
  Wide<T> sum{0};
  for (std::size_t d = 0; d < a.size(); ++d) sum += square_diff(a[d], b[d]);
  return sum;
}

template <Scalar T>
Wide<T> dist_sq(const Point<T>& a, const Point<T>& b) {
  return dist_sq<T>(a.coords(), b.coords());
}

/// Squared distance from p to the nearest point of m; zero iff p is inside.
template <Scalar T>
Wide<T> min_dist_sq(std::span<const T> p, const Aabb<T>& m) {
  detail::check_dims(p.size(), m.dims());
  Wide<T> sum{0};
  for (std::size_t d = 0; d < p.size(); ++d) sum += min_dist_sq_1d(p[d], m[d]);
  return sum;
}

/// Squared distance from p to the farthest corner of m.
template <Scalar T>
Wide<T> max_dist_sq(std::span<const T> p, const Aabb<T>& m) {
  detail::check_dims(p.size(), m.dims());
  Wide<T> sum{0};
  for (std::size_t d = 0; d < p.size(); ++d) sum += max_dist_sq_1d(p[d], m[d]);
  return sum;
}

/// Corner of m attaining max_dist_sq; prefers hi when both ends tie.
template <Scalar T>
Point<T> farthest_point(std::span<const T> p, const Aabb<T>& m) {
  detail::check_dims(p.size(), m.dims());
  std::vector<T> out(p.size());
  for (std::size_t d = 0; d < p.size(); ++d) {
    out[d] = square_diff(m[d].hi, p[d]) >= square_diff(m[d].lo, p[d]) ? m[d].hi : m[d].lo;
  }
  return Point<T>(std::move(out));
}

/// Clamp of p into m.
template <Scalar T>
Point<T> nearest_point(std::span<const T> p, const Aabb<T>& m) {
  detail::check_dims(p.size(), m.dims());
  std::vector<T> out(p.size());
  for (std::size_t d = 0; d < p.size(); ++d) {
    out[d] = p[d] < m[d].lo ? m[d].lo : (m[d].hi < p[d] ? m[d].hi : p[d]);
  }
  return Point<T>(std::move(out));
}

/// Corner number `index` of m: bit d of index selects hi in dimension d.
template <Scalar T>
Point<T> corner(const Aabb<T>& m, std::uint64_t index) {
  std::vector<T> out(m.dims());
  for (std::size_t d = 0; d < m.dims(); ++d) {
    out[d] = ((index >> d) & 1U) != 0 ? m[d].hi : m[d].lo;
  }
  return Point<T>(std::move(out));
}

/// All 2^R corners in binary-counting order (dimension 0 toggles fastest).
/// Degenerate dimensions yield repeated points; they are not collapsed.
template <Scalar T>
std::vector<Point<T>> corners(const Aabb<T>& m) {
  if (m.dims() > kMaxCornerDims) {
    throw UsageError("refusing to enumerate corners of a " + std::to_string(m.dims()) +
                     "-dimensional box");
  }
  const std::uint64_t count = std::uint64_t{1} << m.dims();
  std::vector<Point<T>> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(corner(m, i));
  return out;
}

/// Smallest squared distance between any pair of points drawn from a and b.
template <Scalar T>
Wide<T> bmin_dist_sq(const Aabb<T>& a, const Aabb<T>& b) {
  detail::check_dims(a.dims(), b.dims());
  Wide<T> sum{0};
  for (std::size_t d = 0; d < a.dims(); ++d) {
    if (b[d].hi < a[d].lo) {
      sum += square_diff(a[d].lo, b[d].hi);
    } else if (a[d].hi < b[d].lo) {
      sum += square_diff(b[d].lo, a[d].hi);
    }
  }
  return sum;
}

/// Largest squared distance between any pair of points drawn from a and b.
template <Scalar T>
Wide<T> bmax_dist_sq(const Aabb<T>& a, const Aabb<T>& b) {
  detail::check_dims(a.dims(), b.dims());
  Wide<T> sum{0};
  for (std::size_t d = 0; d < a.dims(); ++d) {
    const Wide<T> x = square_diff(a[d].lo, b[d].hi);
    const Wide<T> y = square_diff(a[d].hi, b[d].lo);
    sum += x >= y ? x : y;
  }
  return sum;
}

// Point overloads; template deduction does not see through the span conversion.

template <Scalar T>
Wide<T> min_dist_sq(const Point<T>& p, const Aabb<T>& m) {
  return min_dist_sq<T>(p.coords(), m);
}

template <Scalar T>
Wide<T> max_dist_sq(const Point<T>& p, const Aabb<T>& m) {
  return max_dist_sq<T>(p.coords(), m);
}

template <Scalar T>
Point<T> farthest_point(const Point<T>& p, const Aabb<T>& m) {
  return farthest_point<T>(p.coords(), m);
}

template <Scalar T>
Point<T> nearest_point(const Point<T>& p, const Aabb<T>& m) {
  return nearest_point<T>(p.coords(), m);
}

}  // namespace apc
