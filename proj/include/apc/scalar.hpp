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

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace apc {

/// Raised for malformed arguments: dimension mismatch, bad flags, unknown ids.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when on-disk data disagrees with its manifest or fails validation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScalarKind { kFloat64, kInt64 };

std::string_view to_string(ScalarKind kind);
ScalarKind parse_scalar_kind(std::string_view text);

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, std::int64_t>;

template <Scalar T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  using Wide = double;
  static constexpr ScalarKind kind = ScalarKind::kFloat64;
};

// 128-bit accumulation keeps every squared distance exact for |coord| < 2^31
// and any dimensionality we can enumerate.
template <>
struct ScalarTraits<std::int64_t> {
  using Wide = __int128;
  static constexpr ScalarKind kind = ScalarKind::kInt64;
};

/// Squared-distance type for scalar kind T.
template <Scalar T>
using Wide = typename ScalarTraits<T>::Wide;

/// Largest magnitude accepted for integer coordinates at ingestion.
inline constexpr std::int64_t kMaxIntCoord = (std::int64_t{1} << 31) - 1;

template <Scalar T>
constexpr Wide<T> widen(T v) {
  return static_cast<Wide<T>>(v);
}

template <Scalar T>
constexpr Wide<T> square_diff(T a, T b) {
  const Wide<T> d = widen(a) - widen(b);
  return d * d;
}

/// True when v may be stored in a dataset of kind T.
template <Scalar T>
bool admissible(T v) {
  if constexpr (std::same_as<T, double>) {
    return std::isfinite(v);
  } else {
    return v >= -kMaxIntCoord && v <= kMaxIntCoord;
  }
}

/// Decimal rendering of a squared distance; exact for both kinds.
std::string format_wide(double v);
std::string format_wide(__int128 v);

/// Square root for human-facing output only.
inline double display_sqrt(double v) { return std::sqrt(v); }
inline double display_sqrt(__int128 v) { return std::sqrt(static_cast<long double>(v)); }

/// Calls fn with a value-initialized tag of the matching scalar type.
template <class Fn>
decltype(auto) visit_scalar(ScalarKind kind, Fn&& fn) {
  switch (kind) {
    case ScalarKind::kFloat64:
      return fn(double{});
    case ScalarKind::kInt64:
      return fn(std::int64_t{});
  }
  throw UsageError("unknown scalar kind");
}

}  // namespace apc
