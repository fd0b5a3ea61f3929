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

#include "apc/scalar.hpp"

#include <algorithm>
#include <charconv>
#include <system_error>

namespace apc {

std::string_view to_string(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::kFloat64:
      return "float64";
    case ScalarKind::kInt64:
      return "int64";
  }
  return "?";
}

ScalarKind parse_scalar_kind(std::string_view text) {
  if (text == "float64") return ScalarKind::kFloat64;
  if (text == "int64") return ScalarKind::kInt64;
  throw UsageError("unknown scalar kind '" + std::string(text) + "' (expected float64 or int64)");
}

std::string format_wide(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string format_wide(__int128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  // Work in the unsigned domain so the most negative value does not overflow.
  unsigned __int128 u = negative ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string out;
  while (u != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (negative) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace apc
