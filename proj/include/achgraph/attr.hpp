// Copyright 2026 The achgraph Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace achgraph {

/// Scalar attribute value attached to vertices and edges.
using AttrValue = std::variant<std::int64_t, double, std::string, bool>;

/// Attribute maps are ordered so that serialization is deterministic.
using AttrMap = std::map<std::string, AttrValue, std::less<>>;

inline bool is_numeric(const AttrValue& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

/// Numeric view of an attribute; nullopt for text and booleans.
std::optional<double> as_real(const AttrValue& v);

/// Text rendering used for result cells and text comparisons. Reals use the
/// shortest representation that round-trips.
std::string render(const AttrValue& v);

/// Shortest round-trip decimal form of a double.
std::string format_real(double v);

/// Fixed-significance form ("%.*g").
std::string format_real(double v, int significant_digits);

}  // namespace achgraph
