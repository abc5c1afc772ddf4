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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "achgraph/query/ast.hpp"

namespace achgraph::query {

enum class ValidationErrc {
  UnboundVariable,
  KindMismatch,
  IllegalEdge,
  UntappedAggregate,
  MultipleTaps,
  NonNumericComparison,
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ValidationErrc code, const std::string& what, std::string subject = {})
      : std::runtime_error(what), code_(code), subject_(std::move(subject)) {}
  ValidationErrc code() const noexcept { return code_; }
  /// Variable name for UnboundVariable and KindMismatch.
  const std::string& subject() const noexcept { return subject_; }

 private:
  ValidationErrc code_;
  std::string subject_;
};

/// A validated query plus the resolved kind of each variable bound by the
/// positive patterns, in order of first appearance.
struct TypedQuery {
  Query ast;
  std::vector<std::string> vars;
  std::vector<VertexKind> kinds;

  std::optional<std::size_t> var_index(std::string_view name) const;
};

/// True when the edge kind joins the two vertex kinds, in either order.
bool legal_triple(VertexKind left, EdgeKind edge, VertexKind right);

TypedQuery validate(Query ast);

}  // namespace achgraph::query
