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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "achgraph/query/ast.hpp"

namespace achgraph::query {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, std::size_t column, std::string expected, std::string found);
  /// 1-based position inside the input text.
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
  std::string found_;
};

Query parse(std::string_view text);

/// Canonical single-line text. parse(unparse(q)) == q.
std::string unparse(const Query& q);
std::string unparse(const Pattern& p);
std::string unparse(const Condition& c);
std::string unparse(const Literal& lit);

/// Plain identifier that is neither a keyword nor a kind symbol.
bool is_plain_identifier(std::string_view s);

}  // namespace achgraph::query
