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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "achgraph/attr.hpp"

namespace achgraph {

enum class VertexKind : std::uint8_t { Player, Game, Developer, Genre };
enum class EdgeKind : std::uint8_t { Friend, Owns, DevelopedBy, HasGenre };

inline constexpr std::array<VertexKind, 4> kAllVertexKinds = {
    VertexKind::Player, VertexKind::Game, VertexKind::Developer, VertexKind::Genre};
inline constexpr std::array<EdgeKind, 4> kAllEdgeKinds = {
    EdgeKind::Friend, EdgeKind::Owns, EdgeKind::DevelopedBy, EdgeKind::HasGenre};

/// Query-language spelling: V_P, V_G, V_D, V_R.
std::string_view symbol(VertexKind k);
/// Query-language spelling: E_F, E_O, E_D, E_R.
std::string_view symbol(EdgeKind k);
std::string_view name(VertexKind k);
std::string_view name(EdgeKind k);

/// Endpoint kinds for an edge kind. Friend is undirected Player-Player.
struct EdgeSchema {
  VertexKind src;
  VertexKind dst;
  bool undirected;
};
EdgeSchema schema_of(EdgeKind k);

/// Attribute that every vertex of the kind must carry.
std::string_view required_attr(VertexKind k);

struct VertexId {
  std::uint32_t value = 0;
  friend auto operator<=>(VertexId, VertexId) = default;
};

struct EdgeId {
  std::uint32_t value = 0;
  friend auto operator<=>(EdgeId, EdgeId) = default;
};

struct Vertex {
  VertexId id;
  VertexKind kind;
  AttrMap attrs;
  /// Non-scalar fields from the source record, kept as JSON text.
  std::map<std::string, std::string, std::less<>> raw;
};

struct Edge {
  EdgeId id;
  EdgeKind kind;
  VertexId src;
  VertexId dst;
  AttrMap attrs;
  std::map<std::string, std::string, std::less<>> raw;
};

enum class Direction : std::uint8_t { Out, In, Any };

struct Adjacent {
  EdgeId edge;
  VertexId vertex;
  /// Orders by neighbor, then edge.
  friend auto operator<=>(const Adjacent& a, const Adjacent& b) {
    if (auto c = a.vertex <=> b.vertex; c != 0) return c;
    return a.edge <=> b.edge;
  }
  friend bool operator==(const Adjacent&, const Adjacent&) = default;
};

enum class GraphErrc {
  MissingRequiredAttr,
  InvalidAttr,
  EndpointKindMismatch,
  SelfFriend,
  DuplicateEdge,
  UnknownVertex,
  UnknownEdge,
  Frozen,
};

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  GraphErrc code() const noexcept { return code_; }

 private:
  GraphErrc code_;
};

/// Typed property graph over players, games, developers and genres.
///
/// Built single-threaded, then frozen. After freeze() no method mutates the
/// graph, so a frozen graph can be shared across threads for queries.
/// Adjacency lists are kept sorted by (neighbor id, edge id).
class PropertyGraph {
 public:
  VertexId add_vertex(VertexKind kind, AttrMap attrs);
  EdgeId add_edge(EdgeKind kind, VertexId src, VertexId dst, AttrMap attrs = {});
  void set_edge_attr(EdgeId e, std::string_view name, AttrValue value);

  Vertex& mutable_vertex(VertexId v);
  Edge& mutable_edge(EdgeId e);

  void freeze() noexcept { frozen_ = true; }
  bool frozen() const noexcept { return frozen_; }

  const Vertex& vertex(VertexId v) const;
  const Edge& edge(EdgeId e) const;
  bool contains(VertexId v) const noexcept { return v.value < vertices_.size(); }
  bool contains(EdgeId e) const noexcept { return e.value < edges_.size(); }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t count(VertexKind k) const noexcept { return vertex_counts_[static_cast<std::size_t>(k)]; }
  std::size_t count(EdgeKind k) const noexcept { return edge_counts_[static_cast<std::size_t>(k)]; }

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  /// Vertex ids of one kind, ascending.
  std::span<const VertexId> vertices_of(VertexKind k) const noexcept {
    return by_kind_[static_cast<std::size_t>(k)];
  }

  /// Adjacency for one edge kind. For Friend, Out and In list the edges where
  /// v is the stored src and dst respectively; Any lists both.
  std::vector<Adjacent> neighbors(VertexId v, EdgeKind kind, Direction dir) const;

  /// Zero-copy view for Out and In. Any on Friend needs neighbors().
  std::span<const Adjacent> adjacency(VertexId v, EdgeKind kind, Direction dir) const;

  /// Edge of `kind` from src to dst. Friend matches either orientation.
  std::optional<EdgeId> find_edge(EdgeKind kind, VertexId src, VertexId dst) const;

  std::optional<VertexId> find_player(std::string_view steamid) const;
  std::optional<VertexId> find_game(std::int64_t appid) const;

 private:
  struct VertexAdjacency {
    std::array<std::vector<Adjacent>, 4> out;
    std::array<std::vector<Adjacent>, 4> in;
  };

  void check_mutable() const;
  void check_vertex(VertexId v) const;
  static std::uint64_t edge_key(EdgeKind kind, VertexId src, VertexId dst) noexcept;

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<VertexAdjacency> adjacency_;
  std::array<std::vector<VertexId>, 4> by_kind_;
  std::array<std::size_t, 4> vertex_counts_{};
  std::array<std::size_t, 4> edge_counts_{};
  std::unordered_map<std::uint64_t, EdgeId> edge_index_;
  std::unordered_map<std::string, VertexId> steamid_index_;
  std::unordered_map<std::int64_t, VertexId> appid_index_;
  bool frozen_ = false;
};

}  // namespace achgraph

template <>
struct std::hash<achgraph::VertexId> {
  std::size_t operator()(achgraph::VertexId v) const noexcept { return std::hash<std::uint32_t>{}(v.value); }
};
