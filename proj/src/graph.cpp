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

#include "achgraph/graph.hpp"

#include <algorithm>
#include <cmath>

namespace achgraph {

namespace {

std::size_t idx(VertexKind k) { return static_cast<std::size_t>(k); }
std::size_t idx(EdgeKind k) { return static_cast<std::size_t>(k); }

void insert_sorted(std::vector<Adjacent>& list, Adjacent a) {
  list.insert(std::upper_bound(list.begin(), list.end(), a), a);
}

void check_attrs(const AttrMap& attrs) {
  for (const auto& [key, value] : attrs) {
    if (key.empty()) throw GraphError(GraphErrc::InvalidAttr, "attribute name must be non-empty");
    if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d)) {
      throw GraphError(GraphErrc::InvalidAttr, "attribute '" + key + "' is not finite");
    }
  }
}

}  // namespace

std::string_view symbol(VertexKind k) {
  switch (k) {
    case VertexKind::Player: return "V_P";
    case VertexKind::Game: return "V_G";
    case VertexKind::Developer: return "V_D";
    case VertexKind::Genre: return "V_R";
  }
  return "?";
}

std::string_view symbol(EdgeKind k) {
  switch (k) {
    case EdgeKind::Friend: return "E_F";
    case EdgeKind::Owns: return "E_O";
    case EdgeKind::DevelopedBy: return "E_D";
    case EdgeKind::HasGenre: return "E_R";
  }
  return "?";
}

std::string_view name(VertexKind k) {
  switch (k) {
    case VertexKind::Player: return "Player";
    case VertexKind::Game: return "Game";
    case VertexKind::Developer: return "Developer";
    case VertexKind::Genre: return "Genre";
  }
  return "?";
}

std::string_view name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Friend: return "Friend";
    case EdgeKind::Owns: return "Owns";
    case EdgeKind::DevelopedBy: return "DevelopedBy";
    case EdgeKind::HasGenre: return "HasGenre";
  }
  return "?";
}

EdgeSchema schema_of(EdgeKind k) {
  switch (k) {
    case EdgeKind::Friend: return {VertexKind::Player, VertexKind::Player, true};
    case EdgeKind::Owns: return {VertexKind::Player, VertexKind::Game, false};
    case EdgeKind::DevelopedBy: return {VertexKind::Game, VertexKind::Developer, false};
    case EdgeKind::HasGenre: return {VertexKind::Game, VertexKind::Genre, false};
  }
  return {VertexKind::Player, VertexKind::Player, true};
}

std::string_view required_attr(VertexKind k) {
  switch (k) {
    case VertexKind::Player: return "steamid";
    case VertexKind::Game: return "name";
    case VertexKind::Developer: return "name";
    case VertexKind::Genre: return "description";
  }
  return "";
}

void PropertyGraph::check_mutable() const {
  if (frozen_) throw GraphError(GraphErrc::Frozen, "graph is frozen");
}

void PropertyGraph::check_vertex(VertexId v) const {
  if (!contains(v)) throw GraphError(GraphErrc::UnknownVertex, "unknown vertex " + std::to_string(v.value));
}

std::uint64_t PropertyGraph::edge_key(EdgeKind kind, VertexId src, VertexId dst) noexcept {
  return (static_cast<std::uint64_t>(kind) << 62) | (static_cast<std::uint64_t>(src.value) << 31) |
         static_cast<std::uint64_t>(dst.value);
}

VertexId PropertyGraph::add_vertex(VertexKind kind, AttrMap attrs) {
  check_mutable();
  check_attrs(attrs);
  const auto required = required_attr(kind);
  const auto it = attrs.find(required);
  if (it == attrs.end()) {
    throw GraphError(GraphErrc::MissingRequiredAttr, std::string(required));
  }
  // Player steamid and game appid double as external keys.
  std::optional<std::string> steamid;
  if (kind == VertexKind::Player) {
    steamid = render(it->second);
    if (steamid_index_.contains(*steamid)) {
      throw GraphError(GraphErrc::InvalidAttr, "duplicate steamid " + *steamid);
    }
  }
  std::optional<std::int64_t> appid;
  if (kind == VertexKind::Game) {
    if (auto a = attrs.find("appid"); a != attrs.end()) {
      if (const auto* i = std::get_if<std::int64_t>(&a->second)) {
        if (appid_index_.contains(*i)) throw GraphError(GraphErrc::InvalidAttr, "duplicate appid " + std::to_string(*i));
        appid = *i;
      }
    }
  }
  if (vertices_.size() >= (1u << 31)) throw GraphError(GraphErrc::InvalidAttr, "too many vertices");

  const VertexId id{static_cast<std::uint32_t>(vertices_.size())};
  vertices_.push_back(Vertex{id, kind, std::move(attrs), {}});
  adjacency_.emplace_back();
  by_kind_[idx(kind)].push_back(id);
  ++vertex_counts_[idx(kind)];
  if (steamid) steamid_index_.emplace(std::move(*steamid), id);
  if (appid) appid_index_.emplace(*appid, id);
  return id;
}

EdgeId PropertyGraph::add_edge(EdgeKind kind, VertexId src, VertexId dst, AttrMap attrs) {
  check_mutable();
  check_vertex(src);
  check_vertex(dst);
  check_attrs(attrs);
  const EdgeSchema schema = schema_of(kind);
  const auto& s = vertices_[src.value];
  const auto& d = vertices_[dst.value];
  if (s.kind != schema.src || d.kind != schema.dst) {
    throw GraphError(GraphErrc::EndpointKindMismatch,
                     std::string(symbol(kind)) + " joins " + std::string(name(schema.src)) + " to " +
                         std::string(name(schema.dst)) + ", got " + std::string(name(s.kind)) + " to " +
                         std::string(name(d.kind)));
  }
  if (kind == EdgeKind::Friend && src == dst) {
    throw GraphError(GraphErrc::SelfFriend, "player cannot befriend itself");
  }
  if (find_edge(kind, src, dst)) {
    throw GraphError(GraphErrc::DuplicateEdge, std::string(symbol(kind)) + " edge " + std::to_string(src.value) +
                                                   "->" + std::to_string(dst.value) + " already exists");
  }

  const EdgeId id{static_cast<std::uint32_t>(edges_.size())};
  edges_.push_back(Edge{id, kind, src, dst, std::move(attrs), {}});
  edge_index_.emplace(edge_key(kind, src, dst), id);
  insert_sorted(adjacency_[src.value].out[idx(kind)], Adjacent{id, dst});
  insert_sorted(adjacency_[dst.value].in[idx(kind)], Adjacent{id, src});
  ++edge_counts_[idx(kind)];
  return id;
}

void PropertyGraph::set_edge_attr(EdgeId e, std::string_view attr, AttrValue value) {
  check_mutable();
  if (!contains(e)) throw GraphError(GraphErrc::UnknownEdge, "unknown edge " + std::to_string(e.value));
  if (attr.empty()) throw GraphError(GraphErrc::InvalidAttr, "attribute name must be non-empty");
  if (const auto* d = std::get_if<double>(&value); d && !std::isfinite(*d)) {
    throw GraphError(GraphErrc::InvalidAttr, "attribute '" + std::string(attr) + "' is not finite");
  }
  auto& attrs = edges_[e.value].attrs;
  if (auto it = attrs.find(attr); it != attrs.end()) {
    it->second = std::move(value);
  } else {
    attrs.emplace(std::string(attr), std::move(value));
  }
}

Vertex& PropertyGraph::mutable_vertex(VertexId v) {
  check_mutable();
  check_vertex(v);
  return vertices_[v.value];
}

Edge& PropertyGraph::mutable_edge(EdgeId e) {
  check_mutable();
  if (!contains(e)) throw GraphError(GraphErrc::UnknownEdge, "unknown edge " + std::to_string(e.value));
  return edges_[e.value];
}

const Vertex& PropertyGraph::vertex(VertexId v) const {
  check_vertex(v);
  return vertices_[v.value];
}

const Edge& PropertyGraph::edge(EdgeId e) const {
  if (!contains(e)) throw GraphError(GraphErrc::UnknownEdge, "unknown edge " + std::to_string(e.value));
  return edges_[e.value];
}

std::span<const Adjacent> PropertyGraph::adjacency(VertexId v, EdgeKind kind, Direction dir) const {
  check_vertex(v);
  const auto& a = adjacency_[v.value];
  switch (dir) {
    case Direction::Out: return a.out[idx(kind)];
    case Direction::In: return a.in[idx(kind)];
    case Direction::Any:
      // Only one side is ever populated for directed kinds of a given vertex.
      if (a.in[idx(kind)].empty()) return a.out[idx(kind)];
      if (a.out[idx(kind)].empty()) return a.in[idx(kind)];
      break;
  }
  throw std::logic_error("adjacency(Any) spans both directions; use neighbors()");
}

std::vector<Adjacent> PropertyGraph::neighbors(VertexId v, EdgeKind kind, Direction dir) const {
  check_vertex(v);
  const auto& a = adjacency_[v.value];
  if (dir == Direction::Out) return a.out[idx(kind)];
  if (dir == Direction::In) return a.in[idx(kind)];
  std::vector<Adjacent> merged;
  merged.reserve(a.out[idx(kind)].size() + a.in[idx(kind)].size());
  std::merge(a.out[idx(kind)].begin(), a.out[idx(kind)].end(), a.in[idx(kind)].begin(), a.in[idx(kind)].end(),
             std::back_inserter(merged));
  return merged;
}

std::optional<EdgeId> PropertyGraph::find_edge(EdgeKind kind, VertexId src, VertexId dst) const {
  if (auto it = edge_index_.find(edge_key(kind, src, dst)); it != edge_index_.end()) return it->second;
  if (kind == EdgeKind::Friend) {
    if (auto it = edge_index_.find(edge_key(kind, dst, src)); it != edge_index_.end()) return it->second;
  }
  return std::nullopt;
}

std::optional<VertexId> PropertyGraph::find_player(std::string_view steamid) const {
  if (auto it = steamid_index_.find(std::string(steamid)); it != steamid_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<VertexId> PropertyGraph::find_game(std::int64_t appid) const {
  if (auto it = appid_index_.find(appid); it != appid_index_.end()) return it->second;
  return std::nullopt;
}

}  // namespace achgraph
