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

#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <vector>

#include <unistd.h>

#include "achgraph/attainment.hpp"

namespace achgraph::testing {

FixtureF make_fixture_f(bool p1_owns_g2) {
  FixtureF f;
  auto& g = f.graph;
  f.p1 = g.add_vertex(VertexKind::Player, {{"steamid", std::string(kP1Steamid)}, {"name", std::string("P1")}});
  f.p2 = g.add_vertex(VertexKind::Player, {{"steamid", std::string("76561197960653977")}, {"name", std::string("P2")}});
  f.p3 = g.add_vertex(VertexKind::Player, {{"steamid", std::string("76561197960653978")}, {"name", std::string("P3")}});
  f.d1 = g.add_vertex(VertexKind::Developer, {{"name", std::string("D1")}});
  f.d2 = g.add_vertex(VertexKind::Developer, {{"name", std::string("D2")}});
  f.strategy = g.add_vertex(VertexKind::Genre, {{"description", std::string("Strategy")}});
  f.action = g.add_vertex(VertexKind::Genre, {{"description", std::string("Action")}});
  f.g1 = g.add_vertex(VertexKind::Game, {{"appid", std::int64_t{10}}, {"name", std::string("g1")}, {"cost", 9.99}});
  f.g2 = g.add_vertex(VertexKind::Game, {{"appid", std::int64_t{20}}, {"name", std::string("g2")}, {"cost", 19.99}});
  f.g3 = g.add_vertex(VertexKind::Game, {{"appid", std::int64_t{30}}, {"name", std::string("g3")}, {"cost", 29.99}});
  g.add_edge(EdgeKind::DevelopedBy, f.g1, f.d1);
  g.add_edge(EdgeKind::DevelopedBy, f.g2, f.d1);
  g.add_edge(EdgeKind::DevelopedBy, f.g3, f.d2);
  g.add_edge(EdgeKind::HasGenre, f.g1, f.strategy);
  g.add_edge(EdgeKind::HasGenre, f.g2, f.action);
  g.add_edge(EdgeKind::HasGenre, f.g3, f.strategy);
  g.add_edge(EdgeKind::Friend, f.p1, f.p2);
  g.add_edge(EdgeKind::Friend, f.p1, f.p3);
  const std::string tap(kAttainmentAttr);
  g.add_edge(EdgeKind::Owns, f.p1, f.g1, {{tap, 0.5}});
  g.add_edge(EdgeKind::Owns, f.p2, f.g2, {{tap, 0.8}});
  g.add_edge(EdgeKind::Owns, f.p2, f.g3, {{tap, 0.9}});
  g.add_edge(EdgeKind::Owns, f.p3, f.g2, {{tap, 0.4}});
  if (p1_owns_g2) g.add_edge(EdgeKind::Owns, f.p1, f.g2, {{tap, 0.2}});
  return f;
}

std::filesystem::path fixture_dir() { return ACHGRAPH_FIXTURE_DIR; }

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

namespace {

// Directories handed out by temp_dir, removed at process exit.
struct TempRegistry {
  std::mutex mu;
  std::vector<std::filesystem::path> dirs;
  ~TempRegistry() {
    for (const auto& d : dirs) {
      std::error_code ec;
      std::filesystem::remove_all(d, ec);
    }
  }
};

TempRegistry& registry() {
  static TempRegistry r;
  return r;
}

}  // namespace

std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("achgraph-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto& r = registry();
  const std::lock_guard lock(r.mu);
  r.dirs.push_back(dir);
  return dir;
}

}  // namespace achgraph::testing
