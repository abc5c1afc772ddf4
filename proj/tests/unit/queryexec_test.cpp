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

#include <doctest.h>

#include <random>

#include "achgraph/attainment.hpp"
#include "achgraph/dataset.hpp"
#include "achgraph/query/exec.hpp"
#include "achgraph/query/parser.hpp"
#include "achgraph/query/refine.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace achgraph;
using namespace achgraph::query;
using achgraph::testing::make_fixture_f;

namespace {

QueryResult run(const std::string& text, const PropertyGraph& g) { return evaluate(validate(parse(text)), g); }
QueryResult run(const Query& q, const PropertyGraph& g) { return evaluate(validate(q), g); }

std::vector<std::vector<std::string>> rendered(const QueryResult& r) {
  std::vector<std::vector<std::string>> out;
  for (const auto& row : r.rows) out.push_back(render_row(r, row));
  return out;
}

void check_against_oracle(const Query& q, const PropertyGraph& g) {
  const TypedQuery tq = validate(q);
  const QueryResult got = evaluate(tq, g);
  const testing::OracleResult want = testing::oracle_evaluate(tq, g);
  CAPTURE(unparse(q));
  CHECK(got.total_rows == want.total_rows);
  REQUIRE(got.rows.size() == want.rows.size());
  for (std::size_t i = 0; i < got.rows.size(); ++i) {
    CHECK(got.rows[i].binding == want.rows[i].binding);
    CHECK(got.rows[i].key == want.rows[i].key);
    CHECK(render_row(got, got.rows[i]) == want.rows[i].cells);
  }
}

}  // namespace

TEST_SUITE("queryexec") {
  TEST_CASE("empty graph has no embeddings") {
    PropertyGraph g;
    CHECK(embeddings(g, parse("SELECT a.x PATTERNS V_P(a)-E_O-V_G").patterns[0]).empty());
    CHECK(run("SELECT b.name PATTERNS V_G(b)", g).rows.empty());
  }

  TEST_CASE("friend-owns embeddings from P1") {
    auto f = make_fixture_f();
    f.graph.freeze();
    const Pattern p = parse("SELECT b.name PATTERNS V_P(a)-E_F-V_P-E_O-V_G(b)").patterns[0];
    const auto es = embeddings(f.graph, p, {{"a", f.p1}});
    REQUIRE(es.size() == 3);
    CHECK(es[0].vertices == std::vector<VertexId>{f.p1, f.p2, f.g2});
    CHECK(es[1].vertices == std::vector<VertexId>{f.p1, f.p2, f.g3});
    CHECK(es[2].vertices == std::vector<VertexId>{f.p1, f.p3, f.g2});
    CHECK(testing::oracle_embedding_count(f.graph, p, {{"a", f.p1}}) == 3);
    CHECK(embeddings(f.graph, p).size() == testing::oracle_embedding_count(f.graph, p, {}));
  }

  TEST_CASE("single-vertex pattern yields each game once") {
    auto f = make_fixture_f();
    const auto es = embeddings(f.graph, parse("SELECT b.name PATTERNS V_G(b)").patterns[0]);
    REQUIRE(es.size() == 3);
    CHECK(es[0].vertices[0] == f.g1);
    CHECK(es[2].vertices[0] == f.g3);
  }

  TEST_CASE("recommendation listing on fixture F") {
    auto f = make_fixture_f();
    f.graph.freeze();
    const Query q = parse(testing::read_file(ACHGRAPH_LISTING_FILE));
    const QueryResult r = run(q, f.graph);
    CHECK(r.columns == std::vector<std::string>{"b.name", "b.cost", "avg"});
    REQUIRE(r.rows.size() == 1);
    CHECK(r.total_rows == 1);
    CHECK(r.rows[0].binding == std::vector<VertexId>{f.p1, f.g2});
    REQUIRE(r.rows[0].key);
    CHECK(*r.rows[0].key == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(rendered(r)[0] == std::vector<std::string>{"g2", "19.99", "0.6"});

    CHECK(rendered(run(exclude_owned(q), f.graph)) == rendered(r));
    CHECK(run(restrict_genre(q, "Strategy"), f.graph).rows.empty());
    CHECK(run(restrict_genre(q, "Action"), f.graph).rows.size() == 1);

    auto owned = make_fixture_f(true);
    owned.graph.freeze();
    CHECK(run(q, owned.graph).rows.size() == 1);
    CHECK(run(exclude_owned(q), owned.graph).rows.empty());
  }

  TEST_CASE("fixture F loaded from disk gives the same answer") {
    Dataset ds = load_dataset(testing::fixture_dir());
    annotate_graph(ds.graph, ds.achievements);
    ds.graph.freeze();
    const QueryResult r = run(testing::read_file(ACHGRAPH_LISTING_FILE), ds.graph);
    REQUIRE(r.rows.size() == 1);
    CHECK(rendered(r)[0] == std::vector<std::string>{"g2", "19.99", "0.6"});
  }

  TEST_CASE("aggregate over friend ratings") {
    auto f = make_fixture_f();
    const Pattern agg = parse("SELECT a.x PATTERNS V_P(a) ORDERBY AVG(V_P(a)-E_F-V_P-E_O.attainmentRating-V_G(b))")
                            .orderby->pattern;
    CHECK(*aggregate_avg(f.graph, agg, {{"a", f.p1}, {"b", f.g2}}) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(*aggregate_avg(f.graph, agg, {{"a", f.p1}, {"b", f.g3}}) == 0.9);
    CHECK_FALSE(aggregate_avg(f.graph, agg, {{"a", f.p1}, {"b", f.g1}}));

    f.graph.add_edge(EdgeKind::Owns, f.p3, f.g3);
    CHECK_THROWS_AS(aggregate_avg(f.graph, agg, {{"a", f.p1}, {"b", f.g3}}), TapAttributeMissing);
  }

  TEST_CASE("atoms may map to the same vertex") {
    PropertyGraph g;
    const auto a = g.add_vertex(VertexKind::Player, {{"steamid", std::string("1")}});
    const auto other = g.add_vertex(VertexKind::Player, {{"steamid", std::string("2")}});
    const auto d = g.add_vertex(VertexKind::Developer, {{"name", std::string("solo")}});
    const auto b = g.add_vertex(VertexKind::Game, {{"name", std::string("b")}});
    g.add_edge(EdgeKind::DevelopedBy, b, d);
    g.add_edge(EdgeKind::Owns, a, b);
    g.freeze();
    const auto r = run("SELECT a.steamid, b.name PATTERNS V_P(a)-E_O-V_G-E_D-V_D-E_D-V_G(b)", g);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.rows[0].binding == std::vector<VertexId>{a, b});
    CHECK(run("SELECT a.steamid PATTERNS V_P(a)-E_O-V_G-E_D-V_D-E_D-V_G(b) WHERE a.steamid=2", g).rows.empty());
    (void)other;
  }

  TEST_CASE("missing projected attributes render as empty cells") {
    auto f = make_fixture_f();
    const auto r = run("SELECT a.name, a.nickname PATTERNS V_P(a) WHERE a.name=P2", f.graph);
    REQUIRE(r.rows.size() == 1);
    CHECK_FALSE(r.rows[0].cells[1]);
    CHECK(rendered(r)[0] == std::vector<std::string>{"P2", ""});
  }

  TEST_CASE("conditions compare text and numbers") {
    auto f = make_fixture_f();
    CHECK(run("SELECT b.name PATTERNS V_G(b) WHERE b.cost>10", f.graph).rows.size() == 2);
    CHECK(run("SELECT b.name PATTERNS V_G(b) WHERE b.cost<=19.99", f.graph).rows.size() == 2);
    CHECK(run("SELECT b.name PATTERNS V_G(b) WHERE b.appid=20", f.graph).rows.size() == 1);
    CHECK(run("SELECT b.name PATTERNS V_G(b) WHERE b.name!=g1", f.graph).rows.size() == 2);
    CHECK(run("SELECT b.name PATTERNS V_G(b) WHERE b.name=\"g3\"", f.graph).rows.size() == 1);
    CHECK(run("SELECT a.name PATTERNS V_P(a) WHERE a.steamid=76561197960653977", f.graph).rows.size() == 1);
    CHECK(run("SELECT a.name PATTERNS V_P(a) WHERE a.steamid>5", f.graph).rows.empty());
    CHECK(run("SELECT b.name PATTERNS V_G(b) WHERE b.nothing!=1", f.graph).rows.empty());
  }

  TEST_CASE("rows without an aggregate sort last, ties by binding") {
    auto f = make_fixture_f();
    const auto r = run("SELECT b.name PATTERNS V_G(b) ORDERBY AVG(V_P-E_O.attainmentRating-V_G(b))", f.graph);
    CHECK(rendered(r) == std::vector<std::vector<std::string>>{{"g3", "0.9"}, {"g2", "0.6"}, {"g1", "0.5"}});
    const auto g4 = f.graph.add_vertex(VertexKind::Game, {{"name", std::string("g4")}});
    // Unanchored friend pairs match in both directions, so g1 is reached
    // through P1's friends: (0.5 + 0.5) / 2.
    const auto asc = run("SELECT b.name PATTERNS V_G(b) ORDERBY AVG(V_P-E_F-V_P-E_O.attainmentRating-V_G(b)) ASC",
                         f.graph);
    REQUIRE(asc.rows.size() == 4);
    CHECK(asc.rows[0].binding[0] == f.g1);
    CHECK(asc.rows[1].binding[0] == f.g2);
    CHECK(asc.rows[2].binding[0] == f.g3);
    CHECK(asc.rows[3].binding[0] == g4);
    CHECK_FALSE(asc.rows[3].key);
  }

  TEST_CASE("LIMIT keeps a prefix and reports the full count") {
    auto f = make_fixture_f();
    const std::string base = "SELECT a.name, b.name PATTERNS V_P(a)-E_O-V_G(b)";
    const auto all = run(base, f.graph);
    const auto two = run(base + " LIMIT 2", f.graph);
    CHECK(all.rows.size() == 4);
    CHECK(two.total_rows == 4);
    REQUIRE(two.rows.size() == 2);
    CHECK(two.rows[0].binding == all.rows[0].binding);
    CHECK(two.rows[1].binding == all.rows[1].binding);
  }

  TEST_CASE("engine agrees with the brute-force oracle on random inputs") {
    std::mt19937_64 rng(99);
    int cases = 0, nonempty = 0;
    while (cases < 250) {
      PropertyGraph g = testing::random_graph(rng);
      g.freeze();
      for (int k = 0; k < 5; ++k, ++cases) {
        const Query q = testing::random_query(rng, g);
        check_against_oracle(q, g);
        nonempty += !run(q, g).rows.empty();
      }
    }
    CHECK(nonempty > 50);
  }

  TEST_CASE("limit, antipattern and determinism properties") {
    std::mt19937_64 rng(123);
    for (int i = 0; i < 100; ++i) {
      PropertyGraph g = testing::random_graph(rng);
      g.freeze();
      Query q = testing::random_query(rng, g);
      q.limit.reset();
      const auto full = run(q, g);
      const auto again = run(q, g);
      REQUIRE(full.rows.size() == again.rows.size());
      for (std::size_t r = 0; r < full.rows.size(); ++r) CHECK(full.rows[r].binding == again.rows[r].binding);

      Query limited = q;
      limited.limit = 1 + static_cast<std::int64_t>(i % 4);
      const auto part = run(limited, g);
      CHECK(part.rows.size() == std::min<std::size_t>(full.rows.size(), *limited.limit));
      for (std::size_t r = 0; r < part.rows.size(); ++r) CHECK(part.rows[r].binding == full.rows[r].binding);

      Query negated = exclude_owned(q, "a", "b");
      try {
        const auto fewer = run(negated, g);
        for (const auto& row : fewer.rows) {
          CHECK(std::any_of(full.rows.begin(), full.rows.end(),
                            [&](const ResultRow& x) { return x.binding == row.binding; }));
        }
      } catch (const ValidationError&) {
        // a or b is not bound in this query
      }
    }
  }
}
