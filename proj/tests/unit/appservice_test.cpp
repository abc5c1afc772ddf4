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

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "achgraph/app/cli.hpp"
#include "achgraph/app/http.hpp"
#include "achgraph/app/service.hpp"
#include "achgraph/cf.hpp"
#include "fixtures.hpp"

using namespace achgraph;
using namespace achgraph::app;
using nlohmann::json;

namespace {

const std::string kListing = testing::read_file(ACHGRAPH_LISTING_FILE);

const std::string kNewGame =
    "SELECT V_G(b).name, V_G(b).cost PATTERNS V_P(a)-E_F-V_P-E_O-V_G(b) V_P(a)-E_O-V_G-E_D-V_D-E_D-V_G(b) "
    "ANTIPATTERNS V_P(a)-E_O-V_G(b) WHERE V_P(a).steamid=76561197960653976 "
    "ORDERBY AVG(V_P(a)-E_F-V_P-E_O.attainmentRating-V_G(b)) LIMIT 5";

const std::string kStrategy =
    "SELECT V_G(b).name, V_G(b).cost PATTERNS V_P(a)-E_F-V_P-E_O-V_G(b) V_P(a)-E_O-V_G-E_D-V_D-E_D-V_G(b) "
    "V_G(b)-E_R-V_R ANTIPATTERNS V_P(a)-E_O-V_G(b) "
    "WHERE V_P(a).steamid=76561197960653976 AND V_R.description=Strategy "
    "ORDERBY AVG(V_P(a)-E_F-V_P-E_O.attainmentRating-V_G(b)) LIMIT 5";

const std::string kPlayers = "SELECT V_P(a).name, V_P(a).steamid PATTERNS V_P(a)-E_F-V_P(b)";

using Rows = std::vector<std::vector<std::string>>;

const Service& fixture_service() {
  static const Service svc = Service::load(testing::fixture_dir());
  return svc;
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "achgraph");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

/// Server on a free local port, serving on a background thread.
struct TestServer {
  explicit TestServer(std::shared_ptr<const Service> svc, bool load = false, std::filesystem::path data = {}) {
    AppConfig c;
    c.port = 0;
    c.cors_origin = "http://console.test";
    c.data = std::move(data);
    server = std::make_unique<HttpServer>(c);
    if (svc) server->set_service(std::move(svc));
    if (load) server->load_async();
    port = server->bind();
    thread = std::thread([this] { server->run(); });
    server->wait_until_ready();
  }
  ~TestServer() {
    server->stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }

  std::unique_ptr<HttpServer> server;
  int port = 0;
  std::thread thread;
};

std::shared_ptr<const Service> shared_fixture() {
  return std::make_shared<const Service>(Service::load(testing::fixture_dir()));
}

std::string query_body(const std::string& text) { return json{{"text", text}}.dump(); }

Rows rows_of(const std::string& body) { return json::parse(body).at("rows").get<Rows>(); }

Rows tsv_rows(const std::string& tsv) {
  Rows out;
  std::istringstream in(tsv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_SUITE("appservice") {
  TEST_CASE("config checks") {
    AppConfig c;
    c.data = testing::fixture_dir();
    CHECK_NOTHROW(c.check());
    c.port = 0;
    CHECK_THROWS_AS(c.check(), UsageError);
    CHECK_NOTHROW(c.check(true));
    c.port = 65536;
    CHECK_THROWS_AS(c.check(), UsageError);
    c.port = 8080;
    c.default_limit = 0;
    CHECK_THROWS_AS(c.check(), UsageError);
    c.default_limit = 10;
    c.data = testing::fixture_dir() / "missing";
    CHECK_THROWS_AS(c.check(), DataError);
  }

  TEST_CASE("service runs the listing query on fixture F") {
    const auto r = fixture_service().run_query(kListing);
    CHECK(r.columns.size() == 3);
    CHECK(r.rows == Rows{{"g2", "19.99", "0.6"}});
    CHECK(r.total_rows == 1);
    CHECK(r.elapsed_ms >= 0.0);
    for (const auto& row : r.rows) CHECK(row.size() == r.columns.size());
    CHECK(to_tsv(r) == "g2\t19.99\t0.6\n");
    CHECK(to_tsv(r, true).substr(0, to_tsv(r, true).find('\n')).find('\t') != std::string::npos);
  }

  TEST_CASE("default limit applies only to queries without one") {
    const Service svc(load_dataset(testing::fixture_dir()), 1);
    const auto r = svc.run_query(kPlayers);
    CHECK(r.rows.size() == 1);
    CHECK(r.total_rows == 4);
    CHECK(r.query.find("LIMIT 1") != std::string::npos);
    CHECK(svc.run_query(kPlayers + " LIMIT 3").rows.size() == 3);
    CHECK_THROWS_AS(Service(load_dataset(testing::fixture_dir()), 0), UsageError);
  }

  TEST_CASE("query failures carry positions") {
    try {
      fixture_service().run_query("SELECT");
      FAIL("expected QueryFailure");
    } catch (const QueryFailure& e) {
      CHECK(e.line() == 1u);
      CHECK(e.column() == 6u);
      const auto j = to_json(e);
      CHECK(j["line"] == 1);
      CHECK(j["column"] == 6);
      CHECK(!j["message"].get<std::string>().empty());
    }
    try {
      fixture_service().run_query("SELECT V_G(b).name PATTERNS V_P(a)-E_O-V_G(c)");
      FAIL("expected QueryFailure");
    } catch (const QueryFailure& e) {
      CHECK_FALSE(e.line().has_value());
      CHECK(to_json(e)["line"].is_null());
    }
  }

  TEST_CASE("recommendations follow the refinement chain") {
    const auto& svc = fixture_service();
    RecommendationRequest r;
    r.steamid = testing::kP1Steamid;
    const auto sample = svc.recommendations(r);
    CHECK(sample.rows == Rows{{"g2", "19.99", "0.6"}});
    CHECK(sample.rows == svc.run_query(kListing).rows);
    r.exclude_owned = true;
    const auto fresh = svc.recommendations(r);
    CHECK(fresh.rows == svc.run_query(kNewGame).rows);
    CHECK(fresh.query.find("ANTIPATTERNS") != std::string::npos);
    r.genre = "Strategy";
    const auto strategy = svc.recommendations(r);
    CHECK(strategy.rows.empty());
    CHECK(strategy.rows == svc.run_query(kStrategy).rows);
    r.genre = "Action";
    CHECK(svc.recommendations(r).rows == Rows{{"g2", "19.99", "0.6"}});
    // The generated text parses back to the same result.
    CHECK(svc.run_query(strategy.query).rows == strategy.rows);

    r.steamid = "1";
    CHECK_THROWS_AS(svc.recommendations(r), NotFound);
    r.steamid = testing::kP1Steamid;
    r.n = 0;
    CHECK_THROWS_AS(svc.recommendations(r), UsageError);
  }

  TEST_CASE("histograms and schema") {
    const auto& svc = fixture_service();
    CHECK_THROWS_AS(svc.attainment_histograms(0), UsageError);
    const auto hists = svc.attainment_histograms(10);
    REQUIRE(hists.size() == 2);
    CHECK(hists[0].group == "Action");
    CHECK(hists[0].count == 2);
    const auto j = to_json(hists);
    CHECK(j[0]["edges"].size() == 11);
    CHECK(j[0]["densities"].size() == 10);

    const auto& s = svc.schema();
    CHECK(s["vertices"][0]["symbol"] == "V_P");
    CHECK(s["vertices"][0]["count"] == 3);
    CHECK(s["vertices"][1]["count"] == 3);
    CHECK(s["vertices"][2]["count"] == 2);
    CHECK(s["vertices"][3]["count"] == 2);
    CHECK(s["edges"][0]["undirected"] == true);
    const auto owns = s["edges"][1];
    CHECK(owns["symbol"] == "E_O");
    CHECK(owns["count"] == 4);
    const auto attrs = owns["attributes"].get<std::vector<std::string>>();
    CHECK(std::find(attrs.begin(), attrs.end(), "attainmentRating") != attrs.end());
  }

  TEST_CASE("cli: usage and exit codes") {
    auto r = cli({});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"query", "--help"}).code == 0);
    CHECK(cli({"query", "--data", testing::fixture_dir().string()}).code == 1);
    CHECK(cli({"query", "--bogus"}).code == 1);
    CHECK(cli({"serve", "--data", testing::fixture_dir().string(), "--port", "0"}).code == 1);
    r = cli({"query", "--data", (testing::fixture_dir() / "missing").string(), "--text", kListing});
    CHECK(r.code == 2);
    r = cli({"query", "--data", testing::fixture_dir().string(), "--text", "SELECT"});
    CHECK(r.code == 2);
    CHECK(r.err.find("1:6") != std::string::npos);
    for (const char* sub : {"gen", "rate", "query", "train", "eval-cf", "eval-pr", "fit-lomax", "hist", "serve"}) {
      const auto help = cli({sub, "--help"});
      CAPTURE(sub);
      CHECK(help.code == 0);
      CHECK(help.out.find("--seed") != std::string::npos);
      CHECK(help.out.find("--data") != std::string::npos);
    }
  }

  TEST_CASE("cli: query prints tab-separated rows") {
    const auto r = cli({"query", "--data", testing::fixture_dir().string(), "--file", ACHGRAPH_LISTING_FILE});
    CHECK(r.code == 0);
    CHECK(r.out == "g2\t19.99\t0.6\n");
    const auto h = cli({"query", "--data", testing::fixture_dir().string(), "--text", kListing, "--header"});
    CHECK(count_lines(h.out) == 2);
  }

  TEST_CASE("cli: rate, hist and plot data") {
    const auto dir = testing::temp_dir("cli-rate");
    auto r = cli({"rate", "--data", testing::fixture_dir().string(), "--out", (dir / "r.tsv").string()});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 4);
    CHECK(count_lines(testing::read_file(dir / "r.tsv")) == 5);
    r = cli({"hist", "--data", testing::fixture_dir().string(), "--bins", "4", "--plot-data",
             (dir / "plot.jsonl").string()});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 9);
    CHECK(count_lines(testing::read_file(dir / "plot.jsonl")) == 8);
    CHECK(cli({"hist", "--data", testing::fixture_dir().string(), "--bins", "0"}).code == 1);
  }

  TEST_CASE("cli: gen, fit-lomax, train and evaluation") {
    const auto dir = testing::temp_dir("cli-gen");
    auto r = cli({"gen", "--out", (dir / "d").string(), "--scale", "0.05", "--seed", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("players") != std::string::npos);
    r = cli({"gen", "--data", (dir / "e").string(), "--scale", "0.05", "--seed", "3"});
    CHECK(r.code == 0);
    CHECK(testing::read_file(dir / "d" / "ownership.jsonl") == testing::read_file(dir / "e" / "ownership.jsonl"));
    CHECK(cli({"gen", "--scale", "0.05"}).code == 1);
    {
      std::ofstream(dir / "bad.json") << R"({"nope": 1})";
    }
    CHECK(cli({"gen", "--out", (dir / "f").string(), "--config", (dir / "bad.json").string()}).code == 2);

    r = cli({"fit-lomax", "--data", (dir / "d").string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("shape\t") != std::string::npos);
    CHECK(r.out.find("ks_reference\t") != std::string::npos);

    const auto model = (dir / "m.bin").string();
    r = cli({"train", "--data", (dir / "d").string(), "--model", model, "--epochs", "3", "--seed", "5"});
    CHECK(r.code == 0);
    const auto m = cf::load_model(model);
    CHECK(m.seed == 5);
    CHECK(cli({"train", "--model", model}).code == 1);
    CHECK(cli({"train", "--planted", "--model", model, "--schedule", "sideways"}).code == 1);

    r = cli({"eval-cf", "--planted", "--epochs", "2"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 6);
    r = cli({"eval-pr", "--planted", "--epochs", "2", "--schedule", "per-user"});
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 12);
  }

  TEST_CASE("http: endpoints on fixture F") {
    TestServer s(shared_fixture());
    auto c = s.client();

    auto res = c.Post("/api/query", query_body(kListing), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://console.test");
    const auto body = json::parse(res->body);
    CHECK(body["rows"] == json::parse(R"([["g2","19.99","0.6"]])"));
    CHECK(body["total_rows"] == 1);
    CHECK(body["columns"].size() == 3);
    CHECK(body.contains("elapsed_ms"));

    res = c.Post("/api/query", query_body("SELECT"), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(json::parse(res->body)["column"] == 6);
    CHECK(json::parse(res->body)["line"] == 1);
    res = c.Post("/api/query", "not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = c.Post("/api/query", R"({"query": "x"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    const std::string rec = std::string("/api/players/") + testing::kP1Steamid + "/recommendations";
    res = c.Get(rec);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(rows_of(res->body) == Rows{{"g2", "19.99", "0.6"}});
    res = c.Get(rec + "?exclude_owned&genre=Strategy&n=3");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(rows_of(res->body).empty());
    CHECK(json::parse(res->body)["query"].get<std::string>().find("LIMIT 3") != std::string::npos);
    res = c.Get(rec + "?genre=Action");
    REQUIRE(res);
    CHECK(rows_of(res->body).size() == 1);
    res = c.Get("/api/players/42/recommendations");
    REQUIRE(res);
    CHECK(res->status == 404);
    res = c.Get(rec + "?n=abc");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = c.Get(rec + "?exclude_owned=maybe");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = c.Get("/api/stats/attainment?groupby=genre&bins=50");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto hists = json::parse(res->body);
    REQUIRE(hists.size() == 2);
    CHECK(hists[0]["densities"].size() == 50);
    res = c.Get("/api/stats/attainment?groupby=developer");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = c.Get("/api/stats/attainment?bins=0");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = c.Get("/api/schema");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body) == json::parse(fixture_service().schema().dump()));

    res = c.Options("/api/query");
    REQUIRE(res);
    CHECK(res->status == 204);
    CHECK(res->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);
  }

  TEST_CASE("http: 503 until the dataset is loaded") {
    {
      TestServer s(nullptr);
      auto res = s.client().Get("/api/schema");
      REQUIRE(res);
      CHECK(res->status == 503);
      CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://console.test");
    }
    {
      TestServer s(nullptr, true, testing::fixture_dir());
      auto c = s.client();
      int status = 503;
      for (int i = 0; i < 500 && status == 503; ++i) {
        auto res = c.Get("/api/schema");
        REQUIRE(res);
        status = res->status;
        if (status == 503) std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      CHECK(status == 200);
    }
    {
      TestServer s(nullptr, true, testing::fixture_dir() / "missing");
      auto c = s.client();
      for (int i = 0; i < 500 && s.server->load_error().empty(); ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
      }
      CHECK_FALSE(s.server->load_error().empty());
      auto res = c.Get("/api/schema");
      REQUIRE(res);
      CHECK(res->status == 503);
      CHECK(json::parse(res->body)["message"].get<std::string>().find("failed") != std::string::npos);
    }
  }

  TEST_CASE("cli and http return identical rows") {
    TestServer s(shared_fixture());
    auto c = s.client();
    for (const auto& text : {kListing, kNewGame, kStrategy, kPlayers, kPlayers + " LIMIT 2"}) {
      CAPTURE(text);
      const auto via_cli = cli({"query", "--data", testing::fixture_dir().string(), "--text", text});
      REQUIRE(via_cli.code == 0);
      auto res = c.Post("/api/query", query_body(text), "application/json");
      REQUIRE(res);
      REQUIRE(res->status == 200);
      CHECK(tsv_rows(via_cli.out) == rows_of(res->body));
    }
  }

  TEST_CASE("concurrent identical requests agree") {
    TestServer s(shared_fixture());
    constexpr int kThreads = 8;
    std::vector<std::string> bodies(kThreads);
    std::vector<std::thread> threads;
    for (int t = 0; t < kThreads; ++t) {
      threads.emplace_back([&, t] {
        auto c = s.client();
        for (int k = 0; k < 20; ++k) {
          auto res = c.Post("/api/query", query_body(kPlayers), "application/json");
          if (!res || res->status != 200) return;
          auto j = json::parse(res->body);
          j.erase("elapsed_ms");
          if (k == 0) {
            bodies[t] = j.dump();
          } else if (bodies[t] != j.dump()) {
            bodies[t] = "mismatch";
            return;
          }
        }
      });
    }
    for (auto& t : threads) t.join();
    CHECK(!bodies[0].empty());
    for (const auto& b : bodies) CHECK(b == bodies[0]);
  }
}
