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


#include "achgraph/app/http.hpp"

#include <charconv>
#include <mutex>
#include <thread>

#include <httplib.h>

namespace achgraph::app {

using nlohmann::ordered_json;

struct HttpServer::Impl {
  AppConfig config;
  httplib::Server server;
  mutable std::mutex mu;
  std::shared_ptr<const Service> service;
  std::string error;
  std::thread loader;

  std::shared_ptr<const Service> current() const {
    std::lock_guard lock(mu);
    return service;
  }

  void routes();
};

namespace {

void reply(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void message(httplib::Response& res, int status, const std::string& text) {
  reply(res, status, ordered_json{{"message", text}});
}

std::int64_t int_param(const httplib::Request& req, const char* key, std::int64_t fallback) {
  if (!req.has_param(key)) return fallback;
  const auto text = req.get_param_value(key);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw UsageError(std::string(key) + " must be an integer");
  }
  return v;
}

bool flag_param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return false;
  const auto v = req.get_param_value(key);
  if (v.empty() || v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw UsageError(std::string(key) + " must be true or false");
}

}  // namespace

void HttpServer::Impl::routes() {
  server.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin}});

  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  // Wraps a handler with the loading check and error mapping.
  auto guarded = [this](auto handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      const auto svc = current();
      if (!svc) {
        std::lock_guard lock(mu);
        message(res, 503, error.empty() ? "dataset loading" : "dataset failed to load: " + error);
        return;
      }
      try {
        handler(*svc, req, res);
      } catch (const QueryFailure& e) {
        reply(res, 400, to_json(e));
      } catch (const UsageError& e) {
        message(res, 400, e.what());
      } catch (const NotFound& e) {
        message(res, 404, e.what());
      } catch (const std::exception& e) {
        message(res, 500, e.what());
      }
    };
  };

  server.Post("/api/query", guarded([](const Service& svc, const httplib::Request& req, httplib::Response& res) {
                ordered_json body;
                try {
                  body = ordered_json::parse(req.body);
                } catch (const ordered_json::parse_error& e) {
                  throw UsageError(std::string("request body is not JSON: ") + e.what());
                }
                if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
                  throw UsageError("request body needs a string field \"text\"");
                }
                reply(res, 200, to_json(svc.run_query(body["text"].get<std::string>())));
              }));

  server.Get(R"(/api/players/([^/]+)/recommendations)",
             guarded([](const Service& svc, const httplib::Request& req, httplib::Response& res) {
               RecommendationRequest r;
               r.steamid = req.matches[1];
               r.exclude_owned = flag_param(req, "exclude_owned");
               if (req.has_param("genre")) r.genre = req.get_param_value("genre");
               r.n = int_param(req, "n", 5);
               reply(res, 200, to_json(svc.recommendations(r)));
             }));

  server.Get("/api/stats/attainment", guarded([](const Service& svc, const httplib::Request& req,
                                                 httplib::Response& res) {
               if (req.has_param("groupby") && req.get_param_value("groupby") != "genre") {
                 throw UsageError("groupby supports only genre");
               }
               const auto bins = int_param(req, "bins", 50);
               if (bins < 1 || bins > 1000) throw UsageError("bins must be in [1, 1000]");
               reply(res, 200, to_json(svc.attainment_histograms(static_cast<std::size_t>(bins))));
             }));

  server.Get("/api/schema", guarded([](const Service& svc, const httplib::Request&, httplib::Response& res) {
               reply(res, 200, svc.schema());
             }));
}

HttpServer::HttpServer(AppConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->routes();
}

HttpServer::~HttpServer() {
  stop();
  if (impl_->loader.joinable()) impl_->loader.join();
}

void HttpServer::load_async() {
  if (impl_->loader.joinable()) throw UsageError("load already started");
  impl_->loader = std::thread([impl = impl_.get()] {
    try {
      auto svc = std::make_shared<const Service>(Service::load(impl->config.data, impl->config.default_limit));
      std::lock_guard lock(impl->mu);
      impl->service = std::move(svc);
    } catch (const std::exception& e) {
      std::lock_guard lock(impl->mu);
      impl->error = e.what();
    }
  });
}

void HttpServer::set_service(std::shared_ptr<const Service> service) {
  std::lock_guard lock(impl_->mu);
  impl_->service = std::move(service);
}

int HttpServer::bind() {
  auto& c = impl_->config;
  int port = c.port;
  if (port == 0) {
    port = impl_->server.bind_to_any_port(c.host);
  } else if (!impl_->server.bind_to_port(c.host, port)) {
    port = -1;
  }
  if (port <= 0) throw DataError("cannot bind " + c.host + ":" + std::to_string(c.port));
  return port;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

std::string HttpServer::load_error() const {
  std::lock_guard lock(impl_->mu);
  return impl_->error;
}

}  // namespace achgraph::app
