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

#include <memory>
#include <string>

#include "achgraph/app/service.hpp"

namespace achgraph::app {

/// HTTP front end over one Service. Answers 503 until a service is set or
/// the background load finishes.
class HttpServer {
 public:
  explicit HttpServer(AppConfig config);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Starts loading config.data on a background thread.
  void load_async();
  void set_service(std::shared_ptr<const Service> service);
  /// Binds the listening socket; port 0 picks a free port. Returns the port.
  int bind();
  /// Serves until stop(). Requires bind().
  void run();
  /// Blocks until run() accepts connections.
  void wait_until_ready() const;
  void stop();
  /// Message of the failed background load, empty otherwise.
  std::string load_error() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace achgraph::app
