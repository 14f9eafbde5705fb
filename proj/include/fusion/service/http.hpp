#pragma once

#include <memory>
#include <string>

#include "fusion/service/service.hpp"

namespace fusion::service {

/// HTTP transport for a Service. Every GET, POST and DELETE is forwarded to
/// Service::handle with lower-cased header names; bodies are JSON.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds the socket; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop() is called.
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Binds and serves until the process is stopped. Returns false if the socket
/// could not be bound.
bool serve_http(Service& service, const std::string& host, int port);

}  // namespace fusion::service
