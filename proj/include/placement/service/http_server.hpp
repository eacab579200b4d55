#pragma once

// HTTP/1.1 front-end for PlacementService (cpp-httplib). Routes are listed
// in service.hpp; anything else under / is served from the optional static
// directory (the UI bundle).

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "placement/service/service.hpp"

namespace placement::service {

class HttpServer {
 public:
  explicit HttpServer(PlacementService& service,
                      std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns false if the address cannot be bound.
  bool bind(const std::string& host, int port);
  [[nodiscard]] int port() const noexcept { return port_; }

  /// Blocks until stop() is called from another thread.
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

}  // namespace placement::service
