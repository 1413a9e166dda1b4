// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>

#include "convrec/service/session_manager.hpp"

namespace convrec::service {

/// JSON-over-HTTP front end for a SessionManager.
///
///   GET  /health                        {"status", "model_loaded", "sessions"}
///   GET  /attributes                    {"attributes": [{"id", "name", "item_count"}]}
///   POST /sessions                      {"user": id | null, "attribute": id} -> 201 summary
///   GET  /sessions/{id}                 summary
///   POST /sessions/{id}/next-action     outstanding action (idempotent)
///   POST /sessions/{id}/feedback        {"answer"} | {"accepted"} | {"accepted_item"}
///   GET  /sessions/{id}/transcript      {"session_id", "status", "turns": [...]}
///
/// Errors are {"code", "message"} with a matching HTTP status.
class HttpServer {
 public:
  explicit HttpServer(SessionManager& sessions);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port. Throws
  /// ConfigError when binding fails.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace convrec::service
