// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "convrec/dialogue/engine.hpp"

namespace convrec::service {

/// An API failure with its HTTP status and a stable machine-readable code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  nlohmann::json to_json() const { return {{"code", code_}, {"message", what()}}; }

 private:
  int status_;
  std::string code_;
};

struct SessionManagerOptions {
  dialogue::PolicyConfig policy;
  std::string strategy = "minicorn";
  std::string ranker = "rn";
  std::uint64_t seed = 123;
  std::chrono::minutes idle_timeout{30};
  std::function<std::chrono::steady_clock::time_point()> clock = [] {
    return std::chrono::steady_clock::now();
  };
};

/// In-memory session store in front of the dialogue engine. Calls on one
/// session are serialised; different sessions run in parallel. Each session
/// keeps the model snapshot it was created with, so a reload only affects
/// sessions created afterwards. All results are JSON documents; failures are
/// ServiceError.
class SessionManager {
 public:
  /// `models` may be null: every model-dependent call then fails with 503.
  SessionManager(std::shared_ptr<const dialogue::ModelBundle> models,
                 SessionManagerOptions options);
  ~SessionManager();

  /// {"user": id | null, "attribute": id}. Returns the session summary.
  nlohmann::json create_session(const nlohmann::json& request);
  /// The outstanding action, computed on first request and then repeated
  /// until feedback arrives.
  nlohmann::json next_action(const std::string& id);
  /// {"answer": "yes" | "no"} for a question; {"accepted": bool} or
  /// {"accepted_item": id} for a recommendation.
  nlohmann::json submit_feedback(const std::string& id, const nlohmann::json& payload);
  nlohmann::json state(const std::string& id);
  nlohmann::json transcript(const std::string& id);
  nlohmann::json attributes() const;
  nlohmann::json health() const;

  /// Atomically replaces the snapshot used for new sessions.
  void swap_models(std::shared_ptr<const dialogue::ModelBundle> models);
  /// Drops sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle();
  std::size_t session_count() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  std::shared_ptr<const dialogue::ConversationEngine> engine() const;
  static nlohmann::json summary(const Session& session);

  SessionManagerOptions options_;
  mutable std::shared_mutex engine_mutex_;
  std::shared_ptr<const dialogue::ConversationEngine> engine_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t created_ = 0;
  std::uint64_t id_salt_;
};

}  // namespace convrec::service
