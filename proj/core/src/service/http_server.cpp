// SPDX-License-Identifier: Apache-2.0
#include "convrec/service/http_server.hpp"

#include <httplib.h>

#include <exception>

#include "convrec/errors.hpp"

namespace convrec::service {

using nlohmann::json;

struct HttpServer::Impl {
  explicit Impl(SessionManager& s) : sessions(s) {}
  SessionManager& sessions;
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, "bad_request", std::string("malformed JSON: ") + e.what());
  }
}

// Runs `fn` and maps every failure onto a {code, message} body.
template <class Fn>
void guarded(httplib::Response& res, int ok_status, Fn&& fn) {
  try {
    send(res, ok_status, fn());
  } catch (const ServiceError& e) {
    send(res, e.status(), e.to_json());
  } catch (const LookupError& e) {
    send(res, 404, {{"code", "not_found"}, {"message", e.what()}});
  } catch (const UsageError& e) {
    send(res, 409, {{"code", "conflict"}, {"message", e.what()}});
  } catch (const ConfigError& e) {
    send(res, 400, {{"code", "bad_request"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    send(res, 500, {{"code", "internal"}, {"message", e.what()}});
  }
}

}  // namespace

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  auto& mgr = impl_->sessions;
  srv.Get("/health", [&mgr](const httplib::Request&, httplib::Response& res) {
    guarded(res, 200, [&] { return mgr.health(); });
  });
  srv.Get("/attributes", [&mgr](const httplib::Request&, httplib::Response& res) {
    guarded(res, 200, [&] { return mgr.attributes(); });
  });
  srv.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 201, [&] { return mgr.create_session(parse_body(req)); });
  });
  srv.Get(R"(/sessions/([^/]+))", [&mgr](const httplib::Request& req, httplib::Response& res) {
    guarded(res, 200, [&] { return mgr.state(req.matches[1]); });
  });
  srv.Post(R"(/sessions/([^/]+)/next-action)",
           [&mgr](const httplib::Request& req, httplib::Response& res) {
             guarded(res, 200, [&] { return mgr.next_action(req.matches[1]); });
           });
  srv.Post(R"(/sessions/([^/]+)/feedback)",
           [&mgr](const httplib::Request& req, httplib::Response& res) {
             guarded(res, 200,
                     [&] { return mgr.submit_feedback(req.matches[1], parse_body(req)); });
           });
  srv.Get(R"(/sessions/([^/]+)/transcript)",
          [&mgr](const httplib::Request& req, httplib::Response& res) {
            guarded(res, 200, [&] { return mgr.transcript(req.matches[1]); });
          });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send(res, res.status, {{"code", res.status == 404 ? "not_found" : "http_error"},
                             {"message", httplib::status_message(res.status)}});
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace convrec::service
