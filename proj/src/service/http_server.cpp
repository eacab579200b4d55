#include "placement/service/http_server.hpp"

#include "httplib.h"

namespace placement::service {

using nlohmann::json;

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

// Malformed JSON is a validation failure, not a transport error.
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    send(res, ApiResponse{422, ApiError(ErrorCode::ValidationFailed,
                                        "request body must be a JSON object")
                                   .to_json()});
    return std::nullopt;
  }
  return body;
}

}  // namespace

HttpServer::HttpServer(PlacementService& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  PlacementService* svc = &service;

  srv.Post("/api/sessions", [svc](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, svc->create_session(*body));
  });
  srv.Post(R"(/api/sessions/([A-Za-z0-9_-]+)/answers)",
           [svc](const httplib::Request& req, httplib::Response& res) {
             if (auto body = parse_body(req, res)) {
               send(res, svc->submit_answer(req.matches[1], *body));
             }
           });
  srv.Get(R"(/api/sessions/([A-Za-z0-9_-]+))",
          [svc](const httplib::Request& req, httplib::Response& res) {
            send(res, svc->get_session(req.matches[1]));
          });
  srv.Get(R"(/api/sessions/([A-Za-z0-9_-]+)/result)",
          [svc](const httplib::Request& req, httplib::Response& res) {
            send(res, svc->get_result(req.matches[1]));
          });
  srv.Get("/api/competences", [svc](const httplib::Request&, httplib::Response& res) {
    send(res, svc->list_competences());
  });
  srv.Get(R"(/api/competences/([^/]+))",
          [svc](const httplib::Request& req, httplib::Response& res) {
            send(res, svc->get_competence(req.matches[1]));
          });
  srv.Get(R"(/api/learners/([^/]+))", [svc](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->get_learner(req.matches[1]));
  });

  srv.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "unhandled error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        send(res, ApiResponse{500, ApiError(ErrorCode::Internal, what).to_json()});
      });

  // SO_REUSEADDR only, so a busy port fails to bind.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  if (static_dir) srv.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    port_ = srv.bind_to_any_port(host);
  } else {
    port_ = srv.bind_to_port(host, port) ? port : -1;
  }
  return port_ > 0;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace placement::service
