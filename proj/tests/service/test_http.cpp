#include <catch_amalgamated.hpp>

#include <fstream>
#include <thread>

#include "fixture_paths.hpp"
#include "httplib.h"
#include "service_client.hpp"
#include "placement/service/http_server.hpp"

using namespace placement;
using namespace placement::service;
using nlohmann::json;

namespace {

class RunningServer {
 public:
  explicit RunningServer(std::optional<std::filesystem::path> static_dir = std::nullopt)
      : service_(PlacementService::from_directory(testing::scratch_sql_repo(), {})),
        server_(*service_, std::move(static_dir)) {
    REQUIRE(server_.bind("127.0.0.1", 0));
    thread_ = std::thread([this] { server_.listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", server_.port());
  }
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }

  httplib::Client& client() { return *client_; }
  PlacementService& service() { return *service_; }

 private:
  std::unique_ptr<PlacementService> service_;
  HttpServer server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

json body_of(const httplib::Result& r) {
  REQUIRE(r);
  return json::parse(r->body);
}

}  // namespace

TEST_CASE("full session over HTTP") {
  RunningServer server;
  auto& cli = server.client();
  const auto created = cli.Post("/api/sessions",
                                json{{"learnerRef", "learner-001"}, {"competenceRef", "sql"}}.dump(),
                                "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  CHECK(created->get_header_value("Content-Type").find("application/json") == 0);
  const auto start = json::parse(created->body);
  const std::string id = start.at("sessionId");

  const auto driven = testing::drive_session(
      server.service().repository(), start.at("firstQuestion"), id,
      [&](const std::string& sid, const json& body) {
        const auto r = cli.Post("/api/sessions/" + sid + "/answers", body.dump(), "application/json");
        REQUIRE(r);
        REQUIRE(r->status == 200);
        return json::parse(r->body);
      });
  CHECK(driven.posts == 20);

  const auto result = cli.Get("/api/sessions/" + id + "/result");
  REQUIRE(result);
  CHECK(result->status == 200);
  CHECK(std::abs(body_of(result).at("theta").get<double>() - 1.4881638614130055) < 1e-8);

  const auto state = body_of(cli.Get("/api/sessions/" + id));
  CHECK(state.at("state") == "completed");
}

TEST_CASE("HTTP error statuses") {
  RunningServer server;
  auto& cli = server.client();
  auto status = [](const httplib::Result& r) { return r ? r->status : -1; };
  CHECK(status(cli.Post("/api/sessions", "{not json", "application/json")) == 422);
  CHECK(status(cli.Post("/api/sessions", "[1,2]", "application/json")) == 422);
  CHECK(status(cli.Post("/api/sessions", R"({"learnerRef":"x","competenceRef":"sql"})",
                        "application/json")) == 404);
  CHECK(status(cli.Get("/api/sessions/s0000000000000000")) == 404);
  CHECK(status(cli.Get("/api/sessions/s0000000000000000/result")) == 404);
  CHECK(status(cli.Get("/api/competences/nope")) == 404);
  CHECK(status(cli.Get("/api/learners/nope")) == 404);
  CHECK(status(cli.Get("/api/nothing-here")) == 404);

  const auto created = body_of(cli.Post(
      "/api/sessions", R"({"learnerRef":"learner-001","competenceRef":"sql"})", "application/json"));
  const std::string id = created.at("sessionId");
  CHECK(status(cli.Get("/api/sessions/" + id + "/result")) == 409);
  const auto wrong = cli.Post("/api/sessions/" + id + "/answers",
                              R"({"itemId":"sql-q03","choiceId":"A"})", "application/json");
  CHECK(status(wrong) == 409);
  CHECK(body_of(wrong).at("error").at("code") == "invalid_state");
}

TEST_CASE("read endpoints") {
  RunningServer server;
  auto& cli = server.client();
  CHECK(body_of(cli.Get("/api/competences")).size() == 2);
  CHECK(body_of(cli.Get("/api/competences/sql")).at("id") == "sql");
  CHECK(body_of(cli.Get("/api/learners/learner-001")).at("id") == "learner-001");
}

TEST_CASE("static directory is served") {
  testing::TempDir dir("static");
  std::ofstream(dir.path() / "index.html") << "<html>ui</html>";
  RunningServer server(dir.path());
  const auto r = server.client().Get("/index.html");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->body == "<html>ui</html>");
  CHECK(server.client().Get("/api/competences")->status == 200);
}

TEST_CASE("bind failure is reported") {
  auto service = PlacementService::from_directory(testing::scratch_sql_repo(), {});
  HttpServer a(*service);
  REQUIRE(a.bind("127.0.0.1", 0));
  HttpServer b(*service);
  CHECK_FALSE(b.bind("127.0.0.1", a.port()));
  CHECK_FALSE(b.bind("no.such.host.invalid", 0));
}
