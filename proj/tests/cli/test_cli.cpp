#include <catch_amalgamated.hpp>

#include <csignal>
#include <fstream>
#include <regex>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "fixture_paths.hpp"
#include "httplib.h"
#include "json.hpp"
#include "placement/cli/commands.hpp"
#include "placement/cli/response_csv.hpp"

using namespace placement;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string csv_path(const testing::TempDir& dir, const std::string& contents) {
  const auto path = dir.path() / "responses.csv";
  std::ofstream(path) << contents;
  return path.string();
}

std::string example_csv() { return (testing::fixture_dir() / "worked_example.csv").string(); }

}  // namespace

TEST_CASE("validate exit codes") {
  const auto ok = run({"validate", testing::sql_repo().string()});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out.find("0 error(s), 0 warning(s)") != std::string::npos);

  testing::TempDir dir("cycle");
  std::filesystem::copy(testing::sql_repo(), dir.path(), std::filesystem::copy_options::recursive);
  const auto ra = dir.path() / "competences" / "relational-algebra.xml";
  std::stringstream text;
  text << std::ifstream(ra).rdbuf();
  std::string xml = text.str();
  xml.replace(xml.find("  <delivery"), 0, "  <prerequisite ref=\"sql\"/>\n");
  std::ofstream(ra) << xml;
  const auto cycle = run({"validate", dir.path().string()});
  CHECK(cycle.code == cli::kExitFailure);
  CHECK(cycle.out.find("prerequisite-cycle") != std::string::npos);
  CHECK(cycle.out.find("relational-algebra, sql") != std::string::npos);

  CHECK(run({"validate", "/no/such/dir"}).code == cli::kExitUsage);
  CHECK(run({"validate"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
}

TEST_CASE("estimate on the worked example") {
  const auto r = run({"estimate", "--responses", example_csv(), "--theta0", "1", "--trace"});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(r.out.find("theta: 1.488163861") != std::string::npos);
  CHECK(r.out.find("standard_error: 0.4739849404") != std::string::npos);
  CHECK(r.out.find("status: converged") != std::string::npos);
  const std::regex row1(R"(\n1\s+0\s+0\.1000\s+0\.7109\s+0\.2891\s+-0\.7109\s+0\.2055\n)");
  CHECK(std::regex_search(r.out, row1));
}

TEST_CASE("estimate input errors") {
  testing::TempDir dir("estimate");
  const auto bad = run({"estimate", "--responses", csv_path(dir, "q1,1,0,1\nq2,1,0,x\n")});
  CHECK(bad.code == cli::kExitUsage);
  CHECK(bad.err.find("line 2") != std::string::npos);
  CHECK(run({"estimate", "--responses", csv_path(dir, "q1,1,0,2\n")}).code == cli::kExitUsage);
  CHECK(run({"estimate", "--responses", csv_path(dir, "q1,1,0\n")}).code == cli::kExitUsage);
  CHECK(run({"estimate", "--responses", (dir.path() / "missing.csv").string()}).code ==
        cli::kExitUsage);

  const auto zeros = run({"estimate", "--responses", csv_path(dir, "q1,1,0,0\nq2,1,1,0\n")});
  CHECK(zeros.code == cli::kExitOk);
  CHECK(zeros.out.find("theta: -3") != std::string::npos);
  CHECK(zeros.out.find("status: non_finite_mle") != std::string::npos);
}

TEST_CASE("response csv parsing") {
  const auto parsed = cli::parse_response_csv("item_id,a,b,u\n# comment\n\nq1,1.5,-0.5,1\nq2,1,2,0\n");
  REQUIRE(parsed.responses.size() == 2);
  CHECK(parsed.item_ids == std::vector<std::string>{"q1", "q2"});
  CHECK(parsed.responses[0].item.discrimination() == 1.5);
  CHECK(parsed.responses[1].u == 0);
  CHECK(cli::parse_response_csv(cli::to_response_csv(parsed)).responses.size() == 2);
  CHECK_THROWS_AS(cli::parse_response_csv("q1,0,0,1\n"), cli::CsvParseError);
  CHECK_THROWS_WITH(cli::parse_response_csv("q1,1,0,1\nq2,1,nan?,1\n"),
                    Catch::Matchers::StartsWith("line 2"));
}

TEST_CASE("worked example demo passes") {
  const auto r = run({"demo-paper"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("SUM") != std::string::npos);
}

TEST_CASE("simulate arguments") {
  CHECK(run({"simulate", "--reps", "0"}).code == cli::kExitUsage);
  CHECK(run({"simulate", "--format", "xml"}).code == cli::kExitUsage);
  CHECK(run({"simulate", "--thetas", "5"}).code == cli::kExitUsage);
  const auto a = run({"simulate", "--thetas", "-1,1", "--reps", "20", "--format", "csv"});
  const auto b = run({"simulate", "--thetas", "-1,1", "--reps", "20", "--format", "csv"});
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
  const auto j = run({"simulate", "--thetas", "0", "--reps", "5", "--format", "json"});
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc.at("generator") == "mt19937_64");
  CHECK(doc.at("rows").size() == 1);
}

TEST_CASE("serve argument errors") {
  CHECK(run({"serve", "--repo", testing::sql_repo().string(), "--listen", "nonsense"}).code ==
        cli::kExitUsage);
  CHECK(run({"serve", "--repo", "/no/such/dir"}).code == cli::kExitUsage);
}

TEST_CASE("serve shuts down cleanly on SIGINT") {
  int pipe_fds[2];
  REQUIRE(::pipe(pipe_fds) == 0);
  const pid_t pid = ::fork();
  REQUIRE(pid >= 0);
  if (pid == 0) {
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    const std::string repo = testing::sql_repo().string();
    ::execl(PLACEMENT_CLI_BINARY, "placement", "serve", "--repo", repo.c_str(), "--listen",
            "127.0.0.1:0", static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(pipe_fds[1]);
  std::string line;
  char c;
  while (::read(pipe_fds[0], &c, 1) == 1 && c != '\n') line += c;
  std::smatch m;
  REQUIRE(std::regex_search(line, m, std::regex(R"(listening on http://127\.0\.0\.1:(\d+))")));

  httplib::Client client("127.0.0.1", std::stoi(m[1]));
  const auto r = client.Get("/api/competences");
  REQUIRE(r);
  CHECK(r->status == 200);

  ::kill(pid, SIGINT);
  std::string rest;
  while (::read(pipe_fds[0], &c, 1) == 1) rest += c;
  ::close(pipe_fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(rest.find("shut down") != std::string::npos);
}
