#include "placement/cli/commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "placement/cli/worked_example.hpp"
#include "placement/cli/response_csv.hpp"
#include "placement/ims/repository.hpp"
#include "placement/service/http_server.hpp"
#include "placement/sim/simulation.hpp"

namespace placement::cli {

namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// ---- validate ----

int cmd_validate(const std::string& dir, std::ostream& out, std::ostream& err) {
  ims::ValidationReport report;
  try {
    report = ims::validate_directory(dir);
  } catch (const ims::RepositoryIoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::size_t errors = 0;
  for (const auto& f : report.findings) {
    if (f.severity == ims::Severity::Error) ++errors;
    out << ims::to_string(f.severity) << ' ' << ims::to_string(f.kind) << ' ' << f.subject << ": "
        << f.message;
    if (!f.members.empty()) {
      out << " [";
      for (std::size_t i = 0; i < f.members.size(); ++i) out << (i ? ", " : "") << f.members[i];
      out << ']';
    }
    out << '\n';
  }
  out << errors << " error(s), " << report.findings.size() - errors << " warning(s)\n";
  return errors > 0 ? kExitFailure : kExitOk;
}

// ---- estimate ----

struct EstimateArgs {
  std::string responses;
  double theta0 = 0.0;
  bool trace = false;
};

int cmd_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
  ResponseFile file;
  try {
    file = parse_response_csv(ims::read_file(args.responses));
  } catch (const ims::RepositoryIoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CsvParseError& e) {
    err << "error: " << args.responses << ": " << e.what() << '\n';
    return kExitUsage;
  }
  if (file.responses.empty()) {
    err << "error: " << args.responses << ": no responses\n";
    return kExitUsage;
  }

  irt::EstimationConfig config;
  config.theta_initial = args.theta0;
  const irt::AbilityEstimate e = irt::estimate_ability(file.responses, config);

  if (args.trace) {
    for (const auto& row : e.trace) {
      out << "Iteration " << row.s + 1 << " (theta_" << row.s << " = "
          << fmt("%.10f", row.theta_s) << ")\n";
      print_trace_table(out, row, file.responses);
      out << '\n';
    }
  }
  out << "theta: " << fmt("%.10g", e.theta) << '\n';
  out << "standard_error: " << fmt("%.10g", e.standard_error) << '\n';
  out << "status: " << irt::to_string(e.status) << '\n';
  out << "iterations: " << e.iterations() << '\n';
  return kExitOk;
}

// ---- simulate ----

struct SimulateArgs {
  std::vector<double> thetas{-2.0, -1.0, 0.0, 1.0, 2.0};
  std::size_t items = 50;
  int reps = 200;
  std::uint64_t seed = 20141016;
  double b_min = -3.0;
  double b_max = 3.0;
  double a = 1.0;
  std::string format = "text";
  std::string mode = "fixed";
  std::size_t length = 0;
};

nlohmann::json report_json(const sim::RecoveryReport& report) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"trueTheta", r.true_theta},
                    {"replications", r.replications},
                    {"finite", r.finite},
                    {"meanEstimate", num(r.mean_estimate)},
                    {"bias", num(r.bias)},
                    {"rmse", num(r.rmse)},
                    {"meanSe", num(r.mean_se)},
                    {"empiricalSd", num(r.empirical_sd)},
                    {"nonFiniteRate", r.non_finite_rate}});
  }
  return {{"generator", report.generator}, {"seed", report.seed}, {"rows", std::move(rows)}};
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  sim::SimulationSpec spec;
  spec.true_thetas = args.thetas;
  spec.replications = args.reps;
  spec.seed = args.seed;
  spec.test_length = args.length;
  spec.mode = *assessment::parse_selection_mode(args.mode);
  sim::RecoveryReport report;
  try {
    spec.bank = sim::linear_bank(args.items, args.b_min, args.b_max, args.a);
    report = sim::run_recovery(spec);
  } catch (const irt::DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (args.format == "csv") {
    out << sim::to_csv(report);
  } else if (args.format == "json") {
    out << report_json(report).dump(2) << '\n';
  } else {
    out << sim::to_text(report);
  }
  return kExitOk;
}

// ---- serve ----

struct ServeArgs {
  std::string listen = "127.0.0.1:8080";
  std::string repo;
  double theta0 = 0.0;
  double tolerance = 1e-5;
  int max_iterations = 50;
  std::string static_dir;
  std::string sessions_dir;
};

bool split_listen(const std::string& addr, std::string& host, int& port) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size()) return false;
  host = addr.substr(0, colon);
  if (host.size() > 2 && host.front() == '[' && host.back() == ']') {
    host = host.substr(1, host.size() - 2);
  }
  const std::string digits = addr.substr(colon + 1);
  if (digits.find_first_not_of("0123456789") != std::string::npos || digits.size() > 5) {
    return false;
  }
  port = std::stoi(digits);
  return port <= 65535;
}

int cmd_serve(const ServeArgs& args, std::ostream& out, std::ostream& err) {
  std::string host;
  int port = 0;
  if (!split_listen(args.listen, host, port)) {
    err << "error: bad listen address '" << args.listen << "' (expected HOST:PORT)\n";
    return kExitUsage;
  }

  service::ServiceConfig config;
  config.estimation.theta_initial = args.theta0;
  config.estimation.tolerance = args.tolerance;
  config.estimation.max_iterations = args.max_iterations;
  if (!args.sessions_dir.empty()) config.sessions_dir = args.sessions_dir;

  std::unique_ptr<service::PlacementService> svc;
  try {
    config.estimation.validate();
    svc = service::PlacementService::from_directory(args.repo, config);
  } catch (const ims::RepositoryIoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const irt::DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (const auto& f : svc->startup_report().findings) {
    err << "repository " << ims::to_string(f.severity) << ": " << ims::to_string(f.kind) << ' '
        << f.subject << ": " << f.message << '\n';
  }

  std::optional<std::filesystem::path> static_dir;
  if (!args.static_dir.empty()) static_dir = args.static_dir;
  service::HttpServer server(*svc, static_dir);
  if (!server.bind(host, port)) {
    err << "error: cannot listen on " << args.listen << '\n';
    return kExitUsage;
  }

  // Signals go to a dedicated waiter; the server threads inherit the mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  std::atomic<bool> done{false};
  std::thread waiter([&] {
    const timespec poll{0, 100'000'000};
    while (!done.load()) {
      if (sigtimedwait(&signals, nullptr, &poll) > 0) {
        server.stop();
        return;
      }
    }
  });

  out << "listening on http://" << host << ':' << server.port() << std::endl;
  const bool ok = server.listen();
  done = true;
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "shut down" << std::endl;
  return ok ? kExitOk : kExitUsage;
}

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  return end != v && *end == '\0' ? d : fallback;
}

std::string env_string(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive placement test engine"};
  app.name("placement");
  app.require_subcommand(1);

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Check a repository directory");
  validate->add_option("repo-dir", validate_dir, "Repository root")->required();

  EstimateArgs estimate_args;
  auto* estimate = app.add_subcommand("estimate", "Estimate ability from a response file");
  estimate->add_option("--responses", estimate_args.responses, "CSV file: item_id,a,b,u")
      ->required();
  estimate->add_option("--theta0", estimate_args.theta0, "Initial theta");
  estimate->add_flag("--trace", estimate_args.trace, "Print per-iteration tables");

  double demo_theta0 = kExampleThetaInitial;
  auto* demo = app.add_subcommand("demo-paper", "Reproduce the worked SQL example");
  demo->add_option("--theta0", demo_theta0, "Initial theta for the full estimate");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Ability recovery on synthetic examinees");
  simulate->add_option("--thetas", sim_args.thetas, "True abilities")->delimiter(',');
  simulate->add_option("--items", sim_args.items, "Bank size")
      ->check(CLI::Range(1, 1'000'000));
  simulate->add_option("--reps", sim_args.reps, "Replications per theta")
      ->check(CLI::Range(1, 1'000'000));
  simulate->add_option("--seed", sim_args.seed, "Generator seed");
  simulate->add_option("--b-min", sim_args.b_min, "Lowest difficulty");
  simulate->add_option("--b-max", sim_args.b_max, "Highest difficulty");
  simulate->add_option("--a", sim_args.a, "Discrimination of every item")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--format", sim_args.format)->check(CLI::IsMember({"text", "csv", "json"}));
  simulate->add_option("--mode", sim_args.mode)->check(CLI::IsMember({"fixed", "adaptive"}));
  simulate->add_option("--length", sim_args.length, "Adaptive test length (0 = whole bank)");

  ServeArgs serve_args;
  serve_args.listen = env_string("PLACEMENT_LISTEN", serve_args.listen);
  serve_args.repo = env_string("PLACEMENT_REPO", "");
  serve_args.theta0 = env_double("PLACEMENT_THETA0", serve_args.theta0);
  serve_args.tolerance = env_double("PLACEMENT_TOLERANCE", serve_args.tolerance);
  serve_args.max_iterations = static_cast<int>(
      env_double("PLACEMENT_MAX_ITERATIONS", serve_args.max_iterations));
  serve_args.static_dir = env_string("PLACEMENT_STATIC", "");
  serve_args.sessions_dir = env_string("PLACEMENT_SESSIONS", "");
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve->add_option("--listen", serve_args.listen, "HOST:PORT (PLACEMENT_LISTEN)");
  auto* repo_opt =
      serve->add_option("--repo", serve_args.repo, "Repository directory (PLACEMENT_REPO)");
  serve->add_option("--theta0", serve_args.theta0, "Initial theta (PLACEMENT_THETA0)");
  serve->add_option("--tolerance", serve_args.tolerance, "Convergence tolerance");
  serve->add_option("--max-iterations", serve_args.max_iterations, "Newton iteration cap");
  serve->add_option("--static", serve_args.static_dir, "UI bundle directory");
  serve->add_option("--sessions", serve_args.sessions_dir, "Session event log directory");
  if (serve_args.repo.empty()) repo_opt->required();

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("placement");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*validate) return cmd_validate(validate_dir, out, err);
  if (*estimate) return cmd_estimate(estimate_args, out, err);
  if (*demo) return run_worked_example(out, demo_theta0).pass() ? kExitOk : kExitFailure;
  if (*simulate) return cmd_simulate(sim_args, out, err);
  if (*serve) return cmd_serve(serve_args, out, err);
  return kExitUsage;
}

}  // namespace placement::cli
