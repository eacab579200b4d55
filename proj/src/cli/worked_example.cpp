#include "placement/cli/worked_example.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace placement::cli {

namespace {

constexpr int kIncorrect[] = {1, 4, 7, 8, 15, 16, 18, 19};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

irt::IterationRow row_at(double theta, const irt::ResponseVector& responses) {
  return irt::newton_update(theta, responses).row;
}

}  // namespace

irt::ResponseVector example_responses() {
  irt::ResponseVector r;
  for (int i = 1; i <= 20; ++i) {
    int u = 1;
    for (int k : kIncorrect) {
      if (k == i) u = 0;
    }
    r.add(irt::ItemParameters(1.0, 0.1 * i), u);
  }
  return r;
}

std::string example_item_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "sql-q%02zu", index + 1);
  return buf;
}

void print_trace_table(std::ostream& out, const irt::IterationRow& row,
                       const irt::ResponseVector& responses) {
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %4s %7s %8s %8s %9s %8s\n", "i", "U_i", "b", "P_i", "Q_i",
                "Num", "Denom");
  out << line;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    std::snprintf(line, sizeof line, "%-4zu %4d %7.4f %8.4f %8.4f %9.4f %8.4f\n", i + 1,
                  static_cast<int>(responses.scores()[i]), responses.difficulties()[i], row.p[i],
                  row.q[i], row.numerator[i], row.denominator[i]);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-4s %40s %9.5f %8.5f\n", "SUM", "", row.numerator_sum,
                row.denominator_sum);
  out << line;
}

DemoOutcome run_worked_example(std::ostream& out, double theta_initial) {
  const irt::ResponseVector responses = example_responses();
  DemoOutcome outcome;

  irt::EstimationConfig config;
  config.theta_initial = theta_initial;
  outcome.estimate = irt::estimate_ability(responses, config);
  outcome.theta_1 = irt::newton_update(kExampleThetaInitial, responses).theta_next;

  const auto& trace = outcome.estimate.trace;
  out << "Worked example: 20 items, a = 1, b = 0.1 .. 2.0, theta_0 = "
      << fmt("%.4f", theta_initial) << "\n\n";
  for (std::size_t s = 0; s < trace.size() && s < 2; ++s) {
    out << "Iteration " << s + 1 << " (theta_" << s << " = " << fmt("%.10f", trace[s].theta_s)
        << ")\n";
    print_trace_table(out, trace[s], responses);
    const double next = s + 1 < trace.size() ? trace[s + 1].theta_s : outcome.estimate.theta;
    out << "theta_" << s + 1 << " = " << fmt("%.10f", next) << "\n\n";
  }

  out << "At convergence (theta = " << fmt("%.10f", outcome.estimate.theta) << ", "
      << outcome.estimate.iterations() << " iterations, "
      << irt::to_string(outcome.estimate.status) << ")\n";
  print_trace_table(out, row_at(outcome.estimate.theta, responses), responses);
  out << "standard error = " << fmt("%.10f", outcome.estimate.standard_error) << "\n\n";

  outcome.theta_1_ok = std::abs(outcome.theta_1 - kExampleTheta1) <= kExampleTolerance;
  outcome.final_ok = std::abs(outcome.estimate.theta - kExampleThetaFinal) <= kExampleTolerance;
  out << (outcome.theta_1_ok ? "PASS" : "FAIL") << "  theta_1 from theta_0 = 1: "
      << fmt("%.10f", outcome.theta_1) << " (expected " << fmt("%.4f", kExampleTheta1) << " +/- "
      << fmt("%g", kExampleTolerance) << ")\n";
  out << (outcome.final_ok ? "PASS" : "FAIL") << "  final theta: "
      << fmt("%.10f", outcome.estimate.theta) << " (expected " << fmt("%.4f", kExampleThetaFinal)
      << " +/- " << fmt("%g", kExampleTolerance) << ")\n";
  out << (outcome.pass() ? "PASS" : "FAIL") << "\n";
  return outcome;
}

}  // namespace placement::cli
