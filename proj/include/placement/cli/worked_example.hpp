#pragma once

// The worked placement example: 20 SQL questions with a = 1 and
// b = 0.1, 0.2, ..., 2.0, answered incorrectly at questions
// 1, 4, 7, 8, 15, 16, 18 and 19, estimated from theta_0 = 1.

#include <iosfwd>
#include <string>

#include "placement/irt/estimator.hpp"

namespace placement::cli {

inline constexpr double kExampleThetaInitial = 1.0;
inline constexpr double kExampleTheta1 = 1.4829;
inline constexpr double kExampleThetaFinal = 1.4882;
inline constexpr double kExampleTolerance = 1e-3;

[[nodiscard]] irt::ResponseVector example_responses();

/// Item ids in the fixture repository order (sql-q01 ... sql-q20).
[[nodiscard]] std::string example_item_id(std::size_t index);

/// Columns "i U_i b P_i Q_i Num Denom"; cells to 4 decimals, sums to 5.
void print_trace_table(std::ostream& out, const irt::IterationRow& row,
                       const irt::ResponseVector& responses);

struct DemoOutcome {
  double theta_1 = 0.0;
  irt::AbilityEstimate estimate;
  bool theta_1_ok = false;
  bool final_ok = false;
  [[nodiscard]] bool pass() const noexcept { return theta_1_ok && final_ok; }
};

/// Prints the iteration tables, final estimate and PASS/FAIL lines.
/// The theta_1 check always takes its Newton step from theta_0 = 1; the
/// printed trace and the final estimate start from `theta_initial`.
DemoOutcome run_worked_example(std::ostream& out, double theta_initial = kExampleThetaInitial);

}  // namespace placement::cli
