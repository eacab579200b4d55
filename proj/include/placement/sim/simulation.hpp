#pragma once

// Synthetic examinees for checking the estimator: draw responses from a
// known ability under the 2PL model, re-estimate, and aggregate recovery
// statistics. Also hosts the brute-force likelihood grid search used as an
// independent check on the Newton iterations.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "placement/assessment/form.hpp"
#include "placement/irt/model.hpp"

namespace placement::sim {

/// Response draws use std::mt19937_64; uniforms are the top 53 bits of one
/// output scaled to [0, 1). Each (true theta, replication) pair gets its own
/// stream seeded with splitmix64(seed, theta index, replication).
inline constexpr std::string_view kGeneratorName = "mt19937_64";

struct SimulationSpec {
  std::vector<double> true_thetas;
  int replications = 200;
  std::vector<irt::ItemParameters> bank;
  std::uint64_t seed = 20141016;
  assessment::SelectionMode mode = assessment::SelectionMode::FixedByImportance;
  // Adaptive mode only: number of items administered (0 = whole bank).
  std::size_t test_length = 0;
  irt::EstimationConfig config{};

  /// Throws irt::DomainError when replications < 1, the bank is empty or a
  /// true theta lies outside [-3, 3].
  void validate() const;
};

struct RecoveryRow {
  double true_theta = 0.0;
  int replications = 0;
  int finite = 0;  // replications that were not NonFiniteMLE
  double mean_estimate = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double mean_se = 0.0;
  double empirical_sd = 0.0;
  double non_finite_rate = 0.0;
};

struct RecoveryReport {
  std::string generator{kGeneratorName};
  std::uint64_t seed = 0;
  std::vector<RecoveryRow> rows;
};

/// n items with a fixed discrimination and difficulties evenly spaced over
/// [lo, hi].
[[nodiscard]] std::vector<irt::ItemParameters> linear_bank(std::size_t n, double lo, double hi,
                                                           double a = 1.0);

/// u_i ~ Bernoulli(P_i(true_theta)), deterministic in seed.
[[nodiscard]] irt::ResponseVector simulate_responses(double true_theta,
                                                     std::span<const irt::ItemParameters> bank,
                                                     std::uint64_t seed);

/// Grid point of lo + k * step (k = 0, 1, ...) maximizing the log-likelihood;
/// ties go to the smaller theta. Evaluated with its own scalar arithmetic,
/// independent of the estimator kernels.
[[nodiscard]] double grid_search_mle(const irt::ResponseVector& responses, double lo, double hi,
                                     double step);

/// Scalar log-likelihood used by grid_search_mle (no probability floors).
[[nodiscard]] double reference_log_likelihood(const irt::ResponseVector& responses, double theta);

[[nodiscard]] RecoveryReport run_recovery(const SimulationSpec& spec);

[[nodiscard]] std::string to_csv(const RecoveryReport& report);
[[nodiscard]] std::string to_text(const RecoveryReport& report);

}  // namespace placement::sim
