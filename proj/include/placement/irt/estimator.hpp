#pragma once

#include "placement/irt/model.hpp"

namespace placement::irt {

/// P(theta) = 1 / (1 + exp(-a (theta - b))). Unclamped.
[[nodiscard]] double prob_correct(double theta, const ItemParameters& item);

[[nodiscard]] double prob_incorrect(double theta, const ItemParameters& item);

/// a^2 P Q; peaks at theta = b with value a^2 / 4.
[[nodiscard]] double item_information(double theta, const ItemParameters& item);

/// Derivative of the log-likelihood: sum a_i (u_i - P_i(theta)).
[[nodiscard]] double score_gradient(double theta, const ResponseVector& responses);

/// sum a_i^2 P_i Q_i, the negated second derivative of the log-likelihood.
[[nodiscard]] double total_information(double theta, const ResponseVector& responses);

/// sum u ln P + (1 - u) ln Q with P floored away from 0 and 1.
[[nodiscard]] double log_likelihood(double theta, const ResponseVector& responses);

struct NewtonStep {
  double theta_next = 0.0;
  IterationRow row;
};

/// theta_next = theta_s + gradient / information. The row carries the
/// per-item P, Q, numerator and denominator columns used for the step.
/// Throws NonFiniteMleError when the information is below kInformationFloor.
[[nodiscard]] NewtonStep newton_update(double theta_s, const ResponseVector& responses,
                                       int iteration = 0);

/// 1 / sqrt(total information). Throws NonFiniteMleError on zero information.
[[nodiscard]] double standard_error(double theta, const ResponseVector& responses);

/// Maximum-likelihood theta by Newton-Raphson from config.theta_initial.
///
/// Iterates until |delta theta| < tolerance or max_iterations steps were
/// taken. Intermediate iterates are kept inside [-6, 6]; a step that lowers
/// the log-likelihood is halved until it does not (the likelihood is
/// strictly concave, so the undamped step is taken whenever it improves).
/// The reported theta is clamped into config.theta_bounds.
///
/// All-correct or all-incorrect vectors have no interior maximum: the
/// result is the matching bound with status NonFiniteMLE and an empty trace.
[[nodiscard]] AbilityEstimate estimate_ability(const ResponseVector& responses,
                                               const EstimationConfig& config = {});

}  // namespace placement::irt
