#include "placement/irt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "placement/irt/kernels.hpp"

namespace placement::irt {

namespace {

// Iterates are kept here so exp() in the kernels never sees huge arguments.
constexpr double kGuardLower = -6.0;
constexpr double kGuardUpper = 6.0;
constexpr int kMaxHalvings = 40;

void require_finite(double theta) {
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
}

void require_responses(const ResponseVector& responses) {
  if (responses.empty()) throw DomainError("response vector is empty");
}

kernels::ScoreInfo sums(double theta, const ResponseVector& r) {
  return kernels::score_info(theta, r.discriminations(), r.difficulties(), r.scores());
}

double information_or_zero(double theta, const ResponseVector& r) {
  return sums(theta, r).information;
}

}  // namespace

double prob_correct(double theta, const ItemParameters& item) {
  require_finite(theta);
  return 1.0 / (1.0 + std::exp(-item.discrimination() * (theta - item.difficulty())));
}

double prob_incorrect(double theta, const ItemParameters& item) {
  return 1.0 - prob_correct(theta, item);
}

double item_information(double theta, const ItemParameters& item) {
  const double p = prob_correct(theta, item);
  const double a = item.discrimination();
  return a * a * p * (1.0 - p);
}

double score_gradient(double theta, const ResponseVector& responses) {
  require_finite(theta);
  require_responses(responses);
  return sums(theta, responses).gradient;
}

double total_information(double theta, const ResponseVector& responses) {
  require_finite(theta);
  require_responses(responses);
  return sums(theta, responses).information;
}

double log_likelihood(double theta, const ResponseVector& responses) {
  require_finite(theta);
  require_responses(responses);
  return kernels::log_likelihood(theta, responses.discriminations(), responses.difficulties(),
                                 responses.scores());
}

NewtonStep newton_update(double theta_s, const ResponseVector& responses, int iteration) {
  require_finite(theta_s);
  require_responses(responses);

  const std::size_t n = responses.size();
  const auto a = responses.discriminations();
  const auto u = responses.scores();

  NewtonStep step;
  IterationRow& row = step.row;
  row.s = iteration;
  row.theta_s = theta_s;
  row.p.resize(n);
  kernels::prob(theta_s, a, responses.difficulties(), row.p);
  row.q.resize(n);
  row.numerator.resize(n);
  row.denominator.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    row.q[i] = 1.0 - row.p[i];
    row.numerator[i] = a[i] * (u[i] - row.p[i]);
    row.denominator[i] = a[i] * a[i] * row.p[i] * row.q[i];
    row.numerator_sum += row.numerator[i];
    row.denominator_sum += row.denominator[i];
  }
  if (!(row.denominator_sum >= kInformationFloor)) {
    throw NonFiniteMleError("test information below floor at theta = " +
                            std::to_string(theta_s));
  }
  step.theta_next = theta_s + row.numerator_sum / row.denominator_sum;
  return step;
}

double standard_error(double theta, const ResponseVector& responses) {
  const double info = total_information(theta, responses);
  if (!(info >= kInformationFloor)) {
    throw NonFiniteMleError("zero test information; standard error is unbounded");
  }
  return 1.0 / std::sqrt(info);
}

AbilityEstimate estimate_ability(const ResponseVector& responses, const EstimationConfig& config) {
  config.validate();
  require_responses(responses);

  const auto [lower, upper] = config.theta_bounds;
  AbilityEstimate out;

  auto finish = [&](double theta) {
    out.theta = std::clamp(theta, lower, upper);
    const double info = information_or_zero(out.theta, responses);
    if (info >= kInformationFloor) {
      out.standard_error = 1.0 / std::sqrt(info);
    } else {
      out.standard_error = std::numeric_limits<double>::infinity();
      out.status = EstimationStatus::NonFiniteMLE;
    }
    return out;
  };

  const std::size_t correct = responses.correct_count();
  if (correct == 0 || correct == responses.size()) {
    out.status = EstimationStatus::NonFiniteMLE;
    return finish(correct == 0 ? lower : upper);
  }

  double theta = std::clamp(config.theta_initial, kGuardLower, kGuardUpper);
  out.status = EstimationStatus::MaxIterationsReached;
  for (int s = 0; s < config.max_iterations; ++s) {
    NewtonStep step;
    try {
      step = newton_update(theta, responses, s);
    } catch (const NonFiniteMleError&) {
      out.status = EstimationStatus::NonFiniteMLE;
      break;
    }
    double next = std::clamp(step.theta_next, kGuardLower, kGuardUpper);

    const double ll_here = log_likelihood(theta, responses);
    const double slack = 1e-12 * std::max(1.0, std::abs(ll_here));
    for (int h = 0; h < kMaxHalvings && log_likelihood(next, responses) < ll_here - slack; ++h) {
      next = theta + 0.5 * (next - theta);
    }

    out.trace.push_back(std::move(step.row));
    const double delta = next - theta;
    theta = next;
    if (std::abs(delta) < config.tolerance) {
      out.status = EstimationStatus::Converged;
      break;
    }
  }
  return finish(theta);
}

}  // namespace placement::irt
