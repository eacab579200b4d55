#include "placement/irt/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace placement::irt {

ItemParameters::ItemParameters(double discrimination, double difficulty)
    : a_(discrimination), b_(difficulty) {
  if (!std::isfinite(discrimination) || discrimination <= 0.0) {
    throw DomainError("item discrimination must be finite and > 0, got " +
                      std::to_string(discrimination));
  }
  if (!std::isfinite(difficulty)) {
    throw DomainError("item difficulty must be finite");
  }
}

ResponseVector::ResponseVector(std::span<const Response> responses) {
  a_.reserve(responses.size());
  b_.reserve(responses.size());
  u_.reserve(responses.size());
  for (const auto& r : responses) add(r);
}

void ResponseVector::add(const ItemParameters& item, int u) {
  if (u != 0 && u != 1) {
    throw DomainError("response score must be 0 or 1, got " + std::to_string(u));
  }
  a_.push_back(item.discrimination());
  b_.push_back(item.difficulty());
  u_.push_back(static_cast<double>(u));
}

void ResponseVector::append(const ResponseVector& other) {
  a_.insert(a_.end(), other.a_.begin(), other.a_.end());
  b_.insert(b_.end(), other.b_.begin(), other.b_.end());
  u_.insert(u_.end(), other.u_.begin(), other.u_.end());
}

Response ResponseVector::operator[](std::size_t i) const {
  return Response{ItemParameters(a_.at(i), b_.at(i)), static_cast<int>(u_.at(i))};
}

std::size_t ResponseVector::correct_count() const noexcept {
  return static_cast<std::size_t>(std::count(u_.begin(), u_.end(), 1.0));
}

void EstimationConfig::validate() const {
  if (!std::isfinite(theta_initial)) throw DomainError("theta_initial must be finite");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (max_iterations < 1) throw DomainError("max_iterations must be >= 1");
  if (!(theta_bounds.lower < theta_bounds.upper)) {
    throw DomainError("theta bounds must satisfy lower < upper");
  }
}

std::string_view to_string(EstimationStatus status) noexcept {
  switch (status) {
    case EstimationStatus::Converged:
      return "converged";
    case EstimationStatus::MaxIterationsReached:
      return "max_iterations_reached";
    case EstimationStatus::NonFiniteMLE:
      return "non_finite_mle";
  }
  return "unknown";
}

EstimationStatus parse_status(std::string_view text) {
  if (text == "converged") return EstimationStatus::Converged;
  if (text == "max_iterations_reached") return EstimationStatus::MaxIterationsReached;
  if (text == "non_finite_mle") return EstimationStatus::NonFiniteMLE;
  throw DomainError("unknown estimation status '" + std::string(text) + "'");
}

}  // namespace placement::irt
