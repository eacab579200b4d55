// Scalar reference kernels. These define the semantics the vector variants
// are tested against.

#include <algorithm>
#include <cmath>

#include "placement/irt/kernels.hpp"
#include "placement/irt/model.hpp"

namespace placement::irt::kernels::detail {

namespace {

inline double clamped_prob(double theta, double a, double b) {
  const double p = 1.0 / (1.0 + std::exp(-a * (theta - b)));
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

// ln P for u = 1 and ln Q for u = 0, as -softplus(-w) with w = +-a (theta - b).
// Going through softplus keeps full relative precision when P is near 0 or 1.
inline double log_response_prob(double theta, double a, double b, double u) {
  const double z = std::clamp(a * (theta - b), -kLogitCap, kLogitCap);
  const double w = u != 0.0 ? z : -z;
  return -(std::max(-w, 0.0) + std::log1p(std::exp(-std::abs(w))));
}

}  // namespace

void prob_scalar(double theta, const double* a, const double* b, double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) p[i] = clamped_prob(theta, a[i], b[i]);
}

ScoreInfo score_info_scalar(double theta, const double* a, const double* b, const double* u,
                            std::size_t n) {
  ScoreInfo out;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = clamped_prob(theta, a[i], b[i]);
    const double q = 1.0 - p;
    out.gradient += a[i] * (u[i] - p);
    out.information += a[i] * a[i] * p * q;
  }
  return out;
}

double log_likelihood_scalar(double theta, const double* a, const double* b, const double* u,
                             std::size_t n) {
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ll += log_response_prob(theta, a[i], b[i], u[i]);
  }
  return ll;
}

}  // namespace placement::irt::kernels::detail
