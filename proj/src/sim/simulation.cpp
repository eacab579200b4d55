#include "placement/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "placement/irt/estimator.hpp"
#include "placement/irt/kernels.hpp"

namespace placement::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::size_t theta_index, int replication) {
  return splitmix64(splitmix64(seed ^ splitmix64(theta_index)) + static_cast<std::uint64_t>(replication));
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// log(1 + e^x) without overflow.
double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

irt::ResponseVector adaptive_run(double true_theta, std::span<const irt::ItemParameters> bank,
                                 std::size_t length, const irt::EstimationConfig& config,
                                 std::mt19937_64& gen) {
  irt::ResponseVector responses;
  std::vector<bool> used(bank.size(), false);
  double theta_hat = config.theta_initial;
  for (std::size_t k = 0; k < length; ++k) {
    std::size_t best = bank.size();
    double best_info = -1.0;
    for (std::size_t i = 0; i < bank.size(); ++i) {
      if (used[i]) continue;
      const double info = irt::item_information(theta_hat, bank[i]);
      if (info > best_info) {
        best = i;
        best_info = info;
      }
    }
    used[best] = true;
    const int u = uniform01(gen) < irt::prob_correct(true_theta, bank[best]) ? 1 : 0;
    responses.add(bank[best], u);
    const auto provisional = irt::estimate_ability(responses, config);
    theta_hat = provisional.status == irt::EstimationStatus::NonFiniteMLE ? config.theta_initial
                                                                         : provisional.theta;
  }
  return responses;
}

}  // namespace

void SimulationSpec::validate() const {
  if (replications < 1) throw irt::DomainError("replications must be >= 1");
  if (bank.empty()) throw irt::DomainError("simulation bank is empty");
  for (double t : true_thetas) {
    if (!(t >= -3.0 && t <= 3.0)) throw irt::DomainError("true theta outside [-3, 3]");
  }
  if (mode == assessment::SelectionMode::AdaptiveMaxInfo && test_length > bank.size()) {
    throw irt::DomainError("adaptive test length exceeds bank size");
  }
  config.validate();
}

std::vector<irt::ItemParameters> linear_bank(std::size_t n, double lo, double hi, double a) {
  std::vector<irt::ItemParameters> bank;
  bank.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = n == 1 ? 0.5 * (lo + hi)
                            : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    bank.emplace_back(a, b);
  }
  return bank;
}

irt::ResponseVector simulate_responses(double true_theta,
                                       std::span<const irt::ItemParameters> bank,
                                       std::uint64_t seed) {
  std::vector<double> a(bank.size());
  std::vector<double> b(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    a[i] = bank[i].discrimination();
    b[i] = bank[i].difficulty();
  }
  std::vector<double> p(bank.size());
  irt::kernels::prob(true_theta, a, b, p);

  std::mt19937_64 gen(seed);
  irt::ResponseVector out;
  for (std::size_t i = 0; i < bank.size(); ++i) {
    out.add(bank[i], uniform01(gen) < p[i] ? 1 : 0);
  }
  return out;
}

double reference_log_likelihood(const irt::ResponseVector& responses, double theta) {
  const auto a = responses.discriminations();
  const auto b = responses.difficulties();
  const auto u = responses.scores();
  double ll = 0.0;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const double z = a[i] * (theta - b[i]);
    // ln P = -softplus(-z), ln Q = -softplus(z)
    ll -= u[i] * softplus(-z) + (1.0 - u[i]) * softplus(z);
  }
  return ll;
}

double grid_search_mle(const irt::ResponseVector& responses, double lo, double hi, double step) {
  if (!(lo < hi) || !(step > 0.0)) throw irt::DomainError("grid needs lo < hi and step > 0");
  const auto points = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  double best_theta = lo;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (long long k = 0; k <= points; ++k) {
    const double theta = lo + static_cast<double>(k) * step;
    const double ll = reference_log_likelihood(responses, theta);
    if (ll > best_ll) {
      best_ll = ll;
      best_theta = theta;
    }
  }
  return best_theta;
}

RecoveryReport run_recovery(const SimulationSpec& spec) {
  spec.validate();
  RecoveryReport report;
  report.seed = spec.seed;
  const std::size_t length = spec.test_length == 0 ? spec.bank.size() : spec.test_length;

  for (std::size_t t = 0; t < spec.true_thetas.size(); ++t) {
    const double truth = spec.true_thetas[t];
    RecoveryRow row;
    row.true_theta = truth;
    row.replications = spec.replications;

    std::vector<double> estimates;
    std::vector<double> errors;
    estimates.reserve(static_cast<std::size_t>(spec.replications));
    for (int r = 0; r < spec.replications; ++r) {
      const std::uint64_t seed = stream_seed(spec.seed, t, r);
      irt::ResponseVector responses;
      if (spec.mode == assessment::SelectionMode::AdaptiveMaxInfo) {
        std::mt19937_64 gen(seed);
        responses = adaptive_run(truth, spec.bank, length, spec.config, gen);
      } else {
        responses = simulate_responses(truth, spec.bank, seed);
      }
      const irt::AbilityEstimate e = irt::estimate_ability(responses, spec.config);
      if (e.status == irt::EstimationStatus::NonFiniteMLE) continue;
      estimates.push_back(e.theta);
      errors.push_back(e.standard_error);
    }

    row.finite = static_cast<int>(estimates.size());
    row.non_finite_rate =
        static_cast<double>(spec.replications - row.finite) / static_cast<double>(spec.replications);
    if (estimates.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.mean_estimate = row.bias = row.rmse = row.mean_se = row.empirical_sd = nan;
    } else {
      const auto n = static_cast<double>(estimates.size());
      double sum = 0.0;
      double sq_err = 0.0;
      double se_sum = 0.0;
      for (std::size_t i = 0; i < estimates.size(); ++i) {
        sum += estimates[i];
        sq_err += (estimates[i] - truth) * (estimates[i] - truth);
        se_sum += errors[i];
      }
      row.mean_estimate = sum / n;
      row.bias = row.mean_estimate - truth;
      row.rmse = std::sqrt(sq_err / n);
      row.mean_se = se_sum / n;
      double var = 0.0;
      for (double e : estimates) var += (e - row.mean_estimate) * (e - row.mean_estimate);
      row.empirical_sd = estimates.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string to_csv(const RecoveryReport& report) {
  std::ostringstream out;
  out << "# generator=" << report.generator << " seed=" << report.seed << '\n';
  out << "true_theta,replications,finite,mean_estimate,bias,rmse,mean_se,empirical_sd,"
         "non_finite_rate\n";
  char buf[512];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  r.true_theta, r.replications, r.finite, r.mean_estimate, r.bias, r.rmse,
                  r.mean_se, r.empirical_sd, r.non_finite_rate);
    out << buf;
  }
  return out.str();
}

std::string to_text(const RecoveryReport& report) {
  std::ostringstream out;
  out << "Recovery report (generator " << report.generator << ", seed " << report.seed << ")\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%8s %6s %10s %9s %8s %8s %8s %10s\n", "theta", "reps", "mean",
                "bias", "rmse", "mean_se", "emp_sd", "nonfinite");
  out << buf;
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%8.3f %6d %10.5f %9.5f %8.5f %8.5f %8.5f %10.4f\n",
                  r.true_theta, r.replications, r.mean_estimate, r.bias, r.rmse, r.mean_se,
                  r.empirical_sd, r.non_finite_rate);
    out << buf;
  }
  return out.str();
}

}  // namespace placement::sim
