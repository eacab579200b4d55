#pragma once

// Two-parameter logistic item response model: item parameters, response
// vectors and the result types produced by the ability estimator.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace placement::irt {

/// Raised for inputs outside an operation's domain (non-finite theta,
/// non-positive discrimination, empty response vectors, bad config).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the test information is too small to take a Newton step or
/// to form a standard error.
class NonFiniteMleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInformationFloor = 1e-12;
inline constexpr double kProbabilityFloor = 1e-12;

/// Discrimination `a` and difficulty `b` of one item.
class ItemParameters {
 public:
  ItemParameters() = default;
  ItemParameters(double discrimination, double difficulty);

  [[nodiscard]] double discrimination() const noexcept { return a_; }
  [[nodiscard]] double difficulty() const noexcept { return b_; }

  friend bool operator==(const ItemParameters&, const ItemParameters&) = default;

 private:
  double a_ = 1.0;
  double b_ = 0.0;
};

struct Response {
  ItemParameters item;
  int u = 0;
};

/// Dichotomous responses stored column-wise so the kernels can stream over
/// contiguous a, b and u arrays.
class ResponseVector {
 public:
  ResponseVector() = default;
  explicit ResponseVector(std::span<const Response> responses);

  void add(const ItemParameters& item, int u);
  void add(const Response& r) { add(r.item, r.u); }
  void append(const ResponseVector& other);

  [[nodiscard]] std::size_t size() const noexcept { return a_.size(); }
  [[nodiscard]] bool empty() const noexcept { return a_.empty(); }

  [[nodiscard]] std::span<const double> discriminations() const noexcept { return a_; }
  [[nodiscard]] std::span<const double> difficulties() const noexcept { return b_; }
  [[nodiscard]] std::span<const double> scores() const noexcept { return u_; }

  [[nodiscard]] Response operator[](std::size_t i) const;
  [[nodiscard]] std::size_t correct_count() const noexcept;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> u_;
};

struct ThetaBounds {
  double lower = -3.0;
  double upper = 3.0;
};

struct EstimationConfig {
  double theta_initial = 0.0;
  double tolerance = 1e-5;
  int max_iterations = 50;
  ThetaBounds theta_bounds{};

  /// Throws DomainError when tolerance <= 0, max_iterations < 1 or the
  /// bounds are empty.
  void validate() const;
};

enum class EstimationStatus { Converged, MaxIterationsReached, NonFiniteMLE };

[[nodiscard]] std::string_view to_string(EstimationStatus status) noexcept;
[[nodiscard]] EstimationStatus parse_status(std::string_view text);

/// One Newton iteration with the per-item columns laid out the way a
/// worked-example table would print them.
struct IterationRow {
  int s = 0;
  double theta_s = 0.0;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> numerator;
  std::vector<double> denominator;
  double numerator_sum = 0.0;
  double denominator_sum = 0.0;
};

struct AbilityEstimate {
  double theta = 0.0;
  double standard_error = 0.0;
  EstimationStatus status = EstimationStatus::Converged;
  std::vector<IterationRow> trace;

  [[nodiscard]] int iterations() const noexcept { return static_cast<int>(trace.size()); }
};

}  // namespace placement::irt
