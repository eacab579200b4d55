#pragma once

// Batched inner loops of the 2PL estimator. Every kernel has a scalar
// reference implementation and, on x86-64, an AVX2+FMA variant picked at
// runtime from the CPU feature bits. PLACEMENT_KERNEL=scalar|avx2 in the
// environment overrides the automatic choice.
//
// All kernels clamp P into [kProbabilityFloor, 1 - kProbabilityFloor]
// before using it, so Q = 1 - P never reaches zero.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace placement::irt::kernels {

/// Logit bound matching the probability floors: 1 / (1 + e^-kLogitCap) is
/// 1 - kProbabilityFloor. The log-likelihood kernels clamp a (theta - b) to it.
inline constexpr double kLogitCap = 27.63102111592755;

struct ScoreInfo {
  double gradient = 0.0;     // sum a (u - P)
  double information = 0.0;  // sum a^2 P Q
};

struct KernelTable {
  std::string_view name;
  void (*prob)(double theta, const double* a, const double* b, double* p, std::size_t n);
  ScoreInfo (*score_info)(double theta, const double* a, const double* b, const double* u,
                          std::size_t n);
  double (*log_likelihood)(double theta, const double* a, const double* b, const double* u,
                           std::size_t n);
};

enum class KernelKind { Scalar, Avx2 };

[[nodiscard]] const KernelTable& scalar_table() noexcept;

/// nullptr when the binary was built without AVX2 support.
[[nodiscard]] const KernelTable* avx2_table() noexcept;

[[nodiscard]] bool cpu_supports(KernelKind kind) noexcept;

/// Every kernel table usable on this machine, scalar first.
[[nodiscard]] std::vector<const KernelTable*> available_tables();

[[nodiscard]] const KernelTable& active() noexcept;

/// Forces a kernel; returns false (and changes nothing) when the CPU or the
/// build cannot run it.
bool select(KernelKind kind) noexcept;

/// Drops any forced choice and returns to the detected best kernel.
void reset_selection() noexcept;

// Span front-ends over the active table.
void prob(double theta, std::span<const double> a, std::span<const double> b,
          std::span<double> p_out);
[[nodiscard]] ScoreInfo score_info(double theta, std::span<const double> a,
                                   std::span<const double> b, std::span<const double> u);
[[nodiscard]] double log_likelihood(double theta, std::span<const double> a,
                                    std::span<const double> b, std::span<const double> u);

namespace detail {
void prob_scalar(double theta, const double* a, const double* b, double* p, std::size_t n);
ScoreInfo score_info_scalar(double theta, const double* a, const double* b, const double* u,
                            std::size_t n);
double log_likelihood_scalar(double theta, const double* a, const double* b, const double* u,
                             std::size_t n);
#if defined(PLACEMENT_HAVE_AVX2)
void prob_avx2(double theta, const double* a, const double* b, double* p, std::size_t n);
ScoreInfo score_info_avx2(double theta, const double* a, const double* b, const double* u,
                          std::size_t n);
double log_likelihood_avx2(double theta, const double* a, const double* b, const double* u,
                           std::size_t n);
#endif
}  // namespace detail

}  // namespace placement::irt::kernels
