#include <atomic>
#include <cstdlib>
#include <string_view>

#include "placement/irt/kernels.hpp"
#include "placement/irt/model.hpp"

namespace placement::irt::kernels {

namespace {

const KernelTable kScalar{"scalar", &detail::prob_scalar, &detail::score_info_scalar,
                          &detail::log_likelihood_scalar};

#if defined(PLACEMENT_HAVE_AVX2)
const KernelTable kAvx2{"avx2", &detail::prob_avx2, &detail::score_info_avx2,
                        &detail::log_likelihood_avx2};
#endif

const KernelTable* table_for(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Scalar:
      return &kScalar;
    case KernelKind::Avx2:
      return avx2_table();
  }
  return nullptr;
}

const KernelTable* detect() noexcept {
  const char* env = std::getenv("PLACEMENT_KERNEL");
  if (env != nullptr) {
    const std::string_view wanted(env);
    if (wanted == "scalar") return &kScalar;
    if (wanted == "avx2" && cpu_supports(KernelKind::Avx2)) return avx2_table();
  }
  if (cpu_supports(KernelKind::Avx2)) return avx2_table();
  return &kScalar;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

void check_sizes(std::size_t a, std::size_t b, std::size_t other) {
  if (a != b || a != other) throw DomainError("kernel input spans differ in length");
}

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(PLACEMENT_HAVE_AVX2)
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_supports(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Scalar:
      return true;
    case KernelKind::Avx2:
#if defined(PLACEMENT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&kScalar};
  if (cpu_supports(KernelKind::Avx2)) out.push_back(avx2_table());
  return out;
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

bool select(KernelKind kind) noexcept {
  const KernelTable* table = table_for(kind);
  if (table == nullptr || !cpu_supports(kind)) return false;
  current().store(table, std::memory_order_release);
  return true;
}

void reset_selection() noexcept { current().store(detect(), std::memory_order_release); }

void prob(double theta, std::span<const double> a, std::span<const double> b,
          std::span<double> p_out) {
  check_sizes(a.size(), b.size(), p_out.size());
  active().prob(theta, a.data(), b.data(), p_out.data(), a.size());
}

ScoreInfo score_info(double theta, std::span<const double> a, std::span<const double> b,
                     std::span<const double> u) {
  check_sizes(a.size(), b.size(), u.size());
  return active().score_info(theta, a.data(), b.data(), u.data(), a.size());
}

double log_likelihood(double theta, std::span<const double> a, std::span<const double> b,
                      std::span<const double> u) {
  check_sizes(a.size(), b.size(), u.size());
  return active().log_likelihood(theta, a.data(), b.data(), u.data(), a.size());
}

}  // namespace placement::irt::kernels
