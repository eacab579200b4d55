#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "placement/irt/kernels.hpp"
#include "placement/irt/model.hpp"

using namespace placement::irt;
namespace k = placement::irt::kernels;

namespace {

struct Instance {
  double theta;
  std::vector<double> a, b, u;
};

Instance random_instance(std::mt19937_64& gen, std::size_t n, double spread) {
  std::uniform_real_distribution<double> ad(0.2, 3.0), bd(-spread, spread), td(-6.0, 6.0);
  std::bernoulli_distribution coin(0.5);
  Instance in{td(gen), {}, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    in.a.push_back(ad(gen));
    in.b.push_back(bd(gen));
    in.u.push_back(coin(gen) ? 1.0 : 0.0);
  }
  return in;
}

// Independent of both kernels: plain libm, long double.
long double reference_p(double theta, double a, double b) {
  const long double p = 1.0L / (1.0L + std::exp(-static_cast<long double>(a) * (theta - b)));
  return std::clamp(p, static_cast<long double>(kProbabilityFloor),
                    1.0L - static_cast<long double>(kProbabilityFloor));
}

}  // namespace

TEST_CASE("scalar prob matches a long double reference") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    const auto in = random_instance(gen, 1 + rep % 40, 3.0);
    std::vector<double> p(in.a.size());
    k::scalar_table().prob(in.theta, in.a.data(), in.b.data(), p.data(), p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(std::abs(p[i] - static_cast<double>(reference_p(in.theta, in.a[i], in.b[i]))) <= 1e-15);
    }
  }
}

TEST_CASE("every available kernel agrees with the scalar reference") {
  const auto tables = k::available_tables();
  REQUIRE(tables.front()->name == "scalar");
  if (tables.size() == 1) WARN("only the scalar kernel is available on this machine");

  const auto& ref = k::scalar_table();
  std::mt19937_64 gen(20141016);
  for (const auto* table : tables) {
    INFO("kernel " << table->name);
    // Sizes cover empty input, partial vector tails and long runs; the wide
    // spread drives P into the floors.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 20u, 33u, 64u, 257u}) {
      for (double spread : {3.0, 40.0}) {
        for (int rep = 0; rep < 20; ++rep) {
          const auto in = random_instance(gen, n, spread);
          std::vector<double> p_ref(n), p(n);
          ref.prob(in.theta, in.a.data(), in.b.data(), p_ref.data(), n);
          table->prob(in.theta, in.a.data(), in.b.data(), p.data(), n);
          for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(p[i] - p_ref[i]) <= 1e-15);

          const auto si_ref = ref.score_info(in.theta, in.a.data(), in.b.data(), in.u.data(), n);
          const auto si = table->score_info(in.theta, in.a.data(), in.b.data(), in.u.data(), n);
          double scale = 1.0;
          for (double a : in.a) scale += a * a;
          CHECK(std::abs(si.gradient - si_ref.gradient) <= 1e-12 * scale);
          CHECK(std::abs(si.information - si_ref.information) <= 1e-12 * scale);

          const double ll_ref = ref.log_likelihood(in.theta, in.a.data(), in.b.data(), in.u.data(), n);
          const double ll = table->log_likelihood(in.theta, in.a.data(), in.b.data(), in.u.data(), n);
          CHECK(std::abs(ll - ll_ref) <= 1e-12 * std::max(1.0, std::abs(ll_ref)));
        }
      }
    }
  }
}

TEST_CASE("probability floors hold in every kernel") {
  const std::vector<double> a{5.0, 5.0, 1.0, 1.0};
  const std::vector<double> b{-200.0, 200.0, 0.0, 0.0};
  const std::vector<double> u{0.0, 1.0, 1.0, 0.0};
  for (const auto* table : k::available_tables()) {
    INFO("kernel " << table->name);
    std::vector<double> p(4);
    table->prob(0.0, a.data(), b.data(), p.data(), 4);
    CHECK(p[0] == 1.0 - kProbabilityFloor);
    CHECK(p[1] == kProbabilityFloor);
    CHECK(p[2] == 0.5);
    const double ll = table->log_likelihood(0.0, a.data(), b.data(), u.data(), 4);
    CHECK(std::isfinite(ll));
    CHECK(ll == Catch::Approx(2.0 * std::log(kProbabilityFloor) + 2.0 * std::log(0.5)).epsilon(1e-12));
  }
}

TEST_CASE("runtime selection") {
  CHECK(k::select(k::KernelKind::Scalar));
  CHECK(k::active().name == "scalar");
  if (k::cpu_supports(k::KernelKind::Avx2)) {
    CHECK(k::select(k::KernelKind::Avx2));
    CHECK(k::active().name == "avx2");
  } else {
    CHECK_FALSE(k::select(k::KernelKind::Avx2));
    CHECK(k::active().name == "scalar");
  }

  ::setenv("PLACEMENT_KERNEL", "scalar", 1);
  k::reset_selection();
  CHECK(k::active().name == "scalar");
  ::unsetenv("PLACEMENT_KERNEL");
  k::reset_selection();
  CHECK(k::active().name == (k::cpu_supports(k::KernelKind::Avx2) ? "avx2" : "scalar"));
}

TEST_CASE("span front-ends check lengths") {
  std::vector<double> a{1.0, 1.0}, b{0.0}, p(2);
  CHECK_THROWS_AS(k::prob(0.0, a, b, p), DomainError);
}
