// AVX2 + FMA kernels, four doubles per lane group. This translation unit is
// the only one built with -mavx2 -mfma; keep it free of inline library
// templates so no AVX2-encoded COMDAT can leak into the scalar path.

#include <immintrin.h>

#include "placement/irt/kernels.hpp"
#include "placement/irt/model.hpp"

namespace placement::irt::kernels::detail {

namespace {

constexpr double kLog2e = 1.4426950408889634074;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kSqrt2 = 1.41421356237309504880;

// exp(x) for |x| <= 700: x = n ln2 + r with |r| <= ln2/2, Taylor series of
// e^r to degree 13 (truncation below 1e-17), 2^n built in the exponent bits.
inline __m256d exp_pd(__m256d x) {
  x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(-700.0)), _mm256_set1_pd(700.0));
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), _MM_FROUND_TO_NEAREST_INT |
                                                                    _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // n + 1.5 * 2^52 puts n in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ni = _mm256_castpd_si256(_mm256_add_pd(n, magic));
  ni = _mm256_sub_epi64(ni, _mm256_castpd_si256(magic));
  ni = _mm256_add_epi64(ni, _mm256_set1_epi64x(1023));
  const __m256d scale = _mm256_castsi256_pd(_mm256_slli_epi64(ni, 52));
  return _mm256_mul_pd(p, scale);
}

// ln(x) for normal positive x: x = m 2^e with m in [sqrt(1/2), sqrt(2)),
// ln m = 2 atanh(s), s = (m - 1) / (m + 1), series to s^21.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256i biased = _mm256_srli_epi64(bits, 52);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL)),
                      _mm256_set1_epi64x(0x3FF0000000000000LL)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  biased = _mm256_add_epi64(
      biased, _mm256_and_si256(_mm256_castpd_si256(big), _mm256_set1_epi64x(1)));

  const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
  const __m256d e = _mm256_sub_pd(
      _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))),
                    two52),
      _mm256_set1_pd(1023.0));

  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(f, _mm256_set1_pd(2.0)));
  const __m256d s2 = _mm256_mul_pd(s, s);
  __m256d poly = _mm256_set1_pd(1.0 / 21.0);
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 19.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 17.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 15.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 13.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 11.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 9.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 7.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 5.0));
  poly = _mm256_fmadd_pd(poly, s2, _mm256_set1_pd(1.0 / 3.0));
  // 2 s + 2 s^3 poly
  const __m256d two_s = _mm256_add_pd(s, s);
  const __m256d lnm = _mm256_fmadd_pd(_mm256_mul_pd(two_s, s2), poly, two_s);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Hi),
                         _mm256_fmadd_pd(e, _mm256_set1_pd(kLn2Lo), lnm));
}

// ln(1 + y) for y in [0, 1]: log of v = 1 + y corrected for the rounding
// of v, ln(1 + y) ~ ln v - ((v - 1) - y) / v.
inline __m256d log1p_pd(__m256d y) {
  const __m256d v = _mm256_add_pd(_mm256_set1_pd(1.0), y);
  const __m256d err = _mm256_sub_pd(_mm256_sub_pd(v, _mm256_set1_pd(1.0)), y);
  return _mm256_sub_pd(log_pd(v), _mm256_div_pd(err, v));
}

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

// Same logit bound and softplus form as the scalar kernel.
inline __m256d log_response_prob_pd(__m256d theta, __m256d a, __m256d b, __m256d u,
                                    __m256d cap) {
  __m256d z = _mm256_mul_pd(a, _mm256_sub_pd(theta, b));
  z = _mm256_min_pd(_mm256_max_pd(z, _mm256_sub_pd(_mm256_setzero_pd(), cap)), cap);
  const __m256d correct = _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_NEQ_OQ);
  const __m256d w = _mm256_blendv_pd(_mm256_sub_pd(_mm256_setzero_pd(), z), z, correct);
  const __m256d neg_w = _mm256_sub_pd(_mm256_setzero_pd(), w);
  const __m256d tail = log1p_pd(exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), abs_pd(w))));
  const __m256d soft = _mm256_add_pd(_mm256_max_pd(neg_w, _mm256_setzero_pd()), tail);
  return _mm256_sub_pd(_mm256_setzero_pd(), soft);
}

inline __m256d prob_pd(__m256d theta, __m256d a, __m256d b) {
  // exp(-a (theta - b)) = exp(a (b - theta))
  const __m256d z = _mm256_mul_pd(a, _mm256_sub_pd(b, theta));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d p = _mm256_div_pd(one, _mm256_add_pd(one, exp_pd(z)));
  return _mm256_min_pd(_mm256_max_pd(p, _mm256_set1_pd(kProbabilityFloor)),
                       _mm256_set1_pd(1.0 - kProbabilityFloor));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Tail of fewer than four items: copy into zero-padded lanes and carry a
// 0/1 mask so padded lanes contribute nothing.
struct Tail {
  alignas(32) double a[4] = {1.0, 1.0, 1.0, 1.0};
  alignas(32) double b[4] = {0.0, 0.0, 0.0, 0.0};
  alignas(32) double u[4] = {0.0, 0.0, 0.0, 0.0};
  alignas(32) double mask[4] = {0.0, 0.0, 0.0, 0.0};

  Tail(const double* ap, const double* bp, const double* up, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      a[k] = ap[k];
      b[k] = bp[k];
      if (up != nullptr) u[k] = up[k];
      mask[k] = 1.0;
    }
  }
};

}  // namespace

void prob_avx2(double theta, const double* a, const double* b, double* p, std::size_t n) {
  const __m256d t = _mm256_set1_pd(theta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(p + i, prob_pd(t, _mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  if (i < n) {
    Tail tail(a + i, b + i, nullptr, n - i);
    alignas(32) double out[4];
    _mm256_store_pd(out, prob_pd(t, _mm256_load_pd(tail.a), _mm256_load_pd(tail.b)));
    for (std::size_t k = 0; i + k < n; ++k) p[i + k] = out[k];
  }
}

ScoreInfo score_info_avx2(double theta, const double* a, const double* b, const double* u,
                          std::size_t n) {
  const __m256d t = _mm256_set1_pd(theta);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d grad = _mm256_setzero_pd();
  __m256d info = _mm256_setzero_pd();

  auto accumulate = [&](__m256d av, __m256d bv, __m256d uv, __m256d mask) {
    const __m256d p = prob_pd(t, av, bv);
    const __m256d q = _mm256_sub_pd(one, p);
    const __m256d am = _mm256_mul_pd(av, mask);
    grad = _mm256_fmadd_pd(am, _mm256_sub_pd(uv, p), grad);
    info = _mm256_fmadd_pd(_mm256_mul_pd(am, av), _mm256_mul_pd(p, q), info);
  };

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    accumulate(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _mm256_loadu_pd(u + i), one);
  }
  if (i < n) {
    Tail tail(a + i, b + i, u + i, n - i);
    accumulate(_mm256_load_pd(tail.a), _mm256_load_pd(tail.b), _mm256_load_pd(tail.u),
               _mm256_load_pd(tail.mask));
  }
  return ScoreInfo{hsum(grad), hsum(info)};
}

double log_likelihood_avx2(double theta, const double* a, const double* b, const double* u,
                           std::size_t n) {
  const __m256d t = _mm256_set1_pd(theta);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d cap = _mm256_set1_pd(kLogitCap);
  __m256d ll = _mm256_setzero_pd();

  auto accumulate = [&](__m256d av, __m256d bv, __m256d uv, __m256d mask) {
    ll = _mm256_fmadd_pd(log_response_prob_pd(t, av, bv, uv, cap), mask, ll);
  };

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    accumulate(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), _mm256_loadu_pd(u + i), one);
  }
  if (i < n) {
    Tail tail(a + i, b + i, u + i, n - i);
    accumulate(_mm256_load_pd(tail.a), _mm256_load_pd(tail.b), _mm256_load_pd(tail.u),
               _mm256_load_pd(tail.mask));
  }
  return hsum(ll);
}

}  // namespace placement::irt::kernels::detail
