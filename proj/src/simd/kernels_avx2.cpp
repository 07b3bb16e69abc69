// AVX2+FMA backend. Compiled with -mavx2 -mfma for this file only; dispatch.cpp
// guards selection behind __builtin_cpu_supports, so nothing here executes on
// hosts without those features.
//
// exp/log use the classic Cephes double-precision rational approximations
// (Moshier's constants, reproduced in many SIMD math libraries). Observed
// error against libm is <= 2 ulp across the tested range.

#if defined(__x86_64__) || defined(__i386__)

#include "bregmn/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdint>

namespace bregmn::simd {
namespace avx2 {

namespace {

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

// 2^n for integer-valued doubles n in [-2098, 1024], split into two factors
// applied one after the other: 2^1024 alone overflows and 2^-1075 alone
// flushes to zero, but p * 2^(n/2) * 2^(n - n/2) stays representable and
// grades subnormal results correctly.
struct Pow2Split {
  __m256d hi, lo;
};

inline Pow2Split pow2i(__m256d n) {
  const __m256d half = _mm256_round_pd(
      _mm256_mul_pd(n, splat(0.5)), _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  const __m256d rest = _mm256_sub_pd(n, half);
  auto scale = [](__m256d e) {
    __m128i i32 = _mm256_cvtpd_epi32(e);
    __m256i i64 = _mm256_cvtepi32_epi64(i32);
    i64 = _mm256_add_epi64(i64, _mm256_set1_epi64x(1023));
    i64 = _mm256_slli_epi64(i64, 52);
    return _mm256_castsi256_pd(i64);
  };
  return {scale(half), scale(rest)};
}

const double kExpHi = 709.782712893383996843;   // above: overflow to inf
const double kExpLo = -745.133219101941108420;  // below: underflow to 0

inline __m256d exp_core(__m256d x) {
  const __m256d x_in = x;

  x = _mm256_min_pd(x, splat(kExpHi));
  x = _mm256_max_pd(x, splat(kExpLo));

  // n = floor(log2(e) * x + 0.5)
  __m256d n = _mm256_floor_pd(
      _mm256_fmadd_pd(x, splat(1.4426950408889634073599), splat(0.5)));

  // r = x - n*ln2, split constant for extra precision
  x = _mm256_fnmadd_pd(n, splat(6.93145751953125e-1), x);
  x = _mm256_fnmadd_pd(n, splat(1.42860682030941723212e-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);

  __m256d px = splat(1.26177193074810590878e-4);
  px = _mm256_fmadd_pd(px, xx, splat(3.02994407707441961300e-2));
  px = _mm256_fmadd_pd(px, xx, splat(9.99999999999999999910e-1));
  px = _mm256_mul_pd(px, x);

  __m256d qx = splat(3.00198505138664455042e-6);
  qx = _mm256_fmadd_pd(qx, xx, splat(2.52448340349684104192e-3));
  qx = _mm256_fmadd_pd(qx, xx, splat(2.27265548208155028766e-1));
  qx = _mm256_fmadd_pd(qx, xx, splat(2.00000000000000000005e0));

  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(r, splat(2.0), splat(1.0));
  const Pow2Split p2 = pow2i(n);
  r = _mm256_mul_pd(_mm256_mul_pd(r, p2.hi), p2.lo);

  // Saturate and propagate specials from the unclamped input.
  const __m256d inf = splat(HUGE_VAL);
  __m256d over = _mm256_cmp_pd(x_in, splat(kExpHi), _CMP_GT_OQ);
  __m256d under = _mm256_cmp_pd(x_in, splat(kExpLo), _CMP_LT_OQ);
  __m256d isnan = _mm256_cmp_pd(x_in, x_in, _CMP_UNORD_Q);
  r = _mm256_blendv_pd(r, inf, over);
  r = _mm256_blendv_pd(r, _mm256_setzero_pd(), under);
  r = _mm256_blendv_pd(r, x_in, isnan);
  return r;
}

const double kSqrtHalf = 0.70710678118654752440;

inline __m256d log_core(__m256d x) {
  const __m256d x_in = x;

  // Subnormals: rescale by 2^54 and take the exponent back out later.
  const __m256d tiny =
      _mm256_cmp_pd(x, splat(2.2250738585072014e-308), _CMP_LT_OQ);
  const __m256d pos = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GT_OQ);
  const __m256d sub = _mm256_and_pd(tiny, pos);
  x = _mm256_blendv_pd(x, _mm256_mul_pd(x, splat(0x1p54)), sub);

  // frexp via bit twiddling: x = m * 2^e with m in [0.5, 1)
  __m256i bits = _mm256_castpd_si256(x);
  __m256i expo = _mm256_srli_epi64(bits, 52);
  expo = _mm256_and_si256(expo, _mm256_set1_epi64x(0x7ff));
  __m256i mant = _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL));
  mant = _mm256_or_si256(mant, _mm256_set1_epi64x(0x3fe0000000000000LL));
  __m256d m = _mm256_castsi256_pd(mant);

  // e as double; epi64 -> pd via the 2^52 trick (exponents are small ints)
  __m256d e;
  {
    __m256i tmp = _mm256_or_si256(expo, _mm256_set1_epi64x(0x4330000000000000LL));
    e = _mm256_sub_pd(_mm256_castsi256_pd(tmp), splat(0x1p52));
    e = _mm256_sub_pd(e, splat(1022.0));
  }
  e = _mm256_blendv_pd(e, _mm256_sub_pd(e, splat(54.0)), sub);

  const __m256d low = _mm256_cmp_pd(m, splat(kSqrtHalf), _CMP_LT_OQ);
  e = _mm256_blendv_pd(e, _mm256_sub_pd(e, splat(1.0)), low);
  m = _mm256_blendv_pd(m, _mm256_add_pd(m, m), low);
  __m256d f = _mm256_sub_pd(m, splat(1.0));

  const __m256d z = _mm256_mul_pd(f, f);

  __m256d p = splat(1.01875663804580931796e-4);
  p = _mm256_fmadd_pd(p, f, splat(4.97494994976747001425e-1));
  p = _mm256_fmadd_pd(p, f, splat(4.70579119878881725854e0));
  p = _mm256_fmadd_pd(p, f, splat(1.44989225341610930846e1));
  p = _mm256_fmadd_pd(p, f, splat(1.79368678507819816313e1));
  p = _mm256_fmadd_pd(p, f, splat(7.70838733755885391666e0));

  __m256d q = _mm256_add_pd(f, splat(1.12873587189167450590e1));
  q = _mm256_fmadd_pd(q, f, splat(4.52279145837532221105e1));
  q = _mm256_fmadd_pd(q, f, splat(8.29875266912776603211e1));
  q = _mm256_fmadd_pd(q, f, splat(7.11544750618563894466e1));
  q = _mm256_fmadd_pd(q, f, splat(2.31251620126765340583e1));

  __m256d y = _mm256_mul_pd(_mm256_mul_pd(f, z), _mm256_div_pd(p, q));
  y = _mm256_fnmadd_pd(e, splat(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(z, splat(0.5), y);

  __m256d r = _mm256_add_pd(f, y);
  r = _mm256_fmadd_pd(e, splat(0.693359375), r);

  // Specials: log(0) = -inf, log(x<0) = NaN, log(inf) = inf, NaN propagates.
  const __m256d zero = _mm256_cmp_pd(x_in, _mm256_setzero_pd(), _CMP_EQ_OQ);
  const __m256d neg = _mm256_cmp_pd(x_in, _mm256_setzero_pd(), _CMP_LT_OQ);
  const __m256d isnan = _mm256_cmp_pd(x_in, x_in, _CMP_UNORD_Q);
  const __m256d isinf = _mm256_cmp_pd(x_in, splat(HUGE_VAL), _CMP_EQ_OQ);
  r = _mm256_blendv_pd(r, splat(-HUGE_VAL), zero);
  r = _mm256_blendv_pd(r, splat(std::nan("")), neg);
  r = _mm256_blendv_pd(r, splat(HUGE_VAL), isinf);
  r = _mm256_blendv_pd(r, x_in, isnan);
  return r;
}

}  // namespace

void vexp(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, exp_core(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::exp(x[i]);
}

void vlog(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, log_core(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::log(x[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) acc += x[i];
  return acc;
}

void sqdist1(const double* a, std::size_t na, const double* b, std::size_t nb,
             double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d ai = _mm256_set1_pd(a[i]);
    double* row = out + i * nb;
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      const __m256d d = _mm256_sub_pd(ai, _mm256_loadu_pd(b + j));
      _mm256_storeu_pd(row + j, _mm256_mul_pd(d, d));
    }
    for (; j < nb; ++j) {
      const double d = a[i] - b[j];
      row[j] = d * d;
    }
  }
}

void sqdist2(const double* ax, const double* ay, std::size_t na,
             const double* bx, const double* by, std::size_t nb, double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const __m256d xi = _mm256_set1_pd(ax[i]);
    const __m256d yi = _mm256_set1_pd(ay[i]);
    double* row = out + i * nb;
    std::size_t j = 0;
    for (; j + 4 <= nb; j += 4) {
      const __m256d dx = _mm256_sub_pd(xi, _mm256_loadu_pd(bx + j));
      const __m256d dy = _mm256_sub_pd(yi, _mm256_loadu_pd(by + j));
      _mm256_storeu_pd(row + j,
                       _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
    }
    for (; j < nb; ++j) {
      const double dx = ax[i] - bx[j];
      const double dy = ay[i] - by[j];
      row[j] = dx * dx + dy * dy;
    }
  }
}

void rbf(const double* d2, double* k, std::size_t n, double neg_inv_2h2) {
  const __m256d c = _mm256_set1_pd(neg_inv_2h2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(k + i, exp_core(_mm256_mul_pd(c, _mm256_loadu_pd(d2 + i))));
  for (; i < n; ++i) k[i] = std::exp(neg_inv_2h2 * d2[i]);
}

}  // namespace avx2

const Kernels* avx2_table_impl() {
  static const Kernels table = {
      "avx2",        avx2::vexp,    avx2::vlog, avx2::dot,
      avx2::sum,     avx2::sqdist1, avx2::sqdist2,
      avx2::rbf,
  };
  return &table;
}

}  // namespace bregmn::simd

#else

namespace bregmn::simd {
const Kernels* avx2_table_impl() { return nullptr; }
}  // namespace bregmn::simd

#endif
