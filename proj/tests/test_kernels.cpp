#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"

#include "bregmn/simd/kernels.hpp"

using bregmn::simd::Kernels;

namespace {

std::int64_t ulp_diff(double a, double b) {
  if (a == b) return 0;
  if (std::isnan(a) && std::isnan(b)) return 0;
  if (!std::isfinite(a) || !std::isfinite(b))
    return std::numeric_limits<std::int64_t>::max();
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, 8);
  std::memcpy(&ib, &b, 8);
  if (ia < 0) ia = std::numeric_limits<std::int64_t>::min() - ia;
  if (ib < 0) ib = std::numeric_limits<std::int64_t>::min() - ib;
  return std::abs(ia - ib);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace

TEST_CASE("kernels: vexp matches libm within 4 ulp across the finite range") {
  const Kernels& s = bregmn::simd::scalar_table();
  const Kernels* v = bregmn::simd::avx2_table();

  std::vector<double> x = linspace(-745.0, 709.0, 20001);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 4000; ++i) x.push_back(u(rng));

  std::vector<double> ys(x.size()), yv(x.size());
  s.vexp(x.data(), ys.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(ulp_diff(ys[i], std::exp(x[i])) <= 1);

  if (v) {
    v->vexp(x.data(), yv.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      INFO("x = ", x[i]);
      CHECK(ulp_diff(ys[i], yv[i]) <= 4);
    }
  }
}

TEST_CASE("kernels: vexp edge cases (overflow, underflow, specials)") {
  const double inf = std::numeric_limits<double>::infinity();
  const double x[] = {800.0,  710.0, -746.0, -800.0, -1000.0, 0.0,
                      -0.0,   inf,   -inf,   std::nan(""),
                      709.78, -745.1};
  const std::size_t n = sizeof(x) / sizeof(x[0]);
  for (const Kernels* k : {&bregmn::simd::scalar_table(),
                           bregmn::simd::avx2_table()}) {
    if (!k) continue;
    double y[n];
    k->vexp(x, y, n);
    CHECK(y[0] == inf);
    CHECK(y[1] == inf);
    CHECK(y[2] == 0.0);
    CHECK(y[3] == 0.0);
    CHECK(y[4] == 0.0);
    CHECK(y[5] == 1.0);
    CHECK(y[6] == 1.0);
    CHECK(y[7] == inf);
    CHECK(y[8] == 0.0);
    CHECK(std::isnan(y[9]));
    CHECK(std::isfinite(y[10]));   // just below the overflow threshold
    CHECK(y[11] >= 0.0);           // subnormal or zero, never negative
  }
}

TEST_CASE("kernels: vlog matches libm within 4 ulp, including subnormals") {
  const Kernels& s = bregmn::simd::scalar_table();
  const Kernels* v = bregmn::simd::avx2_table();

  std::vector<double> x;
  for (double e = -300; e <= 300; e += 0.25) x.push_back(std::pow(10.0, e));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(1e-12, 1e12);
  for (int i = 0; i < 4000; ++i) x.push_back(u(rng));
  x.push_back(5e-324);  // smallest subnormal
  x.push_back(2.2250738585072014e-308);
  x.push_back(1.0);
  x.push_back(std::numeric_limits<double>::max());

  std::vector<double> ys(x.size()), yv(x.size());
  s.vlog(x.data(), ys.data(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(ulp_diff(ys[i], std::log(x[i])) <= 1);

  if (v) {
    v->vlog(x.data(), yv.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      INFO("x = ", x[i]);
      CHECK(ulp_diff(ys[i], yv[i]) <= 4);
    }
  }
}

TEST_CASE("kernels: vlog specials") {
  const double inf = std::numeric_limits<double>::infinity();
  const double x[] = {0.0, -0.0, -1.0, inf, std::nan("")};
  for (const Kernels* k : {&bregmn::simd::scalar_table(),
                           bregmn::simd::avx2_table()}) {
    if (!k) continue;
    double y[5];
    k->vlog(x, y, 5);
    CHECK(y[0] == -inf);
    CHECK(y[1] == -inf);
    CHECK(std::isnan(y[2]));
    CHECK(y[3] == inf);
    CHECK(std::isnan(y[4]));
  }
}

TEST_CASE("kernels: dot and sum agree across backends") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t n : {std::size_t(1), std::size_t(3), std::size_t(4),
                        std::size_t(7), std::size_t(1000),
                        std::size_t(1003)}) {
    std::vector<double> a(n), b(n);
    for (auto& t : a) t = g(rng);
    for (auto& t : b) t = g(rng);

    const double ds = bregmn::simd::scalar_table().dot(a.data(), b.data(), n);
    const double ss = bregmn::simd::scalar_table().sum(a.data(), n);
    double dref = 0, sref = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dref += a[i] * b[i];
      sref += a[i];
    }
    CHECK(ds == doctest::Approx(dref).epsilon(1e-13));
    CHECK(ss == doctest::Approx(sref).epsilon(1e-13));

    if (const Kernels* v = bregmn::simd::avx2_table()) {
      // relative to the vector magnitude, not the (possibly cancelled) result
      double scale = 0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
      CHECK(std::abs(v->dot(a.data(), b.data(), n) - ds) <= 1e-12 * (1 + scale));
      CHECK(std::abs(v->sum(a.data(), n) - ss) <= 1e-12 * (1 + n));
    }
  }
}

TEST_CASE("kernels: squared-distance tables agree across backends") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 2.0);
  const std::size_t na = 13, nb = 17;
  std::vector<double> ax(na), ay(na), bx(nb), by(nb);
  for (auto* v : {&ax, &ay, &bx, &by})
    for (auto& t : *v) t = g(rng);

  std::vector<double> d1s(na * nb), d1v(na * nb), d2s(na * nb), d2v(na * nb);
  const Kernels& s = bregmn::simd::scalar_table();
  s.sqdist1(ax.data(), na, bx.data(), nb, d1s.data());
  s.sqdist2(ax.data(), ay.data(), na, bx.data(), by.data(), nb, d2s.data());

  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      const double e1 = (ax[i] - bx[j]) * (ax[i] - bx[j]);
      const double e2 = e1 + (ay[i] - by[j]) * (ay[i] - by[j]);
      CHECK(d1s[i * nb + j] == doctest::Approx(e1).epsilon(1e-14));
      CHECK(d2s[i * nb + j] == doctest::Approx(e2).epsilon(1e-14));
    }

  if (const Kernels* v = bregmn::simd::avx2_table()) {
    v->sqdist1(ax.data(), na, bx.data(), nb, d1v.data());
    v->sqdist2(ax.data(), ay.data(), na, bx.data(), by.data(), nb, d2v.data());
    for (std::size_t i = 0; i < na * nb; ++i) {
      CHECK(ulp_diff(d1s[i], d1v[i]) <= 2);
      CHECK(ulp_diff(d2s[i], d2v[i]) <= 4);
    }
  }
}

TEST_CASE("kernels: rbf equals exp(-d2/(2 h^2)) on both backends") {
  std::vector<double> d2 = linspace(0.0, 2000.0, 5001);
  const double h = 0.7;
  const double c = -1.0 / (2.0 * h * h);
  std::vector<double> ks(d2.size()), kv(d2.size());

  bregmn::simd::scalar_table().rbf(d2.data(), ks.data(), d2.size(), c);
  for (std::size_t i = 0; i < d2.size(); ++i)
    CHECK(ulp_diff(ks[i], std::exp(c * d2[i])) <= 1);

  if (const Kernels* v = bregmn::simd::avx2_table()) {
    v->rbf(d2.data(), kv.data(), d2.size(), c);
    for (std::size_t i = 0; i < d2.size(); ++i)
      CHECK(ulp_diff(ks[i], kv[i]) <= 4);
  }
}

TEST_CASE("kernels: force_backend switches the active table and rejects junk") {
  const Kernels& before = bregmn::simd::active();

  CHECK(bregmn::simd::force_backend("scalar"));
  CHECK(std::string_view(bregmn::simd::active().name) == "scalar");
  CHECK_FALSE(bregmn::simd::force_backend("sse9"));
  CHECK(std::string_view(bregmn::simd::active().name) == "scalar");

  if (bregmn::simd::avx2_table()) {
    CHECK(bregmn::simd::force_backend("avx2"));
    CHECK(std::string_view(bregmn::simd::active().name) == "avx2");
  } else {
    CHECK_FALSE(bregmn::simd::force_backend("avx2"));
  }

  bregmn::simd::force_backend(before.name);  // restore for other tests
}
