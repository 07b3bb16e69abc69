#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"

#include "bregmn/geometry.hpp"

using bregmn::Measure;

namespace {

Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("geometry: bures distance on known pairs") {
  const Measure a = Measure::gaussian_iso(vec1(0.0), 1.0);
  CHECK(bregmn::w2_gaussian(a, a) == doctest::Approx(0.0).epsilon(1e-12));

  const Measure b = Measure::gaussian_iso(vec1(3.0), 1.0);
  CHECK(bregmn::w2_gaussian(a, b) == doctest::Approx(3.0).epsilon(1e-12));

  // same mean, variances 1 and 4: W2 = |1 - 2| = 1
  const Measure c = Measure::gaussian_iso(vec1(0.0), 4.0);
  CHECK(bregmn::w2_gaussian(a, c) == doctest::Approx(1.0).epsilon(1e-12));

  // 2d anisotropic, diagonal: sqrt(sum (sqrt(s1) - sqrt(s2))^2) + mean shift
  Eigen::MatrixXd s1(2, 2), s2(2, 2);
  s1 << 1.0, 0.0, 0.0, 4.0;
  s2 << 9.0, 0.0, 0.0, 1.0;
  const Measure d = Measure::gaussian(vec2(0, 0), s1);
  const Measure e = Measure::gaussian(vec2(1, -1), s2);
  const double want = std::sqrt(1.0 + 1.0 + (1.0 - 3.0) * (1.0 - 3.0) +
                                (2.0 - 1.0) * (2.0 - 1.0));
  CHECK(bregmn::w2_gaussian(d, e) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("geometry: empirical 1d W2") {
  Eigen::VectorXd a(4), b(4);
  a << 0.0, 1.0, 2.0, 3.0;
  b << 2.0, 3.0, 4.0, 5.0;  // a shifted by 2
  CHECK(bregmn::w2_empirical_1d(a, a) == 0.0);
  CHECK(bregmn::w2_empirical_1d(a, b) == doctest::Approx(2.0).epsilon(1e-12));

  // large-sample gaussian shift: W2(N(0,1), N(3,1)) = 3
  bregmn::Rng rng = bregmn::make_rng(12, {1});
  const Eigen::MatrixXd xa =
      Measure::gaussian_iso(vec1(0.0), 1.0).sample(20000, rng);
  const Eigen::MatrixXd xb =
      Measure::gaussian_iso(vec1(3.0), 1.0).sample(20000, rng);
  CHECK(bregmn::w2_empirical_1d(xa.col(0), xb.col(0)) ==
        doctest::Approx(3.0).epsilon(0.02));

  // unequal counts against the same law stay close to zero
  const Eigen::MatrixXd xc =
      Measure::gaussian_iso(vec1(0.0), 1.0).sample(13000, rng);
  CHECK(bregmn::w2_empirical_1d(xa.col(0), xc.col(0)) < 0.05);
}

TEST_CASE("geometry: gaussian entropy closed form") {
  const Measure a = Measure::gaussian_iso(vec1(0.0), 1.0);
  CHECK(bregmn::entropy_gaussian(a) == doctest::Approx(1.4189385).epsilon(1e-6));

  // translation invariance
  const Measure b = Measure::gaussian_iso(vec1(42.0), 1.0);
  CHECK(bregmn::entropy_gaussian(b) ==
        doctest::Approx(bregmn::entropy_gaussian(a)).epsilon(1e-12));

  // variance e^2 adds exactly 1 nat
  const Measure c = Measure::gaussian_iso(vec1(0.0), std::exp(2.0));
  CHECK(bregmn::entropy_gaussian(c) - bregmn::entropy_gaussian(a) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("geometry: the smoothness bound holds with slack for P = Q") {
  const Measure p = Measure::gaussian_iso(vec1(0.3), 1.3);
  bregmn::Rng rng = bregmn::make_rng(12, {2});
  const auto rep = bregmn::verify_prop1(p, p, 0.5, 20000, rng);
  CHECK_FALSE(rep.violated);
  CHECK(rep.lhs < 1e-10);
  CHECK(rep.w2 < 1e-10);
}

TEST_CASE("geometry: unit-shift gaussians satisfy the bound") {
  const Measure p = Measure::gaussian_iso(vec1(0.0), 1.0);
  const Measure q = Measure::gaussian_iso(vec1(1.0), 1.0);
  bregmn::Rng rng = bregmn::make_rng(12, {3});
  const auto rep = bregmn::verify_prop1(p, q, 0.5, 20000, rng);
  CHECK_FALSE(rep.violated);
  CHECK(rep.slack >= 0.0);
  CHECK(rep.w2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.rhs == doctest::Approx(rep.c * rep.w2 + rep.entropy_gap)
                       .epsilon(1e-12));
  CHECK(rep.sigma2 == 0.5);
}

TEST_CASE("geometry: bound holds across a parameter sweep") {
  bregmn::Rng rng = bregmn::make_rng(12, {4});
  const double means[] = {0.0, 0.5, 1.5};
  const double vars[] = {0.5, 1.0};
  for (double m : means)
    for (double v : vars)
      for (double s2 : {0.25, 1.0}) {
        const Measure p = Measure::gaussian_iso(vec1(0.0), 1.0);
        const Measure q = Measure::gaussian_iso(vec1(m), v);
        const auto rep = bregmn::verify_prop1(p, q, s2, 20000, rng);
        INFO("mean ", m, " var ", v, " sigma2 ", s2);
        CHECK_FALSE(rep.violated);
      }
}

TEST_CASE("geometry: c scales exactly as 1 / sigma2") {
  const Measure p = Measure::gaussian_iso(vec1(0.0), 1.0);
  const Measure q = Measure::gaussian_iso(vec1(2.0), 1.5);
  // identical rng state per call so E|U|, E|V| match exactly
  bregmn::Rng r1 = bregmn::make_rng(12, {5});
  bregmn::Rng r2 = bregmn::make_rng(12, {5});
  const auto a = bregmn::verify_prop1(p, q, 0.25, 10000, r1);
  const auto b = bregmn::verify_prop1(p, q, 1.0, 10000, r2);
  CHECK(a.c * 0.25 == doctest::Approx(b.c * 1.0).epsilon(1e-12));
}

TEST_CASE("geometry: lhs is symmetric under swapping P and Q") {
  const Measure p = Measure::gaussian_iso(vec1(0.0), 1.0);
  const Measure q = Measure::gaussian_iso(vec1(1.0), 2.0);
  bregmn::Rng r1 = bregmn::make_rng(12, {6});
  bregmn::Rng r2 = bregmn::make_rng(12, {6});
  const auto a = bregmn::verify_prop1(p, q, 0.5, 10000, r1);
  const auto b = bregmn::verify_prop1(q, p, 0.5, 10000, r2);
  CHECK(a.lhs == doctest::Approx(b.lhs).epsilon(1e-9));
  CHECK(a.w2 == doctest::Approx(b.w2).epsilon(1e-12));
}

TEST_CASE("geometry: 2d case runs through the Monte Carlo path") {
  Eigen::MatrixXd s1(2, 2), s2(2, 2);
  s1 << 1.0, 0.2, 0.2, 1.0;
  s2 << 1.5, 0.0, 0.0, 0.8;
  const Measure p = Measure::gaussian(vec2(0, 0), s1);
  const Measure q = Measure::gaussian(vec2(1, 0.5), s2);
  bregmn::Rng rng = bregmn::make_rng(12, {7});
  const auto rep = bregmn::verify_prop1(p, q, 0.5, 60000, rng);
  CHECK(rep.lhs_se > 0.0);
  CHECK_FALSE(rep.violated);
}
