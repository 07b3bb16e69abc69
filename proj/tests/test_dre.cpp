#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "bregmn/dre.hpp"
#include "bregmn/measure.hpp"

using bregmn::KernelSpec;
using bregmn::Measure;
using bregmn::RatioModel;
using bregmn::Rng;

namespace {

Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }

Eigen::MatrixXd gauss_sample(double mean, double var, int n, Rng& rng) {
  return Measure::gaussian_iso(vec1(mean), var).sample(n, rng);
}

}  // namespace

TEST_CASE("dre: median heuristic is the scaled median pairwise distance") {
  // two points at distance 2: the only pairwise distance is 2
  Eigen::MatrixXd a(1, 1), b(1, 1);
  a << 0.0;
  b << 2.0;
  CHECK(bregmn::median_heuristic(a, b) ==
        doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-12));

  // scale equivariance on a bigger cloud
  Rng rng = bregmn::make_rng(5, {1});
  const Eigen::MatrixXd x = gauss_sample(0.0, 1.0, 300, rng);
  const double h1 = bregmn::median_heuristic(x, x);
  const double h2 = bregmn::median_heuristic(3.0 * x, 3.0 * x);
  CHECK(h2 == doctest::Approx(3.0 * h1).epsilon(1e-10));
}

TEST_CASE("dre: identical tables fit a ratio near one") {
  Rng rng = bregmn::make_rng(5, {2});
  const Eigen::MatrixXd x = gauss_sample(0.0, 1.0, 400, rng);
  const RatioModel r = bregmn::fit_mmd_ratio(x, x, KernelSpec{});
  CHECK(r.values_at_support().mean() == doctest::Approx(1.0).epsilon(0.05));

  const Eigen::MatrixXd held = gauss_sample(0.0, 1.0, 400, rng);
  CHECK(r.eval_batch(held).mean() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("dre: two-point system matches the hand solve") {
  // one numerator point at 0, two denominator points at 0 and 10, rbf h = 1
  Eigen::MatrixXd xp(1, 1), xq(2, 1);
  xp << 0.0;
  xq << 0.0, 10.0;
  KernelSpec k;
  k.bandwidth = 1.0;
  k.lambda = 0.1;

  // K_qq = [[1, e^-50], [e^-50, 1]], K_qp 1/n_p = [1, e^-50]
  // lambda_eff = 0.1 * trace(K_qq) / n_q = 0.1
  const double e = std::exp(-50.0);
  Eigen::Matrix2d A;
  A << 1.0 + 0.1, e, e, 1.0 + 0.1;
  Eigen::Vector2d rhs(1.0, e);
  const Eigen::Vector2d w = A.colPivHouseholderQr().solve(rhs);

  const RatioModel r = bregmn::fit_mmd_ratio(xp, xq, k);
  REQUIRE(r.values_at_support().size() == 2);
  CHECK(r.values_at_support()[0] == doctest::Approx(2.0 * w[0]).epsilon(1e-10));
  CHECK(r.values_at_support()[1] == doctest::Approx(2.0 * w[1]).epsilon(1e-10));

  // evaluation at a support point reproduces (a kernel-weighted blend of) v
  CHECK(r(vec1(0.0)) == doctest::Approx(2.0 * w[0]).epsilon(1e-10));
}

TEST_CASE("dre: mmd fit recovers a gaussian log ratio") {
  Rng rng = bregmn::make_rng(5, {3});
  const Eigen::MatrixXd xp = gauss_sample(0.5, 1.0, 4000, rng);
  const Eigen::MatrixXd xq = gauss_sample(0.0, 1.0, 4000, rng);
  const RatioModel r = bregmn::fit_mmd_ratio(xp, xq, KernelSpec{});

  // analytic log ratio: log p - log q = 0.5 * (2 x * 0.5 - 0.25) = 0.5 x - 0.125
  double mse = 0.0;
  int n = 0;
  for (double x = -1.5; x <= 2.0; x += 0.05, ++n) {
    const double got = std::log(r(vec1(x)));
    const double want = 0.5 * x - 0.125;
    mse += (got - want) * (got - want);
  }
  mse /= n;
  CHECK(mse < 0.1);
}

TEST_CASE("dre: ridge strength shrinks the fitted values") {
  Rng rng = bregmn::make_rng(5, {4});
  const Eigen::MatrixXd xp = gauss_sample(1.0, 1.0, 300, rng);
  const Eigen::MatrixXd xq = gauss_sample(0.0, 1.0, 300, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2}) {
    KernelSpec k;
    k.lambda = lam;
    const RatioModel r = bregmn::fit_mmd_ratio(xp, xq, k);
    const double norm = r.values_at_support().norm();
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("dre: zero ridge on a singular system reports the fix") {
  Eigen::MatrixXd xp(2, 1), xq(2, 1);
  xp << 0.0, 0.0;
  xq << 1.0, 1.0;  // duplicate rows make K_qq exactly singular
  KernelSpec k;
  k.lambda = 0.0;
  CHECK_THROWS_WITH_AS(bregmn::fit_mmd_ratio(xp, xq, k),
                       doctest::Contains("lambda"), std::runtime_error);
  k.lambda = -1.0;
  CHECK_THROWS(bregmn::fit_mmd_ratio(xp, xq, k));
}

TEST_CASE("dre: pair fit equals two single fits on a shared denominator") {
  Rng rng = bregmn::make_rng(5, {5});
  const Eigen::MatrixXd xa = gauss_sample(0.3, 1.0, 200, rng);
  const Eigen::MatrixXd xb = gauss_sample(-0.3, 1.0, 200, rng);
  const Eigen::MatrixXd xm = gauss_sample(0.0, 1.5, 200, rng);
  KernelSpec k;
  k.bandwidth = 1.0;
  const auto [ra, rb] = bregmn::fit_mmd_ratio_pair(xa, xb, xm, k);
  const RatioModel sa = bregmn::fit_mmd_ratio(xa, xm, k);
  const RatioModel sb = bregmn::fit_mmd_ratio(xb, xm, k);
  CHECK((ra.values_at_support() - sa.values_at_support()).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK((rb.values_at_support() - sb.values_at_support()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("dre: outputs respect the model clamps on disjoint supports") {
  Rng rng = bregmn::make_rng(5, {6});
  const Eigen::MatrixXd xp = gauss_sample(0.0, 0.01, 200, rng);
  const Eigen::MatrixXd xq = gauss_sample(30.0, 0.01, 200, rng);
  KernelSpec k;
  k.bandwidth = 0.5;
  const RatioModel r = bregmn::fit_mmd_ratio(xp, xq, k);
  // far from everything: the evaluation falls back to the nearest support
  CHECK(r(vec1(30.0)) >= bregmn::kRatioModelFloor);
  CHECK(r(vec1(30.0)) <= 1e-3);  // essentially zero numerator mass there
  CHECK(r(vec1(-500.0)) >= bregmn::kRatioModelFloor);
  CHECK(std::isfinite(r(vec1(1e6))));
}

TEST_CASE("dre: discriminator logit recovers the bayes slope") {
  Rng rng = bregmn::make_rng(5, {7});
  const Eigen::MatrixXd xp = gauss_sample(1.0, 1.0, 1500, rng);
  const Eigen::MatrixXd xq = gauss_sample(-1.0, 1.0, 1500, rng);
  bregmn::DiscriminatorOptions opt;
  opt.widths = {8};
  opt.steps = 3000;
  opt.lr = 0.2;
  Rng init = bregmn::make_rng(5, {8});
  const RatioModel r = bregmn::fit_discriminator_ratio(xp, xq, opt, init);

  // log r(x) = 2x for these gaussians; check the slope over the bulk
  const double slope =
      (std::log(r(vec1(0.75))) - std::log(r(vec1(-0.75)))) / 1.5;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("dre: discriminator and mmd log ratios agree where both are sane") {
  Rng rng = bregmn::make_rng(5, {9});
  const Eigen::MatrixXd xp = gauss_sample(0.5, 1.0, 1200, rng);
  const Eigen::MatrixXd xq = gauss_sample(-0.5, 1.0, 1200, rng);
  const RatioModel rm = bregmn::fit_mmd_ratio(xp, xq, KernelSpec{});
  bregmn::DiscriminatorOptions opt;
  opt.steps = 2500;
  opt.lr = 0.2;
  Rng init = bregmn::make_rng(5, {10});
  const RatioModel rd = bregmn::fit_discriminator_ratio(xp, xq, opt, init);

  std::vector<double> lm, ld;
  for (double x = -1.0; x <= 1.0; x += 0.05) {
    lm.push_back(std::log(rm(vec1(x))));
    ld.push_back(std::log(rd(vec1(x))));
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double t : v) s += t;
    return s / static_cast<double>(v.size());
  };
  const double ma = mean(lm), mb = mean(ld);
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < lm.size(); ++i) {
    num += (lm[i] - ma) * (ld[i] - mb);
    va += (lm[i] - ma) * (lm[i] - ma);
    vb += (ld[i] - mb) * (ld[i] - mb);
  }
  CHECK(num / std::sqrt(va * vb) > 0.9);
}

TEST_CASE("dre: mmd2 of a distribution against itself is near zero") {
  Rng rng = bregmn::make_rng(5, {11});
  const Eigen::MatrixXd a = gauss_sample(0.0, 1.0, 1000, rng);
  const Eigen::MatrixXd b = gauss_sample(0.0, 1.0, 1000, rng);
  const Eigen::MatrixXd c = gauss_sample(3.0, 1.0, 1000, rng);
  CHECK(bregmn::mmd2_biased(a, b) < 0.01);
  CHECK(bregmn::mmd2_biased(a, c) > 0.1);
}
