#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"

#include "bregmn/convex.hpp"

using bregmn::ConvexGenerator;

TEST_CASE("convex: the four generators are registered and f(1) = 0") {
  const auto names = ConvexGenerator::names();
  REQUIRE(names.size() == 4);
  for (const auto& n : {"tlogt", "neglog", "square", "js"}) {
    const ConvexGenerator& f = ConvexGenerator::by_name(n);
    CHECK(std::abs(f.f(1.0)) < 1e-12);
  }
  CHECK_THROWS(ConvexGenerator::by_name("hellinger"));
}

TEST_CASE("convex: known values") {
  const auto& tlogt = ConvexGenerator::by_name("tlogt");
  CHECK(tlogt.f(std::numbers::e) == doctest::Approx(std::numbers::e).epsilon(1e-14));
  CHECK(tlogt.f(0.0) == 0.0);  // continuous extension t log t -> 0

  const auto& neglog = ConvexGenerator::by_name("neglog");
  CHECK(neglog.f(std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-14));

  const auto& square = ConvexGenerator::by_name("square");
  CHECK(square.f(3.0) == doctest::Approx(4.0));
  CHECK(square.d2f(17.0) == 2.0);

  const auto& js = ConvexGenerator::by_name("js");
  // t -> 0+: f_js -> -1 * log(1/2) = log 2
  CHECK(js.f(1e-15) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("convex: derivatives match finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  const double h = 1e-5;
  for (const auto& name : ConvexGenerator::names()) {
    const ConvexGenerator& f = ConvexGenerator::by_name(name);
    for (int i = 0; i < 50; ++i) {
      const double t = u(rng);
      const double fd1 = (f.f(t + h) - f.f(t - h)) / (2 * h);
      const double fd2 = (f.df(t + h) - f.df(t - h)) / (2 * h);
      CHECK(f.df(t) == doctest::Approx(fd1).epsilon(1e-6));
      CHECK(f.d2f(t) == doctest::Approx(fd2).epsilon(1e-6));
    }
  }
}

TEST_CASE("convex: midpoint convexity on random triples") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(1e-3, 50.0);
  for (const auto& name : ConvexGenerator::names()) {
    const ConvexGenerator& f = ConvexGenerator::by_name(name);
    for (int i = 0; i < 200; ++i) {
      const double a = u(rng), b = u(rng);
      CHECK(f.f(0.5 * (a + b)) <= 0.5 * (f.f(a) + f.f(b)) + 1e-12);
      CHECK(f.d2f(a) >= 0.0);
    }
  }
}

TEST_CASE("convex: batch forms agree with scalar forms") {
  std::vector<double> t;
  for (double v = 1e-6; v < 1e6; v *= 3.7) t.push_back(v);
  std::vector<double> out(t.size()), dout(t.size());
  for (const auto& name : ConvexGenerator::names()) {
    const ConvexGenerator& f = ConvexGenerator::by_name(name);
    f.f_batch(t.data(), out.data(), t.size());
    f.df_batch(t.data(), dout.data(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(out[i] == doctest::Approx(f.f(t[i])).epsilon(1e-12));
      CHECK(dout[i] == doctest::Approx(f.df(t[i])).epsilon(1e-12));
    }
  }
}
