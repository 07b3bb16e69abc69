#include "bregmn/convex.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bregmn/simd/kernels.hpp"

namespace bregmn {

const ConvexGenerator& ConvexGenerator::by_name(std::string_view name) {
  const ConvexGenerator* g = find(name);
  if (!g)
    throw std::invalid_argument("unknown convex generator: " + std::string(name));
  return *g;
}

const std::vector<std::string>& ConvexGenerator::names() {
  static const std::vector<std::string> n = {"tlogt", "neglog", "square", "js"};
  return n;
}

double ConvexGenerator::f(double t) const {
  switch (id_) {
    case Id::TLogT:
      return t > 0 ? t * std::log(t) : 0.0;
    case Id::NegLog:
      return -std::log(t);
    case Id::Square:
      return (t - 1.0) * (t - 1.0);
    case Id::Js:
      return (t > 0 ? t * std::log(t) : 0.0) -
             (t + 1.0) * std::log(0.5 * (t + 1.0));
  }
  return 0.0;
}

double ConvexGenerator::df(double t) const {
  switch (id_) {
    case Id::TLogT:
      return std::log(t) + 1.0;
    case Id::NegLog:
      return -1.0 / t;
    case Id::Square:
      return 2.0 * (t - 1.0);
    case Id::Js:
      return std::log(2.0 * t / (t + 1.0));
  }
  return 0.0;
}

double ConvexGenerator::d2f(double t) const {
  switch (id_) {
    case Id::TLogT:
      return 1.0 / t;
    case Id::NegLog:
      return 1.0 / (t * t);
    case Id::Square:
      return 2.0;
    case Id::Js:
      return 1.0 / (t * (t + 1.0));
  }
  return 0.0;
}

void ConvexGenerator::f_batch(const double* t, double* out, std::size_t n) const {
  const auto& k = simd::active();
  switch (id_) {
    case Id::TLogT: {
      k.vlog(t, out, n);
      for (std::size_t i = 0; i < n; ++i) out[i] *= t[i];
      return;
    }
    case Id::NegLog: {
      k.vlog(t, out, n);
      for (std::size_t i = 0; i < n; ++i) out[i] = -out[i];
      return;
    }
    case Id::Square: {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = t[i] - 1.0;
        out[i] = d * d;
      }
      return;
    }
    case Id::Js: {
      std::vector<double> half(n), lh(n);
      for (std::size_t i = 0; i < n; ++i) half[i] = 0.5 * (t[i] + 1.0);
      k.vlog(t, out, n);
      k.vlog(half.data(), lh.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        out[i] = t[i] * out[i] - (t[i] + 1.0) * lh[i];
      return;
    }
  }
}

void ConvexGenerator::df_batch(const double* t, double* out, std::size_t n) const {
  const auto& k = simd::active();
  switch (id_) {
    case Id::TLogT: {
      k.vlog(t, out, n);
      for (std::size_t i = 0; i < n; ++i) out[i] += 1.0;
      return;
    }
    case Id::NegLog: {
      for (std::size_t i = 0; i < n; ++i) out[i] = -1.0 / t[i];
      return;
    }
    case Id::Square: {
      for (std::size_t i = 0; i < n; ++i) out[i] = 2.0 * (t[i] - 1.0);
      return;
    }
    case Id::Js: {
      std::vector<double> u(n);
      for (std::size_t i = 0; i < n; ++i) u[i] = 2.0 * t[i] / (t[i] + 1.0);
      k.vlog(u.data(), out, n);
      return;
    }
  }
}

const ConvexGenerator* ConvexGenerator::find(std::string_view name) {
  static const ConvexGenerator table[] = {
      ConvexGenerator(Id::TLogT, "tlogt"),
      ConvexGenerator(Id::NegLog, "neglog"),
      ConvexGenerator(Id::Square, "square"),
      ConvexGenerator(Id::Js, "js"),
  };
  for (const ConvexGenerator& g : table)
    if (name == g.name()) return &g;
  return nullptr;
}

}  // namespace bregmn
