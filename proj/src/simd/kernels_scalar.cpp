#include "bregmn/simd/kernels.hpp"

#include <cmath>

// Reference implementations. Plain loops over libm; the vector backends are
// validated against these.

namespace bregmn::simd {
namespace scalar {

void vexp(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
}

void vlog(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::log(x[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void sqdist1(const double* a, std::size_t na, const double* b, std::size_t nb,
             double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = a[i];
    double* row = out + i * nb;
    for (std::size_t j = 0; j < nb; ++j) {
      const double d = ai - b[j];
      row[j] = d * d;
    }
  }
}

void sqdist2(const double* ax, const double* ay, std::size_t na,
             const double* bx, const double* by, std::size_t nb, double* out) {
  for (std::size_t i = 0; i < na; ++i) {
    const double xi = ax[i], yi = ay[i];
    double* row = out + i * nb;
    for (std::size_t j = 0; j < nb; ++j) {
      const double dx = xi - bx[j];
      const double dy = yi - by[j];
      row[j] = dx * dx + dy * dy;
    }
  }
}

void rbf(const double* d2, double* k, std::size_t n, double neg_inv_2h2) {
  for (std::size_t i = 0; i < n; ++i) k[i] = std::exp(neg_inv_2h2 * d2[i]);
}

}  // namespace scalar

const Kernels& scalar_table() {
  static const Kernels table = {
      "scalar",        scalar::vexp,    scalar::vlog, scalar::dot,
      scalar::sum,     scalar::sqdist1, scalar::sqdist2,
      scalar::rbf,
  };
  return table;
}

}  // namespace bregmn::simd
