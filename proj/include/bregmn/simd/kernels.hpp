#pragma once

#include <cstddef>
#include <string_view>

namespace bregmn::simd {

/// Function table for the hot numeric loops. Every backend implements the
/// same semantics; vectorized variants must agree with the scalar reference
/// within a few ulp (see tests/test_kernels.cpp for the pinned tolerances).
struct Kernels {
  const char* name;

  /// y[i] = exp(x[i]); overflow -> inf, underflow -> 0, NaN propagates.
  void (*vexp)(const double* x, double* y, std::size_t n);

  /// y[i] = log(x[i]); x == 0 -> -inf, x < 0 -> NaN, subnormals supported.
  void (*vlog)(const double* x, double* y, std::size_t n);

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);

  /// out[i*nb + j] = (a[i] - b[j])^2
  void (*sqdist1)(const double* a, std::size_t na, const double* b,
                  std::size_t nb, double* out);

  /// out[i*nb + j] = (ax[i]-bx[j])^2 + (ay[i]-by[j])^2
  void (*sqdist2)(const double* ax, const double* ay, std::size_t na,
                  const double* bx, const double* by, std::size_t nb,
                  double* out);

  /// k[i] = exp(neg_inv_2h2 * d2[i]); callers pass -1/(2 h^2).
  void (*rbf)(const double* d2, double* k, std::size_t n, double neg_inv_2h2);
};

/// Table selected at startup: AVX2+FMA when the CPU supports it, scalar
/// otherwise. BREGMN_SIMD=scalar|avx2 overrides the choice.
const Kernels& active();

const Kernels& scalar_table();

/// AVX2 table, or nullptr when the host cannot run it.
const Kernels* avx2_table();

/// Force a backend by name. Returns false (and leaves the active table
/// unchanged) when the backend is unknown or unsupported on this host.
bool force_backend(std::string_view name);

}  // namespace bregmn::simd
