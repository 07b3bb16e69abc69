#include "bregmn/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace bregmn::simd {

const Kernels* avx2_table_impl();  // kernels_avx2.cpp; null off x86

namespace {

bool host_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Kernels* select_default() {
  if (const char* env = std::getenv("BREGMN_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2" && host_has_avx2() && avx2_table_impl())
      return avx2_table_impl();
    // Unknown or unsupported request: fall through to auto-detection.
  }
  if (host_has_avx2() && avx2_table_impl()) return avx2_table_impl();
  return &scalar_table();
}

const Kernels*& active_slot() {
  static const Kernels* current = select_default();
  return current;
}

}  // namespace

const Kernels& active() { return *active_slot(); }

const Kernels* avx2_table() {
  return host_has_avx2() ? avx2_table_impl() : nullptr;
}

bool force_backend(std::string_view name) {
  if (name == "scalar") {
    active_slot() = &scalar_table();
    return true;
  }
  if (name == "avx2") {
    if (const Kernels* t = avx2_table()) {
      active_slot() = t;
      return true;
    }
    return false;
  }
  return false;
}

}  // namespace bregmn::simd
