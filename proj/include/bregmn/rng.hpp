#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bregmn {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent substreams from one
/// master seed. Deterministic across platforms.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> tags) {
  std::uint64_t s = mix64(base);
  for (std::uint64_t t : tags) s = mix64(s ^ t);
  return s;
}

/// Substream factory: identical (base, tags) always yields an identical
/// stream, which is what the common-random-number gradient estimates rely on.
inline Rng make_rng(std::uint64_t base,
                    std::initializer_list<std::uint64_t> tags = {}) {
  return Rng(derive_seed(base, tags));
}

// Stream purposes used by the training pipeline. Kept in one place so the
// finite-difference evaluations at perturbed parameters reuse draws exactly.
namespace stream {
inline constexpr std::uint64_t kData = 1;
inline constexpr std::uint64_t kGenNoise = 2;
inline constexpr std::uint64_t kBaseBranch = 3;
inline constexpr std::uint64_t kBaseNoise = 4;
inline constexpr std::uint64_t kDreInit = 5;
inline constexpr std::uint64_t kInit = 6;
inline constexpr std::uint64_t kEval = 7;
}  // namespace stream

}  // namespace bregmn
