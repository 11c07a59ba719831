// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace ccopf {

/// splitmix64: counter-based, stateless. One output per (seed, counter) pair.
inline std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + counter * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Uniform draw in the open interval (0, 1).
inline double uniform_open01(std::uint64_t seed, std::uint64_t counter) {
  // 53-bit mantissa, offset by half a ulp so 0 and 1 are excluded.
  const std::uint64_t bits = splitmix64(seed, counter) >> 11;
  return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
}

/// Standard normal draw via the inverse CDF; fully deterministic and
/// platform-independent (unlike std::normal_distribution).
double normal_draw(std::uint64_t seed, std::uint64_t counter);

}  // namespace ccopf
