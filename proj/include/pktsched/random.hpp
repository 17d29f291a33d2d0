#pragma once

#include <cstdint>
#include <random>

namespace pktsched {

/// Uniform integer in [0, n) by rejection on raw 64-bit draws. Unlike
/// std::uniform_int_distribution the result is identical on every standard
/// library, which keeps generated instances reproducible from the seed alone.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace pktsched
