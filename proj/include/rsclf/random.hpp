#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rsclf {

// Standard distributions are implementation-defined, so everything seeded in
// this library draws through these helpers on top of mt19937_64, whose output
// sequence is fixed by the standard.
using Rng = std::mt19937_64;

// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = Rng::max() - (Rng::max() % n + 1) % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r > limit);
  return r % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace rsclf
