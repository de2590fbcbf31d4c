#pragma once

// Seeded randomness. std::mt19937_64 output is fully specified by the
// standard; the distributions below are hand-written so draws are identical
// across standard libraries.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ffvc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed for a fixed path of stream ids below a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

/// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace ffvc
