#pragma once
/*
 * Deterministic seeded randomness.  Campaign-level seeds are split into
 * per-instance seeds with splitmix64 so that instance i's stream does not
 * depend on how many instances ran before it.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "twistdisc/types.hpp"

namespace twistdisc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; avoids std::normal_distribution so streams are reproducible
// across standard library implementations.
inline double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// Complex-Gaussian unit vector (Haar-uniform on the sphere).
inline PureState random_unit_state(std::size_t dim, std::mt19937_64& rng) {
  std::vector<cd> amps(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& a : amps) {
      a = cd{gaussian(rng), gaussian(rng)};
      norm2 += std::norm(a);
    }
  } while (norm2 < 1e-12);
  return normalized_state(std::move(amps));
}

}  // namespace twistdisc
