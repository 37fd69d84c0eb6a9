#pragma once

#include <cstdint>
#include <random>

#include "growthbound/common.hpp"

namespace growthbound {

/// splitmix64 step; used to derive independent per-shard seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) with 53 random bits; independent of the standard
/// library's distribution implementation so streams are portable.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform point in the k-ball B(c, r).
Point uniform_in_ball(Rng& rng, const Point& c, double r, int k);

/// Standard normal via Box-Muller on uniform01.
double standard_normal(Rng& rng);

}  // namespace growthbound
