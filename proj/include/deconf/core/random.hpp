#pragma once

#include <cstdint>
#include <random>

namespace deconf {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; mixes a base seed with a stream id so that
// independent stages get decorrelated generators from one user seed.
inline std::uint64_t
derive_seed(std::uint64_t seed, std::uint64_t stream)
{
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double
uniform01(Rng& rng)
{
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double
uniform(Rng& rng, double lo, double hi)
{
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double
normal(Rng& rng, double mean, double sd)
{
  return std::normal_distribution<double>(mean, sd)(rng);
}

inline bool
bernoulli(Rng& rng, double p)
{
  return uniform01(rng) < p;
}

// Beta(a, b) from two gamma draws.
inline double
beta(Rng& rng, double a, double b)
{
  double x = std::gamma_distribution<double>(a, 1.0)(rng);
  double y = std::gamma_distribution<double>(b, 1.0)(rng);
  return x / (x + y);
}

} // namespace deconf
