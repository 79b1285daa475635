#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "projcalc/point.hpp"

namespace projcalc {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent substreams from a base
// seed and a tuple of indices.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t k : path) s = mix64(s ^ mix64(k + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(seed, path));
}

inline Vec gaussian_vec(Rng& rng, Index n) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

template <class Tag>
Point<Tag> gaussian_point(Rng& rng, Index n) {
  return Point<Tag>(gaussian_vec(rng, n));
}

}  // namespace projcalc
