#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "projcalc/random.hpp"
#include "projcalc/space.hpp"

namespace projcalc::testing {

inline const std::vector<double> kExponents{1.5, 2.0, 3.0, 4.0};

// Weights in [0.5, 2] or all ones.
inline Space random_space(Rng& rng, Index n, double p, bool weighted = true) {
  Vec w = Vec::Ones(n);
  if (weighted)
    for (Index i = 0; i < n; ++i) w[i] = uniform(rng, 0.5, 2.0);
  return Space(p, w);
}

inline Primal random_primal(Rng& rng, Index n, double scale = 1.0) {
  return scale * gaussian_point<PrimalTag>(rng, n);
}

inline Dual random_dual(Rng& rng, Index n, double scale = 1.0) {
  return scale * gaussian_point<DualTag>(rng, n);
}

// Independent weighted p-sum, written out directly.
inline double brute_norm(const Vec& x, const Vec& w, double p) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += w[i] * std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace projcalc::testing
