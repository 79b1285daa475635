#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "projcalc/coverage.hpp"
#include "projcalc/projections.hpp"
#include "projcalc/random.hpp"

namespace projcalc::harness {

enum class SetKind { Ball, Cylinder, CoordSubspace, PositiveCone };

inline const char* kind_name(SetKind k) {
  switch (k) {
    case SetKind::Ball: return "ball";
    case SetKind::Cylinder: return "cylinder";
    case SetKind::CoordSubspace: return "subspace";
    case SetKind::PositiveCone: return "cone";
  }
  return "?";
}

inline SetKind parse_kind(const std::string& s) {
  if (s == "ball") return SetKind::Ball;
  if (s == "cylinder") return SetKind::Cylinder;
  if (s == "subspace") return SetKind::CoordSubspace;
  if (s == "cone") return SetKind::PositiveCone;
  throw InvalidConfig("unknown set kind '" + s + "'");
}

enum class WeightsMode { Unit, Random };

struct InstanceParams {
  Index n = 8;
  double p = 2.0;
  double r = 1.0;
  double mask_density = 0.5;
  WeightsMode weights = WeightsMode::Unit;
};

struct Instance {
  Space space;
  ConvexSet set;
  Primal xbar;
};

// Random mask with round(density n) indices, at least one.
inline Mask random_mask(Rng& rng, Index n, double density) {
  if (!(density > 0.0 && density <= 1.0)) throw InvalidConfig("mask density must lie in (0, 1]");
  const Index k = std::clamp<Index>(static_cast<Index>(std::lround(density * static_cast<double>(n))), 1, n);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return Mask::from_indices(n, idx);
}

// Rescales the masked part of x so that its norm equals `target`. A second
// pass removes most of the rounding left by the first.
inline Primal scale_masked_to(const Space& space, const Primal& x, const Mask& mask, double target) {
  Primal xm = mask_restrict(x, mask);
  const Primal tail = mask_restrict(x, mask.complement());
  for (int pass = 0; pass < 2; ++pass) xm = (target / space.norm(xm)) * xm;
  return xm + tail;
}

// Deterministic instance for a set kind and point regime. Boundary points
// are built by exact rescaling; cylinder exterior points clear the radius by
// more than 0.1; cone boundary points have at least one zero and at least
// one positive coordinate.
inline Instance gen_instance(SetKind kind, Region regime, std::uint64_t seed, const InstanceParams& prm = {}) {
  coverage::touch(coverage::Op::gen_instance);
  const Index n = prm.n;
  if (n < 2) throw InvalidConfig("instances need dimension >= 2");
  Rng rng = substream(seed, {static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(regime)});

  Vec w = Vec::Ones(n);
  if (prm.weights == WeightsMode::Random)
    for (Index i = 0; i < n; ++i) w[i] = uniform(rng, 0.5, 2.0);
  const Space space(prm.p, w);
  const double r = prm.r;

  Primal g = gaussian_point<PrimalTag>(rng, n);
  switch (kind) {
    case SetKind::Ball:
    case SetKind::Cylinder: {
      const Mask mask = kind == SetKind::Ball ? Mask::all(n) : random_mask(rng, n, prm.mask_density);
      const ConvexSet set = kind == SetKind::Ball ? ConvexSet{Ball{r}} : ConvexSet{Cylinder{r, mask}};
      // keep the free coordinates modest so boundary effects stay visible
      const Primal x = mask_restrict(g, mask) + 0.5 * mask_restrict(g, mask.complement());
      double target = r;
      if (regime == Region::Interior) target = uniform(rng, 0.1, 0.9) * r;
      if (regime == Region::Exterior) target = uniform(rng, 1.2, 3.0) * r + 0.1;
      return {space, set, scale_masked_to(space, x, mask, target)};
    }
    case SetKind::CoordSubspace: {
      const Mask mask = random_mask(rng, n, prm.mask_density);
      const Primal x = regime == Region::Boundary ? mask_restrict(g, mask) : g;
      return {space, CoordSubspace{mask}, x};
    }
    case SetKind::PositiveCone: {
      Primal f = g;
      if (regime == Region::Interior) {
        for (Index i = 0; i < n; ++i) f[i] = std::abs(f[i]) + 0.1;
      } else if (regime == Region::Boundary) {
        for (Index i = 0; i < n; ++i) f[i] = std::abs(f[i]);
        const auto pos = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
        f[pos] += 0.1;
        const Index zeros = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n - 1));
        Index placed = 0;
        for (Index k = 1; placed < zeros && k < n; ++k, ++placed) f[(pos + k) % n] = 0.0;
      } else {
        const auto neg = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
        f[neg] = -std::abs(f[neg]) - 0.1;
      }
      return {space, PositiveCone{}, f};
    }
  }
  throw InvalidConfig("unknown set kind");
}

}  // namespace projcalc::harness
