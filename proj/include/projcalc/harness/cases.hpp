#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "projcalc/decomposition.hpp"
#include "projcalc/projections.hpp"
#include "projcalc/random.hpp"

namespace projcalc::harness {

// A dual query with the construction that produced it. `intended_member`
// is what the construction aims for, not a verdict; checks compare the
// closed form against the oracle.
struct DualQuery {
  std::string label;
  Dual ystar;
  bool intended_member = false;
};

namespace detail {

inline Dual rescale(const Space& space, const Dual& d, double target) { return (target / space.norm(d)) * d; }

inline Dual unit_tangent(const Space& space, const Anchor& anchor, const Mask& mask, Rng& rng) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Dual t = mask_restrict(anchor.o_star(mask_restrict(gaussian_point<DualTag>(rng, space.dim()), mask)), mask);
    const double nt = space.norm(t);
    if (nt > 1e-6) return t / nt;
  }
  throw DegenerateInput("could not draw a tangent dual direction");
}

}  // namespace detail

// Queries at a boundary point of a ball or cylinder (mask = all for the
// ball), cycling through: negative multiples of J(xbar_M) (members),
// tangential duals, oblique mixes, positive multiples away from J(xbar),
// and, when the mask is proper, a member direction plus a complement tail.
inline std::vector<DualQuery> radial_queries(const Space& space, const Mask& mask, const Primal& xbar, Rng& rng,
                                             int count) {
  const Primal xm = mask_restrict(xbar, mask);
  const Anchor anchor(space, xm);
  const Dual j = anchor.xbar_star() / space.norm(anchor.xbar_star());
  const bool proper = mask.count() < space.dim();
  std::vector<DualQuery> out;
  for (int k = 0; out.size() < static_cast<std::size_t>(count); ++k) {
    const double scale = uniform(rng, 0.5, 2.0);
    switch (k % 5) {
      case 0:
      case 3:
        out.push_back({"negative_multiple", -scale * j, true});
        break;
      case 1:
        out.push_back({"tangential", scale * detail::unit_tangent(space, anchor, mask, rng), false});
        break;
      case 2: {
        const double mix = uniform(rng, 0.3, 1.0);
        const Dual y = -j + mix * detail::unit_tangent(space, anchor, mask, rng);
        out.push_back({"oblique", detail::rescale(space, y, scale), false});
        break;
      }
      case 4: {
        if (proper && (k / 5) % 2 == 0) {
          Dual tail = mask_restrict(gaussian_point<DualTag>(rng, space.dim()), mask.complement());
          tail = detail::rescale(space, tail, uniform(rng, 0.3, 1.0));
          out.push_back({"complement_tail", -scale * j + tail, false});
        } else {
          // positive multiple of J(xbar_M), kept away from the J(xbar) query itself
          const double r = anchor.xbar_norm();
          double c = uniform(rng, 0.2, 3.0) * r;
          if (std::abs(c - r) < 0.2 * r) c += 0.5 * r;
          out.push_back({"positive_multiple", c * j, false});
        }
        break;
      }
    }
  }
  return out;
}

struct ConeCase {
  std::string label;
  Primal f;
  Dual phi;
  bool intended_member = false;
};

// Point/dual pairs for origin membership over the positive cone. Dual
// entries that matter are kept away from zero so violations are visible
// to the sampled quotient.
inline std::vector<ConeCase> cone_cases(const Space& space, Rng& rng, int count) {
  const Index n = space.dim();
  auto magnitude = [&] { return uniform(rng, 0.3, 1.5); };
  std::vector<ConeCase> out;
  for (int k = 0; out.size() < static_cast<std::size_t>(count); ++k) {
    Primal f = gaussian_point<PrimalTag>(rng, n);
    Dual phi = Dual::zero(n);
    switch (k % 6) {
      case 0: {  // f in -K, phi in K_q
        for (Index s = 0; s < n; ++s) f[s] = -std::abs(f[s]) - 0.1;
        for (Index s = 0; s < n; ++s) phi[s] = (rng() % 3 == 0) ? 0.0 : magnitude();
        out.push_back({"negative_point_dual_cone", f, phi, true});
        break;
      }
      case 1: {  // f in K \ {0}, phi = J(f)
        for (Index s = 0; s < n; ++s) f[s] = std::abs(f[s]);
        f[static_cast<Index>(rng() % static_cast<std::uint64_t>(n))] += 0.2;
        out.push_back({"duality_image", f, space.duality_map(f), false});
        break;
      }
      case 2:
      case 5: {  // mixed signs, phi obeying the atomic rule
        f[0] = std::abs(f[0]) + 0.1;
        f[1] = 0.0;
        if (n > 2) f[2] = -std::abs(f[2]) - 0.1;
        for (Index s = 0; s < n; ++s) {
          if (f[s] > 0.0) phi[s] = 0.0;
          else if (f[s] == 0.0) phi[s] = magnitude();
          else phi[s] = (k % 2 == 0 ? -1.0 : 1.0) * magnitude();
        }
        out.push_back({k % 2 == 0 ? "negative_dual_on_negative_support" : "atomic_rule_member", f, phi, true});
        break;
      }
      case 3: {  // phi nonzero where f > 0
        f[0] = std::abs(f[0]) + 0.1;
        phi[0] = (rng() % 2 == 0 ? 1.0 : -1.0) * magnitude();
        out.push_back({"dual_on_positive_support", f, phi, false});
        break;
      }
      case 4: {  // phi negative on the zero set
        for (Index s = 0; s < n; ++s) f[s] = -std::abs(f[s]) - 0.1;
        f[0] = 0.0;
        phi[0] = -magnitude();
        out.push_back({"negative_dual_on_zero_set", f, phi, false});
        break;
      }
    }
  }
  return out;
}

}  // namespace projcalc::harness
