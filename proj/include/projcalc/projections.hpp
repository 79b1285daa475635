#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "projcalc/random.hpp"
#include "projcalc/space.hpp"

namespace projcalc {

// A subset of coordinate indices {0, ..., n-1}.
class Mask {
 public:
  Mask() = default;

  static Mask all(Index n) { return Mask(std::vector<bool>(static_cast<std::size_t>(n), true)); }
  static Mask none(Index n) { return Mask(std::vector<bool>(static_cast<std::size_t>(n), false)); }

  static Mask from_indices(Index n, std::span<const Index> indices) {
    std::vector<bool> in(static_cast<std::size_t>(n), false);
    for (Index i : indices) {
      if (i < 0 || i >= n)
        throw std::out_of_range("mask index " + std::to_string(i) + " outside [0, " +
                                std::to_string(n) + ")");
      in[static_cast<std::size_t>(i)] = true;
    }
    return Mask(std::move(in));
  }
  static Mask from_indices(Index n, std::initializer_list<Index> indices) {
    return from_indices(n, std::span<const Index>(indices.begin(), indices.size()));
  }

  Index dim() const { return static_cast<Index>(in_.size()); }
  bool contains(Index i) const { return in_[static_cast<std::size_t>(i)]; }
  bool empty() const { return std::none_of(in_.begin(), in_.end(), [](bool b) { return b; }); }
  Index count() const { return std::count(in_.begin(), in_.end(), true); }

  std::vector<Index> indices() const {
    std::vector<Index> out;
    for (Index i = 0; i < dim(); ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

  Mask complement() const {
    std::vector<bool> c(in_.size());
    for (std::size_t i = 0; i < in_.size(); ++i) c[i] = !in_[i];
    return Mask(std::move(c));
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  explicit Mask(std::vector<bool> in) : in_(std::move(in)) {}
  std::vector<bool> in_;
};

// x_M: coordinates outside the mask set to zero. Applies to primal and dual
// points alike.
template <class Tag>
Point<Tag> mask_restrict(const Point<Tag>& x, const Mask& mask) {
  coverage::touch(coverage::Op::mask_restrict);
  if (mask.dim() != x.size()) throw DimensionMismatch("mask and point dimensions differ");
  Point<Tag> out = Point<Tag>::zero(x.size());
  for (Index i = 0; i < x.size(); ++i)
    if (mask.contains(i)) out[i] = x[i];
  return out;
}

// f+ keeps the strictly positive coordinates, f- the strictly negative ones;
// zero coordinates land in neither.
template <class Tag>
Point<Tag> pos_part(const Point<Tag>& f) {
  coverage::touch(coverage::Op::pos_part);
  return Point<Tag>(f.coords().cwiseMax(0.0));
}

template <class Tag>
Point<Tag> neg_part(const Point<Tag>& f) {
  coverage::touch(coverage::Op::neg_part);
  return Point<Tag>(f.coords().cwiseMin(0.0));
}

struct Ball {
  double radius;
};

struct Cylinder {
  double radius;
  Mask mask;
};

struct CoordSubspace {
  Mask mask;
};

struct PositiveCone {};

using ConvexSet = std::variant<Ball, Cylinder, CoordSubspace, PositiveCone>;

inline std::string set_name(const ConvexSet& set) {
  return std::visit(
      [](const auto& s) -> std::string {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) return "ball";
        else if constexpr (std::is_same_v<S, Cylinder>) return "cylinder";
        else if constexpr (std::is_same_v<S, CoordSubspace>) return "subspace";
        else return "cone";
      },
      set);
}

inline void validate(const Space& space, const ConvexSet& set) {
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball> || std::is_same_v<S, Cylinder>) {
          if (!std::isfinite(s.radius) || !(s.radius > 0.0))
            throw InvalidConfig("radius must be positive");
        }
        if constexpr (std::is_same_v<S, Cylinder> || std::is_same_v<S, CoordSubspace>) {
          if (s.mask.dim() != space.dim()) throw DimensionMismatch("mask dimension differs from space");
        }
        if constexpr (std::is_same_v<S, Cylinder>) {
          if (s.mask.empty()) throw InvalidConfig("cylinder mask must be nonempty");
        }
      },
      set);
}

// The mask whose norm defines a ball-like set: every index for a ball, the
// base mask for a cylinder.
inline Mask base_mask(const Space& space, const ConvexSet& set) {
  if (const auto* c = std::get_if<Cylinder>(&set)) return c->mask;
  if (std::holds_alternative<Ball>(set)) return Mask::all(space.dim());
  throw UnsupportedSet("set has no radial base: " + set_name(set));
}

inline double set_radius(const ConvexSet& set) {
  if (const auto* b = std::get_if<Ball>(&set)) return b->radius;
  if (const auto* c = std::get_if<Cylinder>(&set)) return c->radius;
  throw UnsupportedSet("set has no radius: " + set_name(set));
}

enum class Region { Interior, Boundary, Exterior };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Interior: return "interior";
    case Region::Boundary: return "boundary";
    case Region::Exterior: return "exterior";
  }
  return "?";
}

struct RegionTag {
  Region region;
  double band;  // absolute half-width of the boundary band
  double masked_norm;
};

inline constexpr double kDefaultBoundaryBand = 1e-9;

// Interior / boundary / exterior of a ball or cylinder. The band is
// relative to the radius.
inline RegionTag classify_region(const Space& space, const ConvexSet& set, const Primal& x,
                                 double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::classify_region);
  if (!std::holds_alternative<Ball>(set) && !std::holds_alternative<Cylinder>(set))
    throw UnsupportedSet("region classification needs a ball or cylinder, got " + set_name(set));
  validate(space, set);
  const double r = set_radius(set);
  const double nm = space.norm(mask_restrict(x, base_mask(space, set)));
  const double abs_band = band * r;
  Region reg = Region::Exterior;
  if (std::abs(nm - r) <= abs_band) reg = Region::Boundary;
  else if (nm < r - abs_band) reg = Region::Interior;
  return {reg, abs_band, nm};
}

// Closed-form metric projections:
//   ball      x                       inside,  r x / ||x||              outside
//   cylinder  x                       inside,  r x_M / ||x_M|| + x_Mbar outside
//   subspace  x_M
//   cone      componentwise positive part
inline Primal project(const Space& space, const ConvexSet& set, const Primal& x) {
  coverage::touch(coverage::Op::project);
  space.check(x);
  return std::visit(
      [&](const auto& s) -> Primal {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          const double nx = space.norm(x);
          if (nx <= s.radius) return x;
          return (s.radius / nx) * x;
        } else if constexpr (std::is_same_v<S, Cylinder>) {
          const Primal xm = mask_restrict(x, s.mask);
          const double nm = space.norm(xm);
          if (nm <= s.radius) return x;
          return (s.radius / nm) * xm + mask_restrict(x, s.mask.complement());
        } else if constexpr (std::is_same_v<S, CoordSubspace>) {
          return mask_restrict(x, s.mask);
        } else {
          return pos_part(x);
        }
      },
      set);
}

// Membership up to a relative tolerance.
inline bool contains(const Space& space, const ConvexSet& set, const Primal& x, double tol = 1e-12) {
  space.check(x);
  return std::visit(
      [&](const auto& s) -> bool {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          return space.norm(x) <= s.radius * (1.0 + tol);
        } else if constexpr (std::is_same_v<S, Cylinder>) {
          return space.norm(mask_restrict(x, s.mask)) <= s.radius * (1.0 + tol);
        } else if constexpr (std::is_same_v<S, CoordSubspace>) {
          const double scale = tol * std::max(1.0, space.norm(x));
          for (Index i = 0; i < x.size(); ++i)
            if (!s.mask.contains(i) && std::abs(x[i]) > scale) return false;
          return true;
        } else {
          const double scale = tol * std::max(1.0, space.norm(x));
          return (x.coords().array() >= -scale).all();
        }
      },
      set);
}

// min over z of <J(x - u), u - z>. Nonnegative on every sample when u is the
// projection of x; a negative value certifies that u is not.
inline double variational_residual(const Space& space, const ConvexSet& set, const Primal& x,
                                   const Primal& u, std::span<const Primal> z_samples) {
  coverage::touch(coverage::Op::variational_residual);
  const Dual jd = space.duality_map(x - u);
  double best = std::numeric_limits<double>::infinity();
  for (const Primal& z : z_samples) {
    if (!contains(space, set, z, 1e-12)) throw PreconditionError("residual sample lies outside the set");
    best = std::min(best, space.pair(jd, u - z));
  }
  return best;
}

// Random feasible point: ball by random direction and radius, cylinder by a
// masked ball sample plus a free tail, cone by absolute values, subspace by
// masking.
inline Primal sample_in_set(const Space& space, const ConvexSet& set, Rng& rng, double tail_scale = 1.0) {
  const Index n = space.dim();
  return std::visit(
      [&](const auto& s) -> Primal {
        using S = std::decay_t<decltype(s)>;
        Primal g = gaussian_point<PrimalTag>(rng, n);
        if constexpr (std::is_same_v<S, Ball>) {
          const double ng = space.norm(g);
          if (ng == 0.0) return Primal::zero(n);
          return (s.radius * uniform(rng, 0.0, 1.0) / ng) * g;
        } else if constexpr (std::is_same_v<S, Cylinder>) {
          const Primal gm = mask_restrict(g, s.mask);
          const double ng = space.norm(gm);
          Primal base = ng == 0.0 ? gm : (s.radius * uniform(rng, 0.0, 1.0) / ng) * gm;
          return base + tail_scale * mask_restrict(g, s.mask.complement());
        } else if constexpr (std::is_same_v<S, CoordSubspace>) {
          return mask_restrict(g, s.mask);
        } else {
          return Primal(g.coords().cwiseAbs());
        }
      },
      set);
}

}  // namespace projcalc
