#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "projcalc/decomposition.hpp"
#include "projcalc/smooth_calculus.hpp"

namespace projcalc {

// Closed-form Frechet (Mordukhovich) coderivatives D^*P_C(xbar)(y*) of the
// metric projections. Where the closed forms only decide whether the origin
// belongs to the coderivative, the result is a membership verdict with the
// evaluated conditions attached.

enum class Verdict { Member, NotMember, Undetermined };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Member: return "member";
    case Verdict::NotMember: return "not_member";
    case Verdict::Undetermined: return "undetermined";
  }
  return "?";
}

struct Condition {
  std::string name;
  bool holds = false;
  double slack = 0.0;
  std::vector<Index> coordinates;  // offending coordinates, where that applies
};

using ConditionReport = std::vector<Condition>;

struct ThetaMembership {
  Verdict verdict = Verdict::Undetermined;
  ConditionReport certificates;

  const Condition* find(const std::string& name) const {
    for (const auto& c : certificates)
      if (c.name == name) return &c;
    return nullptr;
  }
};

struct Singleton {
  Dual value;
};

struct EmptySet {};

// Componentwise order interval [lo, hi].
struct OrderInterval {
  Dual lo;
  Dual hi;
};

using CoderivResult = std::variant<Singleton, EmptySet, ThetaMembership, OrderInterval>;

inline constexpr double kHolderRelTol = 1e-9;
inline constexpr double kQueryMatchRelTol = 1e-9;
inline constexpr double kAlignmentTol = 1e-8;

namespace detail {

inline bool matches(const Space& space, const Dual& a, const Dual& b) {
  return space.norm(a - b) <= kQueryMatchRelTol * std::max(1.0, space.norm(b));
}

// y* = -c J(xbar_M) for some c > 0, compared on unit-normalized vectors.
inline Condition alignment_certificate(const Space& space, const Dual& ym, const Primal& xm) {
  Condition c{"negative_alignment_with_J", false, 0.0, {}};
  const double ny = space.norm(ym);
  const Dual jx = space.duality_map(xm);
  const double nj = space.norm(jx);
  if (ny <= space.theta_threshold() || nj <= space.theta_threshold()) {
    c.slack = 1.0;
    return c;
  }
  c.slack = space.norm(ym / ny + jx / nj);
  c.holds = c.slack <= kAlignmentTol;
  return c;
}

// Shared membership test for a ball or cylinder boundary point: the three
// conditions of the cylinder characterization (the first is vacuous for a
// full mask). The direction test is done on -(J*(y*))_M.
inline ThetaMembership radial_theta_member(const Space& space, const ConvexSet& set, const Primal& xbar,
                                           const Dual& ystar) {
  const Mask mask = base_mask(space, set);
  const double r = set_radius(set);
  const Dual ym = mask_restrict(ystar, mask);
  const Dual ymbar = mask_restrict(ystar, mask.complement());
  const Primal xm = mask_restrict(xbar, mask);
  const double ny = space.norm(ystar);
  const double nym = space.norm(ym);

  ThetaMembership out;

  Condition tail{"complement_part_vanishes", false, space.norm(ymbar), {}};
  tail.holds = tail.slack <= kHolderRelTol * ny;
  out.certificates.push_back(tail);

  const Primal dir = mask_restrict(-space.duality_map_inv(ystar), mask);
  Condition not_down{"direction_not_down", false, 0.0, {}};
  bool degenerate = false;
  if (space.norm(dir) > space.theta_threshold()) {
    const DirectionClass dc = classify_direction(space, set, xbar, dir);
    not_down.holds = dc.direction == Direction::Up;
    not_down.slack = dc.slope;
    degenerate = std::abs(dc.slope) <= 1e-12 * space.norm(dir);
  }
  out.certificates.push_back(not_down);

  const double pairing = space.pair(ym, xm);
  Condition holder{"holder_equality", false, pairing + r * nym, {}};
  holder.holds = std::abs(holder.slack) <= kHolderRelTol * r * nym;
  out.certificates.push_back(holder);

  out.certificates.push_back(alignment_certificate(space, ym, xm));

  if (tail.holds && holder.holds && degenerate) out.verdict = Verdict::Undetermined;
  else out.verdict = (tail.holds && not_down.holds && holder.holds) ? Verdict::Member : Verdict::NotMember;
  return out;
}

}  // namespace detail

// Origin membership in D^*P_{rB}(xbar)(y*) for xbar on the sphere, y* != 0:
// member iff -J*(y*) is an up direction and <y*, xbar> = -r ||y*||_q.
// Certificates also carry the general-Banach necessary conditions (part1_*),
// the sufficient condition (part2_sufficient) and, for p = 2, the Hilbert
// characterization y = a xbar with a < 0.
inline ThetaMembership sphere_theta_member(const Space& space, double r, const Primal& xbar, const Dual& ystar,
                                           double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::sphere_theta_member);
  const ConvexSet ball = Ball{r};
  if (classify_region(space, ball, xbar, band).region != Region::Boundary)
    throw PreconditionError("sphere membership needs a point on the sphere");
  if (space.is_origin(ystar)) throw PreconditionError("sphere membership needs a nonzero dual query");

  ThetaMembership out = detail::radial_theta_member(space, ball, xbar, ystar);
  // The tail condition is vacuous for a ball.
  out.certificates.erase(out.certificates.begin());

  const Anchor anchor(space, xbar);
  const double ny = space.norm(ystar);
  const double pairing = space.pair(ystar, xbar);
  const Dual os = anchor.o_star(ystar);
  const bool os_zero = space.norm(os) <= kHolderRelTol * ny;

  out.certificates.push_back({"part1_pairing_nonpositive", pairing <= kHolderRelTol * r * ny, pairing, {}});

  Condition tangent{"part1_tangent_not_up", true, 0.0, {}};
  const Primal jos = space.duality_map_inv(os);
  if (!os_zero) {
    const DirectionClass dc = classify_direction(space, ball, xbar, -jos);
    tangent.holds = dc.direction == Direction::Down;
    tangent.slack = dc.slope;
  }
  out.certificates.push_back(tangent);

  const double jn = space.norm(jos);
  const double curvature = pairing / (r * r) * space.pair(anchor.xbar_star(), jos) + jn * jn;
  out.certificates.push_back(
      {"part1_curvature", curvature <= kHolderRelTol * std::max(1.0, ny * ny), curvature, {}});

  out.certificates.push_back({"part2_sufficient", os_zero && pairing < 0.0, space.norm(os), {}});

  if (std::abs(space.p() - 2.0) < 1e-15) {
    // In a Hilbert space J is the identity: y must be a negative multiple of xbar.
    const double nx = anchor.xbar_norm();
    const Dual along = (pairing / (nx * nx)) * retag<DualTag>(xbar);
    const double off = space.norm(ystar - along);
    out.certificates.push_back({"hilbert_parallel_negative", off <= kHolderRelTol * ny && pairing < 0.0, off, {}});
  }
  return out;
}

inline CoderivResult coderiv_ball(const Space& space, double r, const Primal& xbar, const Dual& ystar,
                                  double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::coderiv_ball);
  space.check(ystar);
  const ConvexSet ball = Ball{r};
  const RegionTag tag = classify_region(space, ball, xbar, band);
  switch (tag.region) {
    case Region::Interior:
      return Singleton{ystar};
    case Region::Exterior: {
      const double nx = tag.masked_norm;
      const Dual jx = space.duality_map(xbar);
      return Singleton{(r / nx) * (ystar - (space.pair(ystar, xbar) / (nx * nx)) * jx)};
    }
    case Region::Boundary:
      break;
  }
  if (space.is_origin(ystar)) return Singleton{Dual::zero(space.dim())};
  if (detail::matches(space, ystar, space.duality_map(xbar))) return EmptySet{};
  return sphere_theta_member(space, r, xbar, ystar, band);
}

inline CoderivResult coderiv_cylinder(const Space& space, double r, const Mask& mask, const Primal& xbar,
                                      const Dual& ystar, double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::coderiv_cylinder);
  space.check(ystar);
  const ConvexSet cyl = Cylinder{r, mask};
  const RegionTag tag = classify_region(space, cyl, xbar, band);
  switch (tag.region) {
    case Region::Interior:
      return Singleton{ystar};
    case Region::Exterior: {
      const double nm = tag.masked_norm;
      const Primal xm = mask_restrict(xbar, mask);
      const Dual ym = mask_restrict(ystar, mask);
      const Dual jxm = space.duality_map(xm);
      return Singleton{(r / nm) * (ym - (space.pair(ym, xm) / (nm * nm)) * jxm) +
                       mask_restrict(ystar, mask.complement())};
    }
    case Region::Boundary:
      break;
  }
  if (space.is_origin(ystar)) return Singleton{Dual::zero(space.dim())};
  if (detail::matches(space, ystar, space.duality_map(xbar))) return EmptySet{};
  return detail::radial_theta_member(space, cyl, xbar, ystar);
}

// Origin membership in D^*P_K(f)(phi) for the positive cone. Over a finite
// discrete measure (every atom has positive weight) the exact condition is
//   phi_s = 0   wherever f_s > 0, and
//   phi_s >= 0  wherever f_s = 0.
// Coordinates with f_s < 0 are unconstrained: the projection is locally
// zero there. The rule stated for general measure spaces also forbids
// phi_s < 0 on {f_s < 0}, which needs sets of arbitrarily small positive
// measure; its evaluation is kept as the informational certificate
// "nonatomic_rule". Zero tests use the origin threshold componentwise.
inline ThetaMembership cone_theta_member(const Space& space, const Primal& f, const Dual& phi) {
  coverage::touch(coverage::Op::cone_theta_member);
  space.check(f);
  space.check(phi);
  const double thr = space.theta_threshold();

  Condition support{"dual_vanishes_on_positive_support", true, 0.0, {}};
  Condition zero_set{"dual_nonnegative_on_zero_set", true, 0.0, {}};
  Condition nonatomic{"nonatomic_rule", true, 0.0, {}};
  for (Index s = 0; s < f.size(); ++s) {
    const bool f_pos = f[s] > thr;
    const bool f_zero = std::abs(f[s]) <= thr;
    const bool phi_nonzero = std::abs(phi[s]) > thr;
    const bool phi_neg = phi[s] < -thr;
    if (phi_nonzero && f_pos) {
      support.holds = false;
      support.slack = std::max(support.slack, std::abs(phi[s]));
      support.coordinates.push_back(s);
    }
    if (phi_neg && f_zero) {
      zero_set.holds = false;
      zero_set.slack = std::max(zero_set.slack, -phi[s]);
      zero_set.coordinates.push_back(s);
    }
    if ((phi_nonzero && f_pos) || (phi_neg && !f_pos)) {
      nonatomic.holds = false;
      nonatomic.coordinates.push_back(s);
    }
  }
  nonatomic.slack = static_cast<double>(nonatomic.coordinates.size());

  ThetaMembership out;
  out.verdict = (support.holds && zero_set.holds) ? Verdict::Member : Verdict::NotMember;
  out.certificates = {support, zero_set, nonatomic};
  return out;
}

// J(f) belongs to D^*P_K(f)(J(f)) for every f in the cone.
inline ThetaMembership cone_jf_member(const Space& space, const Primal& f) {
  coverage::touch(coverage::Op::cone_jf_member);
  space.check(f);
  const double lowest = f.coords().minCoeff();
  if (lowest < -space.theta_threshold()) throw PreconditionError("point is not in the positive cone");
  ThetaMembership out;
  out.verdict = Verdict::Member;
  out.certificates.push_back({"point_in_cone", true, lowest, {}});
  return out;
}

// D^*P_K(0)(psi) = [0, psi] for psi in the dual cone.
inline CoderivResult cone_interval_at_origin(const Space& space, const Dual& psi) {
  coverage::touch(coverage::Op::cone_interval_at_origin);
  space.check(psi);
  if (psi.coords().minCoeff() < -space.theta_threshold())
    throw PreconditionError("upper end of the interval must lie in the dual cone");
  return OrderInterval{Dual::zero(space.dim()), psi};
}

inline bool interval_contains(const Space& space, const OrderInterval& interval, const Dual& phi) {
  coverage::touch(coverage::Op::interval_contains);
  space.check(phi);
  const double thr = space.theta_threshold();
  return (phi.coords().array() >= interval.lo.coords().array() - thr).all() &&
         (phi.coords().array() <= interval.hi.coords().array() + thr).all();
}

// Dispatch on the set variant. The cone answers the zero query with {0},
// the origin with an order interval when y* is in the dual cone, and an
// origin-membership verdict otherwise.
inline CoderivResult coderivative(const Space& space, const ConvexSet& set, const Primal& xbar, const Dual& ystar,
                                  double band = kDefaultBoundaryBand) {
  validate(space, set);
  if (const auto* b = std::get_if<Ball>(&set)) return coderiv_ball(space, b->radius, xbar, ystar, band);
  if (const auto* c = std::get_if<Cylinder>(&set)) return coderiv_cylinder(space, c->radius, c->mask, xbar, ystar, band);
  if (std::holds_alternative<PositiveCone>(set)) {
    if (space.is_origin(ystar)) return Singleton{Dual::zero(space.dim())};
    if (xbar.is_exact_zero() && ystar.coords().minCoeff() >= -space.theta_threshold())
      return cone_interval_at_origin(space, ystar);
    return cone_theta_member(space, xbar, ystar);
  }
  throw UnsupportedSet("no coderivative closed form for " + set_name(set));
}

}  // namespace projcalc
