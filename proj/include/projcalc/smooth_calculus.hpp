#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "projcalc/projections.hpp"

namespace projcalc {

enum class Direction { Up, Down };

inline const char* direction_name(Direction d) { return d == Direction::Up ? "up" : "down"; }

struct DirectionClass {
  Direction direction;
  double slope;             // Psi(xbar_M, v_M); 0 when v_M vanishes
  bool sampled_consistent;  // the masked norm along the FD steps agrees with `direction`
};

// Decreasing forward-difference steps.
struct FDSchedule {
  std::vector<double> steps{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double tolerance = 1e-5;

  void validate() const {
    if (steps.empty()) throw InvalidConfig("finite-difference schedule is empty");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (!(steps[i] > 0.0)) throw InvalidConfig("finite-difference steps must be positive");
      if (i > 0 && !(steps[i] < steps[i - 1]))
        throw InvalidConfig("finite-difference steps must be strictly decreasing");
    }
    if (!(tolerance > 0.0)) throw InvalidConfig("finite-difference tolerance must be positive");
  }
};

namespace detail {

inline void require_radial(const ConvexSet& set, const char* what) {
  if (!std::holds_alternative<Ball>(set) && !std::holds_alternative<Cylinder>(set))
    throw UnsupportedSet(std::string(what) + " needs a ball or cylinder, got " + set_name(set));
}

}  // namespace detail

// Decides whether the masked norm of xbar + t v leaves the radius (Up) or
// stays within it (Down) for small t > 0. First-order rule on the slope
// Psi(xbar_M, v_M); a zero slope with v_M != 0 is Up because the sphere of a
// strictly convex norm meets its supporting hyperplane only at xbar_M.
inline DirectionClass classify_direction(const Space& space, const ConvexSet& set, const Primal& xbar,
                                         const Primal& v, const FDSchedule& sched = {},
                                         double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::classify_direction);
  detail::require_radial(set, "direction classification");
  const RegionTag tag = classify_region(space, set, xbar, band);
  if (tag.region != Region::Boundary) throw PreconditionError("direction classification needs a boundary point");
  if (std::holds_alternative<Ball>(set) && space.is_origin(v))
    throw PreconditionError("ball direction must be nonzero");

  const Mask mask = base_mask(space, set);
  const Primal xm = mask_restrict(xbar, mask);
  const Primal vm = mask_restrict(v, mask);
  const double vm_norm = space.norm(vm);

  DirectionClass out{Direction::Down, 0.0, true};
  if (vm_norm > space.theta_threshold()) {
    out.slope = space.smoothness(xm, vm);
    out.direction = out.slope < -1e-12 * vm_norm ? Direction::Down : Direction::Up;
  }

  const double ref = tag.masked_norm;
  for (double t : sched.steps) {
    const bool above = space.norm(mask_restrict(xbar + t * v, mask)) > ref;
    if (above != (out.direction == Direction::Up)) out.sampled_consistent = false;
  }
  return out;
}

// Frechet derivative of the ball / cylinder projection applied to v.
//   interior:  v
//   exterior:  r/||xbar_M|| (v_M - <J(xbar_M), v_M>/||xbar_M||^2 xbar_M) + v_Mbar
// (ball: M = all indices). Boundary points have no Frechet derivative.
inline Primal frechet_apply(const Space& space, const ConvexSet& set, const Primal& xbar, const Primal& v,
                            double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::frechet_apply);
  detail::require_radial(set, "Frechet derivative");
  space.check(v);
  const RegionTag tag = classify_region(space, set, xbar, band);
  switch (tag.region) {
    case Region::Interior:
      return v;
    case Region::Boundary:
      throw NoFrechetDerivative("projection is not Frechet differentiable on the boundary");
    case Region::Exterior:
      break;
  }
  const Mask mask = base_mask(space, set);
  const double r = set_radius(set);
  const Primal xm = mask_restrict(xbar, mask);
  const Primal vm = mask_restrict(v, mask);
  const double nm = tag.masked_norm;
  const double a = space.pair(space.duality_map(xm), vm) / (nm * nm);
  return (r / nm) * (vm - a * xm) + mask_restrict(v, mask.complement());
}

struct FDEstimate {
  Primal value;                  // estimate at the smallest step
  std::vector<Primal> estimates;  // one per schedule step
  double last_change = 0.0;       // distance between the last two estimates
  bool converged = false;
};

// One-sided Gateaux derivative estimate (P(x + t v) - P(x)) / t along the
// schedule. A non-converging sequence is reported, not thrown.
inline FDEstimate gateaux_fd(const Space& space, const ConvexSet& set, const Primal& x, const Primal& v,
                             const FDSchedule& sched = {}) {
  coverage::touch(coverage::Op::gateaux_fd);
  sched.validate();
  space.check(v);
  if (v.is_exact_zero()) throw PreconditionError("Gateaux direction must be nonzero");
  const Primal px = project(space, set, x);
  FDEstimate out;
  for (double t : sched.steps) out.estimates.push_back((project(space, set, x + t * v) - px) / t);
  out.value = out.estimates.back();
  if (out.estimates.size() >= 2) {
    out.last_change = space.norm(out.estimates.back() - out.estimates[out.estimates.size() - 2]);
  }
  out.converged = out.last_change <= 10.0 * sched.tolerance * std::max(1.0, space.norm(v));
  return out;
}

// Symmetric difference quotient, for cross-checks at smooth points.
inline Primal central_fd(const Space& space, const ConvexSet& set, const Primal& x, const Primal& v,
                         double h = 1e-6) {
  return (project(space, set, x + h * v) - project(space, set, x - h * v)) / (2.0 * h);
}

// Column j is the central difference along the j-th coordinate.
inline Eigen::MatrixXd fd_jacobian(const Space& space, const ConvexSet& set, const Primal& x,
                                   double h = 1e-6) {
  const Index n = space.dim();
  Eigen::MatrixXd jac(n, n);
  for (Index j = 0; j < n; ++j) jac.col(j) = central_fd(space, set, x, Primal::unit(n, j), h).coords();
  return jac;
}

struct NonsmoothWitness {
  Primal direction;  // unit norm
  double defect = 0.0;
  std::string probe;
  bool found = false;
};

inline constexpr double kWitnessDefectRatio = 0.1;

// Looks for a direction v whose one-sided derivatives fail odd symmetry:
// ||P'(x; v) + P'(x; -v)|| >= 0.1 ||v|| rules out any linear derivative.
// Probes: xbar, the masked part of xbar, then each coordinate direction.
// The largest defect wins, ties going to the earlier probe.
inline NonsmoothWitness nonsmoothness_witness(const Space& space, const ConvexSet& set, const Primal& xbar,
                                              const FDSchedule& sched = {},
                                              double band = kDefaultBoundaryBand) {
  coverage::touch(coverage::Op::nonsmoothness_witness);
  space.check(xbar);
  const Index n = space.dim();
  if (std::holds_alternative<PositiveCone>(set)) {
    const double thr = space.theta_threshold();
    if (!(xbar.coords().cwiseAbs().array() <= thr).any())
      throw PreconditionError("cone witness needs a point with a zero coordinate");
  } else if (std::holds_alternative<CoordSubspace>(set)) {
    throw UnsupportedSet("subspace projection is linear and has no nonsmooth points");
  } else if (classify_region(space, set, xbar, band).region != Region::Boundary) {
    throw PreconditionError("witness search needs a boundary point");
  }

  std::vector<std::pair<std::string, Primal>> probes;
  probes.emplace_back("xbar", xbar);
  if (const auto* cyl = std::get_if<Cylinder>(&set)) probes.emplace_back("xbar_M", mask_restrict(xbar, cyl->mask));
  for (Index i = 0; i < n; ++i) probes.emplace_back("e" + std::to_string(i), Primal::unit(n, i));

  NonsmoothWitness best;
  best.defect = -1.0;
  for (auto& [name, raw] : probes) {
    const double nv = space.norm(raw);
    if (nv <= space.theta_threshold()) continue;
    const Primal v = raw / nv;
    const Primal plus = gateaux_fd(space, set, xbar, v, sched).value;
    const Primal minus = gateaux_fd(space, set, xbar, -v, sched).value;
    const double defect = space.norm(plus + minus);
    if (defect > best.defect) {
      best.direction = v;
      best.defect = defect;
      best.probe = name;
    }
  }
  best.found = best.defect >= kWitnessDefectRatio;
  return best;
}

}  // namespace projcalc
