#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projcalc/decomposition.hpp"
#include "projcalc/projections.hpp"
#include "projcalc/random.hpp"

namespace projcalc {

// Sampled membership test for x* in D^*P_C(xbar)(y*), straight from the
// defining limit
//
//   limsup_{u -> xbar} (<x*, u - xbar> - <y*, P(u) - P(xbar)>)
//                       / (||u - xbar|| + ||P(u) - P(xbar)||)   <= 0.
//
// A sampled sup can only falsify the inequality. The verdict is therefore
// one-sided: a rejection comes with a reproducible witness u, while "not
// rejected" is evidence for membership, never a proof.

struct OracleConfig {
  std::vector<double> radii{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  int directions_per_radius = 256;
  std::uint64_t seed = 0x5eed;
  double reject_threshold = 1e-2;
  double accept_threshold = 1e-3;
  bool structured_probes = true;

  void validate() const {
    if (radii.size() < 2) throw InvalidConfig("oracle needs at least two radii");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0)) throw InvalidConfig("oracle radii must be positive");
      if (i > 0 && !(radii[i] < radii[i - 1])) throw InvalidConfig("oracle radii must be strictly decreasing");
    }
    if (directions_per_radius < 0) throw InvalidConfig("directions per radius must be nonnegative");
    if (!(accept_threshold > 0.0) || !(reject_threshold > 0.0)) throw InvalidConfig("thresholds must be positive");
    if (!(reject_threshold > accept_threshold)) throw InvalidConfig("reject threshold must exceed accept threshold");
  }
};

struct QuotientEval {
  double value = 0.0;         // sum denominator ||du|| + ||dP||
  double a_norm_value = 0.0;  // product-norm denominator sqrt(||du||^2 + ||dP||^2)
  double numerator = 0.0;
  double denominator_ratio = 1.0;  // sum / product-norm, always in [1, sqrt 2]
};

inline QuotientEval coderiv_quotient(const Space& space, const ConvexSet& set, const Primal& xbar,
                                     const Dual& xstar, const Dual& ystar, const Primal& u) {
  coverage::touch(coverage::Op::coderiv_quotient);
  const Primal du = u - xbar;
  const Primal dp = project(space, set, u) - project(space, set, xbar);
  const double a = space.norm(du);
  const double b = space.norm(dp);
  const double sum = a + b;
  if (!(sum > space.theta_threshold()) || a == 0.0) throw PreconditionError("quotient needs u != xbar");
  const double prod = std::hypot(a, b);
  QuotientEval out;
  out.numerator = space.pair(xstar, du) - space.pair(ystar, dp);
  out.value = out.numerator / sum;
  out.a_norm_value = out.numerator / prod;
  out.denominator_ratio = sum / prod;
  return out;
}

struct OracleWitness {
  Primal u;
  double quotient = 0.0;
  double radius = 0.0;
  std::string probe;
};

struct OracleVerdict {
  std::optional<OracleWitness> witness;  // present iff rejected
  std::vector<double> max_quotient_per_radius;
  std::vector<std::string> argmax_probe_per_radius;
  double min_denominator_ratio = std::numeric_limits<double>::infinity();
  double max_denominator_ratio = 0.0;
  bool sign_agreement = true;  // both denominators give the same sign everywhere
  std::size_t evaluations = 0;

  bool rejected() const { return witness.has_value(); }
  double final_max() const { return max_quotient_per_radius.back(); }
};

struct Probe {
  std::string name;
  Primal direction;  // unit norm
};

// Directions the closed-form arguments walk along: +-xbar and its masked
// parts, J* of the dual data and of their masked, signed and tangential
// parts, sign-restricted pieces for the cone, and every coordinate axis.
inline std::vector<Probe> structured_probes(const Space& space, const ConvexSet& set, const Primal& xbar,
                                            const Dual& xstar, const Dual& ystar) {
  const Index n = space.dim();
  std::vector<std::pair<std::string, Primal>> raw;
  raw.emplace_back("xbar", xbar);

  const auto* cyl = std::get_if<Cylinder>(&set);
  const bool radial = cyl != nullptr || std::holds_alternative<Ball>(set);
  if (cyl) {
    raw.emplace_back("xbar_M", mask_restrict(xbar, cyl->mask));
    raw.emplace_back("xbar_Mbar", mask_restrict(xbar, cyl->mask.complement()));
  }

  const std::pair<std::string, Dual> duals[] = {
      {"ystar", ystar}, {"xstar", xstar}, {"xstar-ystar", xstar - ystar}};
  for (const auto& [name, d] : duals) {
    const Primal j = space.duality_map_inv(d);
    raw.emplace_back("J*(" + name + ")", j);
    raw.emplace_back("J*(" + name + ")+", pos_part(j));
    raw.emplace_back("J*(" + name + ")-", neg_part(j));
    if (cyl) {
      raw.emplace_back("J*(" + name + ")_M", mask_restrict(j, cyl->mask));
      raw.emplace_back("J*(" + name + ")_Mbar", mask_restrict(j, cyl->mask.complement()));
    }
  }

  if (radial) {
    const Mask mask = base_mask(space, set);
    const Primal xm = mask_restrict(xbar, mask);
    if (space.norm(xm) > space.theta_threshold()) {
      const Anchor anchor(space, xm);
      const Dual os = anchor.o_star(mask_restrict(ystar, mask));
      raw.emplace_back("J*(o*(ystar))", space.duality_map_inv(os));
      for (const auto& [name, d] : duals) {
        raw.emplace_back("tangent(J*(" + name + "))",
                         anchor.o_part(mask_restrict(space.duality_map_inv(d), mask)));
      }
      raw.emplace_back("tangent(J*(o*(ystar)))", anchor.o_part(space.duality_map_inv(os)));
    }
  }

  if (std::holds_alternative<PositiveCone>(set)) {
    const double thr = space.theta_threshold();
    Dual neg_on_pos = Dual::zero(n), pos_on_pos = Dual::zero(n), neg_off_pos = Dual::zero(n);
    for (Index s = 0; s < n; ++s) {
      if (xbar[s] > thr && ystar[s] < -thr) neg_on_pos[s] = ystar[s];
      if (xbar[s] > thr && ystar[s] > thr) pos_on_pos[s] = ystar[s];
      if (xbar[s] <= thr && ystar[s] < -thr) neg_off_pos[s] = ystar[s];
    }
    raw.emplace_back("J*(ystar_A)", space.duality_map_inv(neg_on_pos));
    raw.emplace_back("J*(ystar_B)", space.duality_map_inv(pos_on_pos));
    raw.emplace_back("J*(ystar_E)", space.duality_map_inv(neg_off_pos));
  }

  for (Index i = 0; i < n; ++i) raw.emplace_back("e" + std::to_string(i), Primal::unit(n, i));

  std::vector<Probe> out;
  for (auto& [name, v] : raw) {
    const double nv = space.norm(v);
    if (!(nv > space.theta_threshold())) continue;
    const Primal unit = v / nv;
    out.push_back({"+" + name, unit});
    out.push_back({"-" + name, -unit});
  }
  return out;
}

inline OracleVerdict test_membership(const Space& space, const ConvexSet& set, const Primal& xbar,
                                     const Dual& xstar, const Dual& ystar, const OracleConfig& cfg = {}) {
  coverage::touch(coverage::Op::test_membership);
  cfg.validate();
  validate(space, set);
  space.check(xbar);
  space.check(xstar);
  space.check(ystar);
  const Index n = space.dim();

  std::vector<Probe> probes;
  if (cfg.structured_probes) probes = structured_probes(space, set, xbar, xstar, ystar);

  OracleVerdict out;
  std::vector<OracleWitness> best_per_radius;
  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    const double rho = cfg.radii[ri];
    OracleWitness best;
    best.quotient = -std::numeric_limits<double>::infinity();

    auto consider = [&](const std::string& name, const Primal& dir) {
      const Primal u = xbar + rho * dir;
      const QuotientEval q = coderiv_quotient(space, set, xbar, xstar, ystar, u);
      ++out.evaluations;
      if (q.numerator != 0.0) {
        out.min_denominator_ratio = std::min(out.min_denominator_ratio, q.denominator_ratio);
        out.max_denominator_ratio = std::max(out.max_denominator_ratio, q.denominator_ratio);
        if ((q.value > 0.0) != (q.a_norm_value > 0.0)) out.sign_agreement = false;
      }
      // Strict comparison keeps the first maximizer in evaluation order.
      if (q.value > best.quotient) best = {u, q.value, rho, name};
    };

    for (const Probe& p : probes) consider(p.name, p.direction);
    for (int di = 0; di < cfg.directions_per_radius; ++di) {
      Rng rng = substream(cfg.seed, {static_cast<std::uint64_t>(ri), static_cast<std::uint64_t>(di)});
      Primal d = gaussian_point<PrimalTag>(rng, n);
      const double nd = space.norm(d);
      if (!(nd > 0.0)) continue;
      consider("rand[" + std::to_string(ri) + "," + std::to_string(di) + "]", d / nd);
    }
    out.max_quotient_per_radius.push_back(best.quotient);
    out.argmax_probe_per_radius.push_back(best.probe);
    best_per_radius.push_back(std::move(best));
  }

  const std::size_t last = cfg.radii.size() - 1;
  if (out.max_quotient_per_radius[last] >= cfg.reject_threshold &&
      out.max_quotient_per_radius[last - 1] >= cfg.reject_threshold) {
    out.witness = best_per_radius[last];
  }
  if (out.max_denominator_ratio == 0.0) out.min_denominator_ratio = out.max_denominator_ratio = 1.0;
  return out;
}

// Non-increasing sequence up to at most one upward step.
inline bool monotone_with_one_inversion(const std::vector<double>& values, double slack = 0.0) {
  int inversions = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] + slack) ++inversions;
  return inversions <= 1;
}

}  // namespace projcalc
