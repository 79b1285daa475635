#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "projcalc/coderivative.hpp"
#include "projcalc/coverage.hpp"
#include "projcalc/decomposition.hpp"
#include "projcalc/harness/cases.hpp"
#include "projcalc/harness/instances.hpp"
#include "projcalc/harness/report.hpp"
#include "projcalc/limsup_oracle.hpp"
#include "projcalc/smooth_calculus.hpp"

namespace projcalc::harness {

inline const std::vector<std::string> kSuiteNames = {
    "space-identities", "decomposition",    "projections",   "derivatives", "coderiv-ball",
    "coderiv-cylinder", "coderiv-cone",     "oracle-crosscheck", "all"};

struct SuiteSpec {
  std::string suite = "all";
  Index n = 8;
  double p = 2.0;
  double r = 1.0;
  double mask_density = 0.5;
  std::uint64_t seed = 42;
  double tol_scale = 1.0;
  int samples = 10;
  WeightsMode weights = WeightsMode::Unit;

  void validate() const {
    if (std::find(kSuiteNames.begin(), kSuiteNames.end(), suite) == kSuiteNames.end())
      throw InvalidConfig("unknown suite '" + suite + "'");
    if (n < 2 || n > 4096) throw InvalidConfig("n must lie in [2, 4096]");
    if (!(p >= kMinExponent && p <= kMaxExponent)) throw InvalidConfig("p must lie in [1.1, 10]");
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidConfig("r must be positive");
    if (!(mask_density > 0.0 && mask_density <= 1.0)) throw InvalidConfig("mask density must lie in (0, 1]");
    if (!(tol_scale > 0.0) || !std::isfinite(tol_scale)) throw InvalidConfig("tolerance scale must be positive");
    if (samples < 1) throw InvalidConfig("samples must be at least 1");
  }

  InstanceParams params() const { return {n, p, r, mask_density, weights}; }

  json to_json() const {
    json j;
    j["n"] = n;
    j["p"] = p;
    j["r"] = r;
    j["mask_density"] = mask_density;
    j["seed"] = seed;
    j["tol_scale"] = tol_scale;
    j["samples"] = samples;
    j["weights"] = weights == WeightsMode::Unit ? "unit" : "random";
    return j;
  }

  std::string command_line(const std::string& which) const {
    std::ostringstream os;
    os << "projcalc run --suite " << which << " --n " << n << " --p " << format_double(p) << " --r "
       << format_double(r) << " --mask-density " << format_double(mask_density) << " --seed " << seed
       << " --tol-scale " << format_double(tol_scale) << " --samples " << samples << " --weights "
       << (weights == WeightsMode::Unit ? "unit" : "random");
    return os.str();
  }
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string json_arg(const json& j) {
  std::string s = dump_json(j, 0);
  s.erase(std::remove(s.begin(), s.end(), '\n'), s.end());
  return s;
}

}  // namespace detail

// Per-suite state. Seeded streams are keyed by (suite, check, index) so
// cases stay independent of evaluation order.
class SuiteContext {
 public:
  SuiteContext(const SuiteSpec& spec, std::string suite, std::vector<CaseResult>& out)
      : spec_(spec), suite_(std::move(suite)), out_(out) {}

  const SuiteSpec& spec() const { return spec_; }
  InstanceParams params() const { return spec_.params(); }
  double tol(double t) const { return t * spec_.tol_scale; }
  int samples() const { return spec_.samples; }

  std::uint64_t seed(std::string_view check, std::uint64_t k) const {
    return derive_seed(spec_.seed, {detail::fnv1a(suite_), detail::fnv1a(check), k});
  }
  Rng rng(std::string_view check, std::uint64_t k) const {
    return substream(spec_.seed, {detail::fnv1a(suite_), detail::fnv1a(check), k, 1});
  }

  Space space(std::string_view check, std::uint64_t k) const {
    Rng g = rng(check, k);
    Vec w = Vec::Ones(spec_.n);
    if (spec_.weights == WeightsMode::Random)
      for (Index i = 0; i < spec_.n; ++i) w[i] = uniform(g, 0.5, 2.0);
    return Space(spec_.p, w);
  }

  // Runs `body` on a fresh case. Any exception marks the case failed and is
  // recorded as a label.
  void run(const std::string& check, std::uint64_t k, const std::string& anchor,
           const std::function<void(CaseResult&)>& body) {
    CaseResult c;
    char idx[16];
    std::snprintf(idx, sizeof idx, "%03llu", static_cast<unsigned long long>(k));
    c.id = suite_ + "/" + check + "/" + idx;
    c.anchor = anchor;
    c.repro = spec_.command_line(suite_);
    try {
      body(c);
    } catch (const std::exception& e) {
      c.status = Status::Fail;
      c.labels["error"] = e.what();
    }
    out_.push_back(std::move(c));
  }

 private:
  const SuiteSpec& spec_;
  std::string suite_;
  std::vector<CaseResult>& out_;
};

// Records value and bound; fails the case if value > bound (or NaN).
inline void judge(CaseResult& c, const std::string& name, double value, double bound) {
  c.metrics[name] = value;
  c.metrics[name + "_bound"] = bound;
  if (!(value <= bound)) c.status = Status::Fail;
}

inline void require(CaseResult& c, const std::string& name, bool holds) {
  c.metrics[name] = holds ? 1.0 : 0.0;
  if (!holds) c.status = Status::Fail;
}

inline std::string set_kind_flag(const ConvexSet& set) {
  if (std::holds_alternative<Ball>(set)) return "ball";
  if (std::holds_alternative<Cylinder>(set)) return "cylinder";
  if (std::holds_alternative<PositiveCone>(set)) return "cone";
  return "subspace";
}

inline std::string oracle_command(const Space& space, const ConvexSet& set, const Primal& xbar, const Dual& xstar,
                                  const Dual& ystar, const OracleConfig& cfg, bool expect_member) {
  std::ostringstream os;
  os << "projcalc oracle --set " << set_kind_flag(set) << " --p " << format_double(space.p());
  if (std::holds_alternative<Ball>(set) || std::holds_alternative<Cylinder>(set))
    os << " --r " << format_double(set_radius(set));
  if (const auto* c = std::get_if<Cylinder>(&set)) os << " --mask '" << detail::json_arg(to_json(c->mask)) << "'";
  os << " --weights '" << detail::json_arg(to_json(Primal(space.weights()))) << "'";
  os << " --point '" << detail::json_arg(to_json(xbar)) << "'";
  os << " --xstar '" << detail::json_arg(to_json(xstar)) << "'";
  os << " --ystar '" << detail::json_arg(to_json(ystar)) << "'";
  os << " --seed " << cfg.seed << " --expect " << (expect_member ? "not-rejected" : "rejected");
  return os.str();
}

inline json witness_json(const OracleWitness& w) {
  json j;
  j["u"] = to_json(w.u);
  j["quotient"] = w.quotient;
  j["radius"] = w.radius;
  j["probe"] = w.probe;
  return j;
}

// Runs the oracle and scores it against an expected membership:
// members must not be rejected and must reach the accept threshold,
// non-members must be rejected with a witness.
inline OracleVerdict oracle_check(CaseResult& c, const Space& space, const ConvexSet& set, const Primal& xbar,
                                  const Dual& xstar, const Dual& ystar, bool expect_member,
                                  const OracleConfig& cfg = {}) {
  const OracleVerdict v = test_membership(space, set, xbar, xstar, ystar, cfg);
  c.metrics["oracle_final_max"] = v.final_max();
  c.metrics["oracle_rejected"] = v.rejected() ? 1.0 : 0.0;
  c.metrics["oracle_min_denominator_ratio"] = v.min_denominator_ratio;
  c.metrics["oracle_max_denominator_ratio"] = v.max_denominator_ratio;
  c.labels["expected"] = expect_member ? "not-rejected" : "rejected";
  if (v.witness) c.witness = witness_json(*v.witness);
  const bool ok = expect_member ? (!v.rejected() && v.final_max() <= cfg.accept_threshold) : v.rejected();
  if (!ok) c.status = Status::Fail;
  c.repro = oracle_command(space, set, xbar, xstar, ystar, cfg, expect_member);
  return v;
}

// ---------------------------------------------------------------- suites

inline void suite_space_identities(SuiteContext& ctx) {
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("duality", uk, "duality.pairing_norm_inverse", [&](CaseResult& c) {
      const Space s = ctx.space("duality", uk);
      Rng rng = ctx.rng("duality-x", uk);
      const Primal x = std::exp(uniform(rng, -3.0, 3.0)) * gaussian_point<PrimalTag>(rng, s.dim());
      const double nx = s.norm(x);
      const Dual jx = s.duality_map(x);
      judge(c, "pairing_residual", std::abs(s.pair(jx, x) - nx * nx), ctx.tol(1e-9) * std::max(1.0, nx * nx));
      judge(c, "norm_residual", std::abs(s.norm(jx) - nx), ctx.tol(1e-9) * std::max(1.0, nx));
      judge(c, "inverse_residual", s.norm(s.duality_map_inv(jx) - x), ctx.tol(1e-8) * std::max(1.0, nx));
    });
    ctx.run("two-sided", uk, "duality.two_sided_inequality", [&](CaseResult& c) {
      const Space s = ctx.space("two-sided", uk);
      Rng rng = ctx.rng("two-sided-x", uk);
      const Primal x = gaussian_point<PrimalTag>(rng, s.dim());
      const Primal y = uniform(rng, 0.1, 3.0) * gaussian_point<PrimalTag>(rng, s.dim());
      const double gap = s.norm(x) * s.norm(x) - s.norm(y) * s.norm(y);
      judge(c, "lower_violation", 2.0 * s.pair(s.duality_map(y), x - y) - gap, ctx.tol(1e-9));
      judge(c, "upper_violation", gap - 2.0 * s.pair(s.duality_map(x), x - y), ctx.tol(1e-9));
    });
    ctx.run("smoothness", uk, "duality.norm_derivative", [&](CaseResult& c) {
      const Space s = ctx.space("smoothness", uk);
      Rng rng = ctx.rng("smoothness-x", uk);
      Primal x = gaussian_point<PrimalTag>(rng, s.dim());
      x = x / s.norm(x);
      const Primal y = gaussian_point<PrimalTag>(rng, s.dim());
      const double h = 1e-6;
      const double fd = (s.norm(x + h * y) - s.norm(x - h * y)) / (2.0 * h);
      judge(c, "smoothness_vs_central_difference", std::abs(s.smoothness(x, y) - fd),
            ctx.tol(1e-6) * std::max(1.0, s.norm(y)));
    });
  }
}

inline void suite_decomposition(SuiteContext& ctx) {
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("recomposition", uk, "decomposition.recomposition", [&](CaseResult& c) {
      const Space s = ctx.space("recomposition", uk);
      Rng rng = ctx.rng("recomposition-x", uk);
      const Anchor a(s, gaussian_point<PrimalTag>(rng, s.dim()));
      const Primal x = uniform(rng, 0.1, 10.0) * gaussian_point<PrimalTag>(rng, s.dim());
      const Dual xs = uniform(rng, 0.1, 10.0) * gaussian_point<DualTag>(rng, s.dim());
      judge(c, "primal_residual", s.norm(x - (a.a_coef(x) * a.xbar() + a.o_part(x))),
            ctx.tol(1e-12) * std::max(1.0, s.norm(x)));
      judge(c, "dual_residual", s.norm(xs - (a.a_star(xs) * a.xbar_star() + a.o_star(xs))),
            ctx.tol(1e-12) * std::max(1.0, s.norm(xs)));
      require(c, "o_part_in_O", a.in_O(a.o_part(x)));
      judge(c, "o_star_annihilates_xbar", std::abs(s.pair(a.o_star(xs), a.xbar())),
            ctx.tol(1e-9) * std::max(1.0, s.norm(xs) * a.xbar_norm()));
    });
    ctx.run("tangential-growth", uk, "decomposition.tangential_norm_growth", [&](CaseResult& c) {
      const Space s = ctx.space("tangential-growth", uk);
      Rng rng = ctx.rng("tangential-growth-x", uk);
      const Anchor a(s, gaussian_point<PrimalTag>(rng, s.dim()));
      Primal v = a.o_part(gaussian_point<PrimalTag>(rng, s.dim()));
      v = (1e-6 / s.norm(v)) * v;
      judge(c, "ratio_at_1e-6", std::abs(s.norm(a.xbar() + v) - a.xbar_norm()) / s.norm(v), ctx.tol(1e-3));
    });
  }
}

inline void suite_projections(SuiteContext& ctx) {
  const SetKind kinds[] = {SetKind::Ball, SetKind::Cylinder, SetKind::CoordSubspace, SetKind::PositiveCone};
  for (SetKind kind : kinds) {
    const std::string check = std::string("optimality-") + kind_name(kind);
    for (int k = 0; k < ctx.samples(); ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      ctx.run(check, uk, "projection.nearest_point_and_variational_inequality", [&](CaseResult& c) {
        const Instance inst = gen_instance(kind, Region::Exterior, ctx.seed(check, uk), ctx.params());
        const Space& s = inst.space;
        const Primal px = project(s, inst.set, inst.xbar);
        require(c, "feasible", contains(s, inst.set, px));
        judge(c, "idempotence", s.norm(project(s, inst.set, px) - px), ctx.tol(1e-12) * std::max(1.0, s.norm(px)));
        Rng rng = ctx.rng(check + "-z", uk);
        std::vector<Primal> zs;
        double worst = -std::numeric_limits<double>::infinity();
        const double d = s.norm(inst.xbar - px);
        for (int j = 0; j < 50; ++j) {
          zs.push_back(sample_in_set(s, inst.set, rng));
          worst = std::max(worst, d - s.norm(inst.xbar - zs.back()));
        }
        judge(c, "distance_excess", worst, ctx.tol(1e-9));
        judge(c, "negative_variational_residual", -variational_residual(s, inst.set, inst.xbar, px, zs),
              ctx.tol(1e-8));
        if (kind == SetKind::Ball || kind == SetKind::Cylinder) {
          require(c, "projection_on_boundary", classify_region(s, inst.set, px).region == Region::Boundary);
        }
        if (kind == SetKind::PositiveCone) {
          require(c, "positive_negative_split", pos_part(inst.xbar) + neg_part(inst.xbar) == inst.xbar);
          require(c, "projection_is_positive_part", px == pos_part(inst.xbar));
        }
        if (kind == SetKind::CoordSubspace) {
          require(c, "projection_is_restriction", px == mask_restrict(inst.xbar, std::get<CoordSubspace>(inst.set).mask));
        }
      });
    }
  }
}

inline void suite_derivatives(SuiteContext& ctx) {
  for (SetKind kind : {SetKind::Ball, SetKind::Cylinder}) {
    for (Region regime : {Region::Interior, Region::Exterior}) {
      const std::string check = std::string("frechet-") + kind_name(kind) + "-" + region_name(regime);
      for (int k = 0; k < ctx.samples(); ++k) {
        const auto uk = static_cast<std::uint64_t>(k);
        ctx.run(check, uk, "derivative.frechet_matches_gateaux", [&](CaseResult& c) {
          const Instance inst = gen_instance(kind, regime, ctx.seed(check, uk), ctx.params());
          const Space& s = inst.space;
          Rng rng = ctx.rng(check + "-v", uk);
          const Primal v = gaussian_point<PrimalTag>(rng, s.dim());
          const Primal w = gaussian_point<PrimalTag>(rng, s.dim());
          const Primal exact = frechet_apply(s, inst.set, inst.xbar, v);
          const FDEstimate fd = gateaux_fd(s, inst.set, inst.xbar, v);
          judge(c, "fd_gap", s.norm(exact - fd.value), ctx.tol(1e-4) * std::max(1.0, s.norm(v)));
          judge(c, "additivity", s.norm(frechet_apply(s, inst.set, inst.xbar, v + w) - exact -
                                        frechet_apply(s, inst.set, inst.xbar, w)),
                ctx.tol(1e-10) * std::max(1.0, s.norm(v) + s.norm(w)));
          if (regime == Region::Exterior) {
            const Primal dx = frechet_apply(s, inst.set, inst.xbar, inst.xbar);
            const Primal expected = mask_restrict(inst.xbar, base_mask(s, inst.set).complement());
            judge(c, "anchor_image", s.norm(dx - expected), ctx.tol(1e-10) * std::max(1.0, s.norm(inst.xbar)));
          }
        });
      }
    }
    const std::string check = std::string("direction-") + kind_name(kind);
    for (int k = 0; k < ctx.samples(); ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      ctx.run(check, uk, "derivative.direction_classification", [&](CaseResult& c) {
        const Instance inst = gen_instance(kind, Region::Boundary, ctx.seed(check, uk), ctx.params());
        const Space& s = inst.space;
        Rng rng = ctx.rng(check + "-v", uk);
        const Primal v = gaussian_point<PrimalTag>(rng, s.dim());
        const DirectionClass dc = classify_direction(s, inst.set, inst.xbar, v);
        c.labels["direction"] = direction_name(dc.direction);
        c.metrics["slope"] = dc.slope;
        const Mask m = base_mask(s, inst.set);
        const double r = set_radius(inst.set);
        // the decision concerns small t; compare at t = 1e-6
        const bool above = s.norm(mask_restrict(inst.xbar + 1e-6 * v, m)) > r;
        require(c, "agrees_at_smallest_step", above == (dc.direction == Direction::Up));
      });
    }
  }
  for (SetKind kind : {SetKind::Ball, SetKind::Cylinder, SetKind::PositiveCone}) {
    const std::string check = std::string("witness-") + kind_name(kind);
    for (int k = 0; k < ctx.samples(); ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      ctx.run(check, uk, "derivative.boundary_nonsmoothness", [&](CaseResult& c) {
        const Instance inst = gen_instance(kind, Region::Boundary, ctx.seed(check, uk), ctx.params());
        const NonsmoothWitness w = nonsmoothness_witness(inst.space, inst.set, inst.xbar);
        c.metrics["defect"] = w.defect;
        c.labels["probe"] = w.probe;
        c.witness = json{{"direction", to_json(w.direction)}, {"point", to_json(inst.xbar)}};
        require(c, "witness_found", w.found);
      });
    }
  }
}

inline void adjoint_checks(SuiteContext& ctx, SetKind kind) {
  for (Region regime : {Region::Interior, Region::Exterior}) {
    const std::string check = std::string("adjoint-") + region_name(regime);
    for (int k = 0; k < ctx.samples(); ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      ctx.run(check, uk, "coderivative.adjoint_of_frechet_derivative", [&](CaseResult& c) {
        const Instance inst = gen_instance(kind, regime, ctx.seed(check, uk), ctx.params());
        const Space& s = inst.space;
        Rng rng = ctx.rng(check + "-q", uk);
        const Dual y = gaussian_point<DualTag>(rng, s.dim());
        const Primal v = gaussian_point<PrimalTag>(rng, s.dim());
        const CoderivResult res = coderivative(s, inst.set, inst.xbar, y);
        const Dual xs = std::get<Singleton>(res).value;
        judge(c, "adjoint_gap", std::abs(s.pair(xs, v) - s.pair(y, frechet_apply(s, inst.set, inst.xbar, v))),
              ctx.tol(1e-8) * std::max(1.0, s.norm(y) * s.norm(v)));
        const Eigen::MatrixXd jac = fd_jacobian(s, inst.set, inst.xbar);
        const Vec fd_adj = (jac.transpose() * s.weights().cwiseProduct(y.coords())).cwiseQuotient(s.weights());
        judge(c, "fd_adjoint_gap", s.norm(Dual(fd_adj) - xs), ctx.tol(1e-4) * std::max(1.0, s.norm(xs)));
      });
    }
  }
}

inline Status verdict_status(Verdict analytic, bool oracle_member_ok, bool oracle_rejected) {
  switch (analytic) {
    case Verdict::Member: return oracle_member_ok ? Status::Pass : Status::Fail;
    case Verdict::NotMember: return oracle_rejected ? Status::Pass : Status::Fail;
    case Verdict::Undetermined: return Status::Undetermined;
  }
  return Status::Fail;
}

// Analytic θ*-verdict against the oracle for a radial boundary query.
inline void radial_membership_case(CaseResult& c, const Space& s, const ConvexSet& set, const Primal& xbar,
                                   const DualQuery& q) {
  const CoderivResult res = coderivative(s, set, xbar, q.ystar);
  const auto& m = std::get<ThetaMembership>(res);
  c.labels["construction"] = q.label;
  c.labels["verdict"] = verdict_name(m.verdict);
  for (const auto& cond : m.certificates) c.metrics["cert." + cond.name] = cond.slack;
  const OracleVerdict v = oracle_check(c, s, set, xbar, Dual::zero(s.dim()), q.ystar, m.verdict == Verdict::Member);
  c.status = verdict_status(m.verdict, !v.rejected() && v.final_max() <= OracleConfig{}.accept_threshold,
                            v.rejected());
  if (m.verdict == Verdict::Member) {
    const Condition* al = m.find("negative_alignment_with_J");
    require(c, "member_aligned_with_minus_J", al && al->holds);
  }
}

inline void empty_fiber_check(SuiteContext& ctx, SetKind kind) {
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("empty-fiber", uk, "coderivative.empty_fiber_at_duality_image", [&](CaseResult& c) {
      const Instance inst = gen_instance(kind, Region::Boundary, ctx.seed("empty-fiber", uk), ctx.params());
      const Space& s = inst.space;
      const Dual j = s.duality_map(inst.xbar);
      require(c, "closed_form_empty", std::holds_alternative<EmptySet>(coderivative(s, inst.set, inst.xbar, j)));
      Rng rng = ctx.rng("empty-fiber-x", uk);
      const Dual xs = gaussian_point<DualTag>(rng, s.dim());
      const CaseResult saved = c;
      oracle_check(c, s, inst.set, inst.xbar, xs, j, false);
      if (saved.status == Status::Fail) c.status = Status::Fail;
    });
  }
}

inline void suite_coderiv_ball(SuiteContext& ctx) {
  adjoint_checks(ctx, SetKind::Ball);
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    const Instance inst = gen_instance(SetKind::Ball, Region::Boundary, ctx.seed("sphere", uk), ctx.params());
    Rng rng = ctx.rng("sphere-q", uk);
    const DualQuery q = radial_queries(inst.space, Mask::all(inst.space.dim()), inst.xbar, rng, 5)[uk % 5];
    ctx.run("sphere-membership", uk, "coderivative.sphere_origin_membership",
            [&](CaseResult& c) { radial_membership_case(c, inst.space, inst.set, inst.xbar, q); });
  }
  if (std::abs(ctx.spec().p - 2.0) < 1e-15) {
    // Hilbert grid: member iff y is a negative multiple of xbar.
    for (int k = 0; k < 20; ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      ctx.run("hilbert-grid", uk, "coderivative.hilbert_parallel_negative", [&](CaseResult& c) {
        const Instance inst = gen_instance(SetKind::Ball, Region::Boundary, ctx.seed("hilbert", uk), ctx.params());
        const Space& s = inst.space;
        Rng rng = ctx.rng("hilbert-q", uk);
        const DualQuery q = radial_queries(s, Mask::all(s.dim()), inst.xbar, rng, 5)[uk % 5];
        // J is the weighted identity at p = 2, so "parallel" is tested against J(xbar)
        const Dual jx = s.duality_map(inst.xbar);
        const double a = s.pair(q.ystar, inst.xbar);
        const double nx = s.norm(inst.xbar);
        const bool parallel = s.norm(q.ystar - (a / (nx * nx)) * jx) <= 1e-9 * s.norm(q.ystar);
        const ThetaMembership m = sphere_theta_member(s, set_radius(inst.set), inst.xbar, q.ystar);
        c.labels["construction"] = q.label;
        require(c, "matches_parallel_negative_rule", (m.verdict == Verdict::Member) == (parallel && a < 0.0));
      });
    }
  }
  empty_fiber_check(ctx, SetKind::Ball);
  for (int k = 0; k < std::max(1, ctx.samples() / 5); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("fiber-nonlinearity", uk, "coderivative.fiber_not_linear", [&](CaseResult& c) {
      const Instance inst = gen_instance(SetKind::Ball, Region::Boundary, ctx.seed("nonlinear", uk), ctx.params());
      const Space& s = inst.space;
      const double r = set_radius(inst.set);
      const Dual j = s.duality_map(inst.xbar);
      require(c, "minus_J_member", sphere_theta_member(s, r, inst.xbar, -j).verdict == Verdict::Member);
      require(c, "minus_2J_member", sphere_theta_member(s, r, inst.xbar, -2.0 * j).verdict == Verdict::Member);
      require(c, "J_empty", std::holds_alternative<EmptySet>(coderiv_ball(s, r, inst.xbar, j)));
    });
  }
}

inline void suite_coderiv_cylinder(SuiteContext& ctx) {
  adjoint_checks(ctx, SetKind::Cylinder);
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    const Instance inst = gen_instance(SetKind::Cylinder, Region::Boundary, ctx.seed("iff", uk), ctx.params());
    const Mask mask = base_mask(inst.space, inst.set);
    Rng rng = ctx.rng("iff-q", uk);
    const DualQuery q = radial_queries(inst.space, mask, inst.xbar, rng, 10)[uk % 10];
    ctx.run("iff", uk, "coderivative.cylinder_origin_membership",
            [&](CaseResult& c) { radial_membership_case(c, inst.space, inst.set, inst.xbar, q); });
  }
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("full-mask-is-ball", uk, "coderivative.cylinder_full_mask_equals_ball", [&](CaseResult& c) {
      const Region regime = static_cast<Region>(k % 3);
      const Instance inst = gen_instance(SetKind::Ball, regime, ctx.seed("full-mask", uk), ctx.params());
      const Space& s = inst.space;
      const double r = set_radius(inst.set);
      Rng rng = ctx.rng("full-mask-q", uk);
      std::vector<Dual> qs{Dual::zero(s.dim()), s.duality_map(inst.xbar), -s.duality_map(inst.xbar)};
      for (int j = 0; j < 5; ++j) qs.push_back(gaussian_point<DualTag>(rng, s.dim()));
      bool same = true;
      for (const Dual& y : qs) {
        const CoderivResult b = coderiv_ball(s, r, inst.xbar, y);
        const CoderivResult cy = coderiv_cylinder(s, r, Mask::all(s.dim()), inst.xbar, y);
        if (b.index() != cy.index()) {
          same = false;
        } else if (const auto* sb = std::get_if<Singleton>(&b)) {
          same = same && s.norm(sb->value - std::get<Singleton>(cy).value) <= 1e-14 * std::max(1.0, s.norm(y));
        } else if (const auto* mb = std::get_if<ThetaMembership>(&b)) {
          same = same && mb->verdict == std::get<ThetaMembership>(cy).verdict;
        }
      }
      c.labels["regime"] = region_name(regime);
      require(c, "cylinder_equals_ball", same);
    });
  }
  empty_fiber_check(ctx, SetKind::Cylinder);
}

inline void suite_coderiv_cone(SuiteContext& ctx) {
  const int count = std::max(6, ctx.samples());
  for (int k = 0; k < count; ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("origin-membership", uk, "coderivative.cone_origin_membership", [&](CaseResult& c) {
      const Space s = ctx.space("origin-membership", uk);
      Rng rng = ctx.rng("origin-membership-q", uk);
      const ConeCase cc = cone_cases(s, rng, 6)[uk % 6];
      const ThetaMembership m = cone_theta_member(s, cc.f, cc.phi);
      c.labels["construction"] = cc.label;
      c.labels["verdict"] = verdict_name(m.verdict);
      for (const auto& cond : m.certificates) c.metrics["cert." + cond.name] = cond.holds ? 1.0 : 0.0;
      const OracleVerdict v =
          oracle_check(c, s, PositiveCone{}, cc.f, Dual::zero(s.dim()), cc.phi, m.verdict == Verdict::Member);
      c.status = verdict_status(m.verdict, !v.rejected() && v.final_max() <= OracleConfig{}.accept_threshold,
                                v.rejected());
    });
  }
  for (int k = 0; k < ctx.samples(); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("zero-query", uk, "coderivative.cone_zero_query_singleton", [&](CaseResult& c) {
      const Space s = ctx.space("zero-query", uk);
      Rng rng = ctx.rng("zero-query-f", uk);
      const Primal f = gaussian_point<PrimalTag>(rng, s.dim());
      const CoderivResult res = coderivative(s, PositiveCone{}, f, Dual::zero(s.dim()));
      require(c, "closed_form_zero", std::get<Singleton>(res).value.is_exact_zero());
      const CaseResult saved = c;
      oracle_check(c, s, PositiveCone{}, f, Dual::zero(s.dim()), Dual::zero(s.dim()), true);
      if (saved.status == Status::Fail) c.status = Status::Fail;
    });
    ctx.run("duality-image", uk, "coderivative.cone_duality_image_membership", [&](CaseResult& c) {
      const Instance inst = gen_instance(SetKind::PositiveCone, static_cast<Region>(k % 2), ctx.seed("jf", uk),
                                         ctx.params());
      const Space& s = inst.space;
      require(c, "closed_form_member", cone_jf_member(s, inst.xbar).verdict == Verdict::Member);
      const Dual j = s.duality_map(inst.xbar);
      const CaseResult saved = c;
      oracle_check(c, s, PositiveCone{}, inst.xbar, j, j, true);
      if (saved.status == Status::Fail) c.status = Status::Fail;
    });
    ctx.run("interval", uk, "coderivative.cone_interval_at_origin", [&](CaseResult& c) {
      const Space s = ctx.space("interval", uk);
      Rng rng = ctx.rng("interval-q", uk);
      const Index n = s.dim();
      Dual psi = Dual::zero(n);
      for (Index i = 0; i < n; ++i) psi[i] = (rng() % 4 == 0) ? 0.0 : uniform(rng, 0.3, 1.5);
      const auto iv = std::get<OrderInterval>(cone_interval_at_origin(s, psi));
      Dual phi = Dual::zero(n);
      for (Index i = 0; i < n; ++i) phi[i] = uniform(rng, 0.0, 1.0) * psi[i];
      const int mode = k % 3;  // 0 inside, 1 above psi, 2 below zero
      const auto at = static_cast<Index>(rng() % static_cast<std::uint64_t>(n));
      if (mode == 1) phi[at] = psi[at] + uniform(rng, 0.3, 1.0);
      if (mode == 2) phi[at] = -uniform(rng, 0.3, 1.0);
      c.labels["construction"] = mode == 0 ? "inside" : mode == 1 ? "above_upper_end" : "below_zero";
      const bool inside = interval_contains(s, iv, phi);
      require(c, "membership_matches_construction", inside == (mode == 0));
      const CaseResult saved = c;
      oracle_check(c, s, PositiveCone{}, Primal::zero(n), phi, psi, inside);
      if (saved.status == Status::Fail) c.status = Status::Fail;
    });
  }
}

inline void suite_oracle_crosscheck(SuiteContext& ctx) {
  for (SetKind kind : {SetKind::Ball, SetKind::Cylinder}) {
    for (Region regime : {Region::Interior, Region::Exterior}) {
      const std::string check = std::string("singleton-") + kind_name(kind) + "-" + region_name(regime);
      for (int k = 0; k < std::max(1, ctx.samples() / 2); ++k) {
        const auto uk = static_cast<std::uint64_t>(k);
        ctx.run(check, uk, "oracle.singleton_soundness", [&](CaseResult& c) {
          const Instance inst = gen_instance(kind, regime, ctx.seed(check, uk), ctx.params());
          Rng rng = ctx.rng(check + "-q", uk);
          const Dual y = gaussian_point<DualTag>(rng, inst.space.dim());
          const Dual xs = std::get<Singleton>(coderivative(inst.space, inst.set, inst.xbar, y)).value;
          const OracleVerdict v = oracle_check(c, inst.space, inst.set, inst.xbar, xs, y, true);
          require(c, "monotone_evidence", monotone_with_one_inversion(v.max_quotient_per_radius, 1e-9));
          require(c, "denominators_agree_in_sign", v.sign_agreement);
          judge(c, "denominator_ratio_excess", v.max_denominator_ratio - std::sqrt(2.0), 1e-12);
          judge(c, "denominator_ratio_deficit", 1.0 - v.min_denominator_ratio, 1e-12);
        });
      }
    }
  }
  for (int k = 0; k < std::max(1, ctx.samples() / 2); ++k) {
    const auto uk = static_cast<std::uint64_t>(k);
    ctx.run("perturbed-adjoint", uk, "oracle.perturbed_singleton_rejected", [&](CaseResult& c) {
      const Instance inst = gen_instance(SetKind::Ball, Region::Interior, ctx.seed("perturbed", uk), ctx.params());
      Rng rng = ctx.rng("perturbed-q", uk);
      const Dual y = gaussian_point<DualTag>(rng, inst.space.dim());
      Dual xs = y;
      xs[static_cast<Index>(uk % static_cast<std::uint64_t>(inst.space.dim()))] += 0.1;
      oracle_check(c, inst.space, inst.set, inst.xbar, xs, y, false);
    });
    ctx.run("determinism", uk, "oracle.determinism", [&](CaseResult& c) {
      const Instance inst = gen_instance(SetKind::Ball, Region::Boundary, ctx.seed("determinism", uk), ctx.params());
      Rng rng = ctx.rng("determinism-q", uk);
      const Dual xs = gaussian_point<DualTag>(rng, inst.space.dim());
      const Dual ys = gaussian_point<DualTag>(rng, inst.space.dim());
      const OracleVerdict a = test_membership(inst.space, inst.set, inst.xbar, xs, ys);
      const OracleVerdict b = test_membership(inst.space, inst.set, inst.xbar, xs, ys);
      bool same = a.max_quotient_per_radius == b.max_quotient_per_radius && a.rejected() == b.rejected();
      if (same && a.rejected()) same = a.witness->u == b.witness->u && a.witness->quotient == b.witness->quotient;
      require(c, "identical_verdicts", same);
      if (a.witness) {
        const QuotientEval q = coderiv_quotient(inst.space, inst.set, inst.xbar, xs, ys, a.witness->u);
        require(c, "witness_reproducible", q.value == a.witness->quotient);
      }
    });
  }
}

// ---------------------------------------------------------------- driver

inline void run_named(const SuiteSpec& spec, const std::string& name, std::vector<CaseResult>& out) {
  SuiteContext ctx(spec, name, out);
  if (name == "space-identities") suite_space_identities(ctx);
  else if (name == "decomposition") suite_decomposition(ctx);
  else if (name == "projections") suite_projections(ctx);
  else if (name == "derivatives") suite_derivatives(ctx);
  else if (name == "coderiv-ball") suite_coderiv_ball(ctx);
  else if (name == "coderiv-cylinder") suite_coderiv_cylinder(ctx);
  else if (name == "coderiv-cone") suite_coderiv_cone(ctx);
  else if (name == "oracle-crosscheck") suite_oracle_crosscheck(ctx);
  else throw InvalidConfig("unknown suite '" + name + "'");
}

// Executes a suite (or all of them). Coverage counters are reset first so
// the summary reflects this run only; cases come out sorted by id.
inline Report run_suite(const SuiteSpec& spec) {
  spec.validate();
  coverage::reset();
  Report rep;
  rep.suite = spec.suite;
  rep.timestamp = utc_timestamp();
  rep.config = spec.to_json();
  if (spec.suite == "all") {
    for (const auto& name : kSuiteNames)
      if (name != "all") run_named(spec, name, rep.cases);
  } else {
    run_named(spec, spec.suite, rep.cases);
  }
  rep.coverage = coverage::snapshot();
  if (spec.suite == "all") {
    CaseResult c;
    c.id = "all/coverage/000";
    c.anchor = "harness.operation_coverage";
    c.repro = spec.command_line("all");
    std::string missing;
    for (const auto& [op, count] : rep.coverage)
      if (count == 0) missing += (missing.empty() ? "" : ",") + op;
    c.metrics["untouched_operations"] = missing.empty() ? 0.0 : 1.0 + static_cast<double>(std::count(missing.begin(), missing.end(), ','));
    if (!missing.empty()) {
      c.status = Status::Fail;
      c.labels["untouched"] = missing;
    }
    rep.cases.push_back(std::move(c));
  }
  std::stable_sort(rep.cases.begin(), rep.cases.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return rep;
}

}  // namespace projcalc::harness
