#include <cmath>

#include <gtest/gtest.h>

#include "projcalc/coderivative.hpp"
#include "projcalc/harness/instances.hpp"
#include "projcalc/limsup_oracle.hpp"
#include "test_support.hpp"

namespace projcalc {
namespace {

using harness::gen_instance;
using harness::InstanceParams;
using harness::SetKind;
using harness::WeightsMode;
using testing::kExponents;
using testing::random_dual;
using testing::random_primal;

Dual singleton(const CoderivResult& r) {
  const auto* s = std::get_if<Singleton>(&r);
  if (!s) throw std::logic_error("expected a singleton");
  return s->value;
}

Verdict verdict_of(const CoderivResult& r) {
  const auto* m = std::get_if<ThetaMembership>(&r);
  if (!m) throw std::logic_error("expected a membership verdict");
  return m->verdict;
}

TEST(CoderivBall, Examples) {
  const Space s(2, 2.0);
  EXPECT_EQ(singleton(coderiv_ball(s, 1, Primal{0.1, 0.2}, Dual{7, -3})), (Dual{7, -3}));

  const Dual d = singleton(coderiv_ball(s, 1, Primal{2, 0}, Dual{0, 1}));
  EXPECT_NEAR(d[0], 0.0, 1e-15);
  EXPECT_NEAR(d[1], 0.5, 1e-15);
  // adjoint of the finite-difference Jacobian (unit weights, p = 2)
  const Eigen::MatrixXd jac = fd_jacobian(s, Ball{1}, Primal{2, 0});
  const Vec adj = jac.transpose() * Vec{{0.0, 1.0}};
  EXPECT_NEAR(adj[1], 0.5, 1e-8);
  EXPECT_NEAR(adj[0], 0.0, 1e-8);
}

TEST(CoderivBall, ExteriorSpecialQueries) {
  for (double p : kExponents) {
    const Space s(3, p);
    const Primal x{2, -1, 0.5};
    const double r = 0.7;
    EXPECT_LE(s.norm(singleton(coderiv_ball(s, r, x, s.duality_map(x)))), 1e-12);
    // y* orthogonal to xbar
    const Dual y{0.5, 1.0, 0.0};
    ASSERT_EQ(s.pair(y, x), 0.0);
    EXPECT_LE(s.norm(singleton(coderiv_ball(s, r, x, y)) - (r / s.norm(x)) * y), 1e-14);
  }
}

TEST(CoderivBall, BoundaryDispatch) {
  const Space s(2, 3.0);
  const Primal x{1, 0};
  EXPECT_TRUE(singleton(coderiv_ball(s, 1, x, Dual::zero(2))).is_exact_zero());
  EXPECT_TRUE(std::holds_alternative<EmptySet>(coderiv_ball(s, 1, x, s.duality_map(x))));
  EXPECT_EQ(verdict_of(coderiv_ball(s, 1, x, Dual{-0.5, 0})), Verdict::Member);
}

TEST(SphereThetaMember, Examples) {
  const Space h(2, 2.0);
  const ThetaMembership a = sphere_theta_member(h, 1, Primal{1, 0}, Dual{-1, 0});
  EXPECT_EQ(a.verdict, Verdict::Member);
  ASSERT_NE(a.find("part2_sufficient"), nullptr);
  EXPECT_TRUE(a.find("part2_sufficient")->holds);
  EXPECT_TRUE(a.find("hilbert_parallel_negative")->holds);

  const ThetaMembership b = sphere_theta_member(h, 1, Primal{1, 0}, Dual{0, 1});
  EXPECT_EQ(b.verdict, Verdict::NotMember);
  EXPECT_FALSE(b.find("hilbert_parallel_negative")->holds);

  const Space s(2, 3.0);
  const ThetaMembership c = sphere_theta_member(s, 1, Primal{1, 0}, Dual{-0.5, 0});
  EXPECT_EQ(c.verdict, Verdict::Member);
  EXPECT_NEAR(c.find("holder_equality")->slack, 0.0, 1e-15);
  // independent check with the limsup oracle
  EXPECT_FALSE(test_membership(s, Ball{1}, Primal{1, 0}, Dual::zero(2), Dual{-0.5, 0}).rejected());
}

TEST(SphereThetaMember, Preconditions) {
  const Space s(2, 2.0);
  EXPECT_THROW(sphere_theta_member(s, 1, Primal{2, 0}, Dual{-1, 0}), PreconditionError);
  EXPECT_THROW(sphere_theta_member(s, 1, Primal{1, 0}, Dual{0, 0}), PreconditionError);
}

TEST(CoderivCylinder, Examples) {
  const Space s(3, 2.0);
  const Mask m = Mask::from_indices(3, {0, 1});
  const Dual d = singleton(coderiv_cylinder(s, 1, m, Primal{3, 4, 7}, Dual{0, 0, 5}));
  EXPECT_LE(s.norm(d - Dual{0, 0, 5}), 1e-15);
  const Eigen::MatrixXd jac = fd_jacobian(s, Cylinder{1, m}, Primal{3, 4, 7});
  EXPECT_LE((jac.transpose() * Vec{{0.0, 0.0, 5.0}} - d.coords()).norm(), 1e-6);

  for (double p : kExponents) {
    const Space sp(3, p);
    const Primal x{3, 4, 7};
    const Dual jx = sp.duality_map(x);
    const Dual got = singleton(coderiv_cylinder(sp, 1, m, x, jx));
    EXPECT_LE(sp.norm(got - mask_restrict(jx, m.complement())), 1e-12);

    // boundary: y* = -J(xbar)_M is a member
    const Primal xb = harness::scale_masked_to(sp, x, m, 1.0);
    const CoderivResult res = coderiv_cylinder(sp, 1, m, xb, -mask_restrict(sp.duality_map(xb), m));
    EXPECT_EQ(verdict_of(res), Verdict::Member) << p;
  }
}

TEST(CoderivCylinder, TailMustVanish) {
  const Space s(3, 2.0);
  const Mask m = Mask::from_indices(3, {0});
  const ThetaMembership t = std::get<ThetaMembership>(coderiv_cylinder(s, 1, m, Primal{1, 2, 3}, Dual{-1, 0.5, 0}));
  EXPECT_EQ(t.verdict, Verdict::NotMember);
  EXPECT_FALSE(t.find("complement_part_vanishes")->holds);
  EXPECT_TRUE(t.find("holder_equality")->holds);
}

TEST(ConeThetaMember, Examples) {
  const Space s(2, 2.0);
  EXPECT_EQ(cone_theta_member(s, Primal{-1, -2}, Dual{1, 0}).verdict, Verdict::Member);
  const Primal f{1, 0};
  EXPECT_EQ(cone_theta_member(s, f, s.duality_map(f)).verdict, Verdict::NotMember);
  const ThetaMembership c = cone_theta_member(s, Primal{-1, 2}, Dual{0, 1});
  EXPECT_EQ(c.verdict, Verdict::NotMember);
  EXPECT_EQ(c.find("dual_vanishes_on_positive_support")->coordinates, std::vector<Index>{1});
}

TEST(ConeThetaMember, NegativeDualOnNegativeSupportIsMember) {
  // P is locally zero where f < 0, so phi there never reaches the quotient.
  const Space s(2, 2.0);
  const ThetaMembership t = cone_theta_member(s, Primal{-1, 0}, Dual{-3, 1});
  EXPECT_EQ(t.verdict, Verdict::Member);
  EXPECT_FALSE(t.find("nonatomic_rule")->holds);
  EXPECT_FALSE(test_membership(s, PositiveCone{}, Primal{-1, 0}, Dual::zero(2), Dual{-3, 1}).rejected());
  // negative dual on the zero set is not
  EXPECT_EQ(cone_theta_member(s, Primal{-1, 0}, Dual{0, -1}).verdict, Verdict::NotMember);
  EXPECT_TRUE(test_membership(s, PositiveCone{}, Primal{-1, 0}, Dual::zero(2), Dual{0, -1}).rejected());
}

TEST(ConeJfMember, Examples) {
  const Space s(2, 2.0);
  EXPECT_EQ(cone_jf_member(s, Primal{1, 2}).verdict, Verdict::Member);
  EXPECT_EQ(cone_jf_member(s, Primal::zero(2)).verdict, Verdict::Member);
  EXPECT_THROW(cone_jf_member(s, Primal{1, -1}), PreconditionError);
}

TEST(ConeInterval, Examples) {
  const Space s(2, 2.0);
  const auto iv = std::get<OrderInterval>(cone_interval_at_origin(s, Dual{1, 2}));
  EXPECT_TRUE(iv.lo.is_exact_zero());
  EXPECT_EQ(iv.hi, (Dual{1, 2}));
  EXPECT_TRUE(interval_contains(s, iv, Dual{0.5, 2}));
  EXPECT_FALSE(interval_contains(s, iv, Dual{-0.1, 1}));
  EXPECT_FALSE(interval_contains(s, iv, Dual{1.5, 1}));

  const auto pt = std::get<OrderInterval>(cone_interval_at_origin(s, Dual::zero(2)));
  EXPECT_TRUE(interval_contains(s, pt, Dual::zero(2)));
  EXPECT_FALSE(interval_contains(s, pt, Dual{1e-3, 0}));
  EXPECT_THROW(cone_interval_at_origin(s, Dual{1, -1}), PreconditionError);
}

TEST(Coderivative, GenericDispatch) {
  const Space s(2, 2.0);
  EXPECT_TRUE(std::holds_alternative<OrderInterval>(coderivative(s, PositiveCone{}, Primal::zero(2), Dual{1, 2})));
  EXPECT_TRUE(singleton(coderivative(s, PositiveCone{}, Primal{1, 0}, Dual::zero(2))).is_exact_zero());
  EXPECT_EQ(verdict_of(coderivative(s, PositiveCone{}, Primal{1, 0}, Dual{0, 1})), Verdict::Member);
  EXPECT_THROW(coderivative(s, CoordSubspace{Mask::all(2)}, Primal{1, 0}, Dual{0, 1}), UnsupportedSet);
}

class CoderivProperties : public ::testing::TestWithParam<double> {};

TEST_P(CoderivProperties, AdjointOfFrechetDerivative) {
  const double p = GetParam();
  for (SetKind kind : {SetKind::Ball, SetKind::Cylinder}) {
    for (Region regime : {Region::Interior, Region::Exterior}) {
      for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const auto inst = gen_instance(kind, regime, seed, {5, p, 1.0, 0.6, WeightsMode::Random});
        const Space& s = inst.space;
        Rng rng = substream(seed, {31});
        const Dual y = random_dual(rng, 5);
        const Primal v = random_primal(rng, 5);
        const Dual xs = singleton(coderivative(s, inst.set, inst.xbar, y));
        const double lhs = s.pair(xs, v);
        const double rhs = s.pair(y, frechet_apply(s, inst.set, inst.xbar, v));
        EXPECT_LE(std::abs(lhs - rhs), 1e-8 * std::max(1.0, s.norm(y) * s.norm(v)));

        // weighted transpose of the FD Jacobian: W^{-1} J^T W y
        const Eigen::MatrixXd jac = fd_jacobian(s, inst.set, inst.xbar);
        const Vec fd_adj = (jac.transpose() * s.weights().cwiseProduct(y.coords())).cwiseQuotient(s.weights());
        EXPECT_LE(s.norm(Dual(fd_adj) - xs), 1e-4 * std::max(1.0, s.norm(xs)));
      }
    }
  }
}

TEST_P(CoderivProperties, CylinderWithFullMaskIsBall) {
  const double p = GetParam();
  for (Region regime : {Region::Interior, Region::Boundary, Region::Exterior}) {
    const auto inst = gen_instance(SetKind::Ball, regime, 77, {4, p, 1.2, 1.0, WeightsMode::Random});
    const Space& s = inst.space;
    Rng rng(41);
    std::vector<Dual> queries{Dual::zero(4), s.duality_map(inst.xbar), -s.duality_map(inst.xbar)};
    while (queries.size() < 50) queries.push_back(random_dual(rng, 4));
    for (const Dual& y : queries) {
      const CoderivResult b = coderiv_ball(s, 1.2, inst.xbar, y);
      const CoderivResult c = coderiv_cylinder(s, 1.2, Mask::all(4), inst.xbar, y);
      ASSERT_EQ(b.index(), c.index());
      if (const auto* sb = std::get_if<Singleton>(&b)) {
        EXPECT_LE(s.norm(sb->value - std::get<Singleton>(c).value), 1e-14);
      }
      if (const auto* mb = std::get_if<ThetaMembership>(&b)) {
        EXPECT_EQ(mb->verdict, std::get<ThetaMembership>(c).verdict);
      }
    }
  }
}

TEST_P(CoderivProperties, MembershipImpliesNegativeAlignment) {
  const double p = GetParam();
  int members = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (SetKind kind : {SetKind::Ball, SetKind::Cylinder}) {
      const auto inst = gen_instance(kind, Region::Boundary, seed, {5, p, 1.0, 0.6, WeightsMode::Random});
      const Space& s = inst.space;
      const Mask m = base_mask(s, inst.set);
      const Primal xm = mask_restrict(inst.xbar, m);
      Rng rng = substream(seed, {43});
      const std::vector<Dual> queries{-uniform(rng, 0.1, 3.0) * s.duality_map(xm), random_dual(rng, 5),
                                      mask_restrict(random_dual(rng, 5), m)};
      for (const Dual& y : queries) {
        const CoderivResult res = coderivative(s, inst.set, inst.xbar, y);
        const auto* t = std::get_if<ThetaMembership>(&res);
        if (!t || t->verdict != Verdict::Member) continue;
        ++members;
        EXPECT_TRUE(t->find("negative_alignment_with_J")->holds) << t->find("negative_alignment_with_J")->slack;
      }
    }
  }
  EXPECT_GE(members, 40);
}

TEST_P(CoderivProperties, FiberIsNotLinear) {
  // -J(xbar) and -2 J(xbar) both contain the origin, their negation J(xbar) has an empty fiber.
  const double p = GetParam();
  const auto inst = gen_instance(SetKind::Ball, Region::Boundary, 3, {4, p, 1.0, 1.0, WeightsMode::Random});
  const Space& s = inst.space;
  const Dual j = s.duality_map(inst.xbar);
  EXPECT_EQ(verdict_of(coderiv_ball(s, 1.0, inst.xbar, -j)), Verdict::Member);
  EXPECT_EQ(verdict_of(coderiv_ball(s, 1.0, inst.xbar, -2.0 * j)), Verdict::Member);
  EXPECT_TRUE(std::holds_alternative<EmptySet>(coderiv_ball(s, 1.0, inst.xbar, j)));
}

INSTANTIATE_TEST_SUITE_P(Exponents, CoderivProperties, ::testing::ValuesIn(kExponents));

TEST(HilbertReduction, SphereGridMatchesParallelNegativeRule) {
  const Space s(3, 2.0);
  Rng rng(2024);
  for (int k = 0; k < 20; ++k) {
    Primal x = random_primal(rng, 3);
    x = x / s.norm(x);
    Dual y = random_dual(rng, 3);
    if (k % 4 == 0) y = -uniform(rng, 0.1, 2.0) * retag<DualTag>(x);
    if (k % 4 == 1) y = uniform(rng, 0.1, 2.0) * retag<DualTag>(x);
    if (k % 4 == 2) y = y - s.pair(y, x) * retag<DualTag>(x);
    // independent Hilbert-space rule: y parallel to x with negative pairing
    const double a = s.pair(y, x);
    const bool parallel = s.norm(y - a * retag<DualTag>(x)) <= 1e-9 * s.norm(y);
    const Verdict expected = (parallel && a < 0.0) ? Verdict::Member : Verdict::NotMember;
    EXPECT_EQ(sphere_theta_member(s, 1.0, x, y).verdict, expected) << k;
  }
}

}  // namespace
}  // namespace projcalc
