#include <cmath>

#include <gtest/gtest.h>

#include "projcalc/coderivative.hpp"
#include "projcalc/harness/instances.hpp"
#include "projcalc/limsup_oracle.hpp"
#include "test_support.hpp"

namespace projcalc {
namespace {

using harness::gen_instance;
using harness::SetKind;
using harness::WeightsMode;
using testing::kExponents;
using testing::random_dual;
using testing::random_primal;

TEST(OracleConfig, Validation) {
  OracleConfig c;
  EXPECT_NO_THROW(c.validate());
  c.radii = {1e-2, 1e-1};
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = {};
  c.radii = {1e-1};
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = {};
  c.accept_threshold = 0.1;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = {};
  c.radii = {1e-1, 0.0};
  EXPECT_THROW(c.validate(), InvalidConfig);
}

TEST(CoderivQuotient, Examples) {
  const Space s(2, 2.0);
  const ConvexSet ball = Ball{1};
  EXPECT_EQ(coderiv_quotient(s, ball, Primal{1, 0}, Dual::zero(2), Dual::zero(2), Primal{1.3, 0.2}).value, 0.0);
  EXPECT_NEAR(coderiv_quotient(s, ball, Primal{0.1, 0}, Dual{2, 3}, Dual{2, 3}, Primal{0.11, -0.02}).value, 0.0,
              1e-15);

  // P(u) = (c, t c) with c = 1/sqrt(1+t^2); numerator -t c, denominator t + ||(c - 1, t c)||
  const double t = 1e-3;
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double expected = -t * c / (t + std::hypot(c - 1.0, t * c));
  const QuotientEval q = coderiv_quotient(s, ball, Primal{1, 0}, Dual::zero(2), Dual{0, 1}, Primal{1, t});
  EXPECT_NEAR(q.value, expected, 1e-12);
  EXPECT_NEAR(q.value, -0.5, 1e-6);
  EXPECT_GE(q.denominator_ratio, 1.0);
  EXPECT_LE(q.denominator_ratio, std::sqrt(2.0) + 1e-12);
}

TEST(CoderivQuotient, RequiresDistinctPoint) {
  const Space s(2, 2.0);
  EXPECT_THROW(coderiv_quotient(s, Ball{1}, Primal{1, 0}, Dual{1, 0}, Dual{1, 0}, Primal{1, 0}), PreconditionError);
}

TEST(TestMembership, InteriorExamples) {
  const Space s(3, 3.0);
  const Primal x{0.2, -0.1, 0.3};
  const Dual y{1, -2, 0.5};
  const OracleVerdict ok = test_membership(s, Ball{1}, x, y, y);
  EXPECT_FALSE(ok.rejected());
  EXPECT_LE(ok.final_max(), 1e-3);

  const OracleVerdict bad = test_membership(s, Ball{1}, x, y + Dual{0.1, 0, 0}, y);
  ASSERT_TRUE(bad.rejected());
  EXPECT_GE(bad.witness->quotient, 1e-2);
  // the witness reproduces its quotient
  const QuotientEval again = coderiv_quotient(s, Ball{1}, x, y + Dual{0.1, 0, 0}, y, bad.witness->u);
  EXPECT_EQ(again.value, bad.witness->quotient);
  // and points along the perturbed coordinate
  const Primal d = bad.witness->u - x;
  EXPECT_GT(d[0], 0.0);
}

TEST(TestMembership, EmptyFiberIsRejected) {
  for (double p : {1.5, 2.0, 3.0}) {
    const Space s(2, p);
    const Primal x{1, 0};
    Rng rng(9);
    for (int k = 0; k < 10; ++k) {
      const Dual xs = random_dual(rng, 2);
      const OracleVerdict v = test_membership(s, Ball{1}, x, xs, s.duality_map(x));
      EXPECT_TRUE(v.rejected()) << "p=" << p << " k=" << k;
    }
  }
}

TEST(TestMembership, DeterministicForSeed) {
  const Space s(4, 3.0);
  const Primal x{1, 0, 0, 0};
  const Dual xs{0.3, 0.1, -0.4, 0.2};
  const Dual ys{0, 1, 0, 0};
  const OracleVerdict a = test_membership(s, Ball{1}, x, xs, ys);
  const OracleVerdict b = test_membership(s, Ball{1}, x, xs, ys);
  EXPECT_EQ(a.max_quotient_per_radius, b.max_quotient_per_radius);
  EXPECT_EQ(a.argmax_probe_per_radius, b.argmax_probe_per_radius);
  ASSERT_EQ(a.rejected(), b.rejected());
  if (a.rejected()) {
    EXPECT_EQ(a.witness->u, b.witness->u);
  }
}

TEST(TestMembership, RandomDirectionsAloneStillDetectBulkViolations) {
  const Space s(3, 2.0);
  OracleConfig cfg;
  cfg.structured_probes = false;
  const OracleVerdict v = test_membership(s, Ball{1}, Primal{0.1, 0, 0}, Dual{1, 0, 0}, Dual::zero(3), cfg);
  EXPECT_TRUE(v.rejected());
}

TEST(MonotoneWithOneInversion, Basic) {
  EXPECT_TRUE(monotone_with_one_inversion({1.0, 0.5, 0.6, 0.1}));
  EXPECT_FALSE(monotone_with_one_inversion({1.0, 1.5, 0.6, 0.7}));
  EXPECT_TRUE(monotone_with_one_inversion({0.1, 0.1, 0.1}));
}

class OracleProperties : public ::testing::TestWithParam<double> {};

TEST_P(OracleProperties, SingletonsAreNotRejected) {
  const double p = GetParam();
  for (SetKind kind : {SetKind::Ball, SetKind::Cylinder}) {
    for (Region regime : {Region::Interior, Region::Exterior}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto inst = gen_instance(kind, regime, seed, {4, p, 1.0, 0.5, WeightsMode::Random});
        Rng rng = substream(seed, {5});
        const Dual y = random_dual(rng, 4);
        const Dual xs = std::get<Singleton>(coderivative(inst.space, inst.set, inst.xbar, y)).value;
        const OracleVerdict v = test_membership(inst.space, inst.set, inst.xbar, xs, y);
        EXPECT_FALSE(v.rejected());
        EXPECT_LE(v.final_max(), 1e-3);
        EXPECT_TRUE(monotone_with_one_inversion(v.max_quotient_per_radius, 1e-9));
      }
    }
  }
}

TEST_P(OracleProperties, DenominatorsAreEquivalent) {
  const double p = GetParam();
  const auto inst = gen_instance(SetKind::Ball, Region::Boundary, 1, {4, p, 1.0, 1.0, WeightsMode::Random});
  Rng rng(19);
  const OracleVerdict v =
      test_membership(inst.space, inst.set, inst.xbar, random_dual(rng, 4), random_dual(rng, 4));
  EXPECT_TRUE(v.sign_agreement);
  EXPECT_GE(v.min_denominator_ratio, 1.0);
  EXPECT_LE(v.max_denominator_ratio, std::sqrt(2.0) + 1e-12);
}

TEST_P(OracleProperties, SphereVerdictsAgree) {
  const double p = GetParam();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto inst = gen_instance(SetKind::Ball, Region::Boundary, seed, {3, p, 1.0, 1.0, WeightsMode::Random});
    const Space& s = inst.space;
    const Dual j = s.duality_map(inst.xbar);
    Rng rng = substream(seed, {8});
    const Anchor anchor(s, inst.xbar);
    Dual ortho = anchor.o_star(random_dual(rng, 3));
    ortho = ortho / s.norm(ortho);
    const std::vector<Dual> queries{-0.7 * j / s.norm(j), ortho, -j / s.norm(j) + 0.5 * ortho, 2.0 * j / s.norm(j)};
    for (const Dual& y : queries) {
      const ThetaMembership m = sphere_theta_member(s, 1.0, inst.xbar, y);
      const OracleVerdict v = test_membership(s, inst.set, inst.xbar, Dual::zero(3), y);
      if (m.verdict == Verdict::Member) {
        EXPECT_FALSE(v.rejected());
        EXPECT_LE(v.final_max(), 1e-3);
      } else {
        ASSERT_EQ(m.verdict, Verdict::NotMember);
        ASSERT_TRUE(v.rejected());
        EXPECT_GE(v.witness->quotient, 1e-2);
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Exponents, OracleProperties, ::testing::ValuesIn(kExponents));

}  // namespace
}  // namespace projcalc
