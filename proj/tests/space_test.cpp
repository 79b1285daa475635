#include <cmath>

#include <gtest/gtest.h>

#include "projcalc/space.hpp"
#include "test_support.hpp"

namespace projcalc {
namespace {

using testing::brute_norm;
using testing::kExponents;
using testing::random_primal;
using testing::random_space;

const double kCbrt2 = std::cbrt(2.0);

TEST(SpaceConfig, RejectsBadExponentAndWeights) {
  EXPECT_THROW(Space(3, 0.9), InvalidConfig);
  EXPECT_THROW(Space(3, 1.0), InvalidConfig);
  EXPECT_THROW(Space(3, 10.5), InvalidConfig);
  EXPECT_THROW(Space(0, 2.0), InvalidConfig);
  EXPECT_THROW(Space(2.0, Vec::Zero(3)), InvalidConfig);
  EXPECT_THROW(Space(2.0, Vec::Constant(2, -1.0)), InvalidConfig);
  EXPECT_NO_THROW(Space(3, 1.1));
  EXPECT_NO_THROW(Space(3, 10.0));
}

TEST(SpaceConfig, ConjugateExponent) {
  for (double p : {1.1, 1.5, 2.0, 3.0, 7.3, 10.0}) {
    const Space s(4, p);
    EXPECT_LE(std::abs(1.0 / s.p() + 1.0 / s.q() - 1.0), 1e-12) << p;
  }
}

TEST(NormPrimal, Examples) {
  EXPECT_DOUBLE_EQ(Space(2, 2.0).norm(Primal{3, 4}), 5.0);
  EXPECT_EQ(Space(5, 3.7).norm(Primal::zero(5)), 0.0);
  // (1 + 1)^(1/3)
  EXPECT_NEAR(Space(3, 3.0).norm(Primal{1, 1, 0}), kCbrt2, 1e-15);
  EXPECT_NEAR(kCbrt2, 1.259921, 1e-6);
}

TEST(NormPrimal, MatchesDirectSumAndScalesSafely) {
  Rng rng(11);
  for (double p : {1.1, 1.5, 3.0, 10.0}) {
    const Space s = random_space(rng, 7, p);
    const Primal x = random_primal(rng, 7);
    EXPECT_NEAR(s.norm(x), brute_norm(x.coords(), s.weights(), p), 1e-13 * brute_norm(x.coords(), s.weights(), p));
    // no overflow for huge entries at p = 10
    EXPECT_TRUE(std::isfinite(s.norm(1e40 * x)));
  }
}

TEST(NormDual, Examples) {
  EXPECT_DOUBLE_EQ(Space(2, 2.0).norm(Dual{3, 4}), 5.0);
  EXPECT_EQ(Space(2, 2.0).norm(Dual::zero(2)), 0.0);
  const Space s(3, 3.0);
  EXPECT_NEAR(s.norm(s.duality_map(Primal{1, 1, 0})), kCbrt2, 1e-14);
}

TEST(Pair, Examples) {
  EXPECT_EQ(Space(2, 2.0).pair(Dual{1, 0}, Primal{0, 1}), 0.0);
  EXPECT_EQ(Space(2, 3.0).pair(Dual::zero(2), Primal{4, -7}), 0.0);
  const Space w(2.0, Vec{{2.0, 1.0}});
  EXPECT_DOUBLE_EQ(w.pair(Dual{1, 1}, Primal{1, 3}), 5.0);
}

TEST(Pair, DimensionMismatchThrows) {
  const Space s(3, 2.0);
  EXPECT_THROW(s.pair(Dual{1, 2}, Primal{1, 2, 3}), DimensionMismatch);
  EXPECT_THROW(s.norm(Primal{1, 2}), DimensionMismatch);
}

TEST(DualityMap, Examples) {
  const Space h(2.0, Vec{{0.7, 1.9}});
  EXPECT_LE(h.norm(h.duality_map(Primal{3, 4}) - Dual{3, 4}), 1e-14);
  EXPECT_TRUE(Space(3, 3.0).duality_map(Primal::zero(3)).is_exact_zero());

  const Space s(3, 3.0);
  const Dual j = s.duality_map(Primal{1, 1, 0});
  const double c = std::pow(2.0, -1.0 / 3.0);
  EXPECT_NEAR(j[0], c, 1e-15);
  EXPECT_NEAR(j[1], c, 1e-15);
  EXPECT_EQ(j[2], 0.0);
  EXPECT_NEAR(c, 0.793701, 1e-6);
  EXPECT_NEAR(s.pair(j, Primal{1, 1, 0}), std::pow(2.0, 2.0 / 3.0), 1e-14);
}

TEST(DualityMapInv, Examples) {
  const Space h(2, 2.0);
  EXPECT_EQ(h.duality_map_inv(Dual{3, 4}), (Primal{3, 4}));
  EXPECT_TRUE(h.duality_map_inv(Dual::zero(2)).is_exact_zero());

  Rng rng(3);
  const Space s = random_space(rng, 6, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Primal x = random_primal(rng, 6, uniform(rng, 0.1, 10.0));
    const Primal back = s.duality_map_inv(s.duality_map(x));
    EXPECT_LE(s.norm(back - x), 1e-10 * s.norm(x));
  }
}

TEST(Smoothness, Examples) {
  EXPECT_EQ(Space(2, 2.0).smoothness(Primal{1, 0}, Primal{0, 1}), 0.0);
  const Space s(3, 3.0);
  const Primal x{1, 1, 0};
  EXPECT_NEAR(s.smoothness(x, x), s.norm(x), 1e-14);
  const Primal y{1, -1, 0};
  EXPECT_NEAR(s.smoothness(x, y), 0.0, 1e-15);
  // forward differences of the norm along y tend to the same value
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const double fd = (s.norm(x + t * y) - s.norm(x)) / t;
    EXPECT_LE(std::abs(fd), prev);
    prev = std::abs(fd);
  }
  EXPECT_LE(prev, 1e-5);
}

TEST(Smoothness, OriginIsDegenerate) {
  const Space s(3, 2.5);
  EXPECT_THROW(s.smoothness(Primal::zero(3), Primal{1, 0, 0}), DegenerateInput);
  EXPECT_THROW(s.smoothness(Primal{1e-14, 0, 0}, Primal{1, 0, 0}), DegenerateInput);
}

class SpaceProperties : public ::testing::TestWithParam<double> {};

TEST_P(SpaceProperties, DualityIdentities) {
  const double p = GetParam();
  Rng rng(static_cast<std::uint64_t>(p * 1000));
  for (Index n : {2, 8, 32}) {
    const Space s = random_space(rng, n, p);
    for (int k = 0; k < 200; ++k) {
      const Primal x = random_primal(rng, n, std::exp(uniform(rng, -3.0, 3.0)));
      const double nx = s.norm(x);
      const Dual jx = s.duality_map(x);
      EXPECT_LE(std::abs(s.pair(jx, x) - nx * nx), 1e-9 * std::max(1.0, nx * nx));
      EXPECT_LE(std::abs(s.norm(jx) - nx), 1e-9 * std::max(1.0, nx));
      const Dual xs = testing::random_dual(rng, n, std::exp(uniform(rng, -3.0, 3.0)));
      EXPECT_LE(s.norm(s.duality_map(s.duality_map_inv(xs)) - xs), 1e-8 * std::max(1.0, s.norm(xs)));
    }
  }
}

TEST_P(SpaceProperties, TwoSidedInequality) {
  const double p = GetParam();
  Rng rng(static_cast<std::uint64_t>(p * 77));
  const Space s = random_space(rng, 8, p);
  for (int k = 0; k < 300; ++k) {
    const Primal x = random_primal(rng, 8, uniform(rng, 0.1, 3.0));
    const Primal y = random_primal(rng, 8, uniform(rng, 0.1, 3.0));
    const double gap = s.norm(x) * s.norm(x) - s.norm(y) * s.norm(y);
    EXPECT_LE(2.0 * s.pair(s.duality_map(y), x - y), gap + 1e-9);
    EXPECT_LE(gap, 2.0 * s.pair(s.duality_map(x), x - y) + 1e-9);
  }
}

TEST_P(SpaceProperties, OddAndPositivelyHomogeneous) {
  const double p = GetParam();
  Rng rng(static_cast<std::uint64_t>(p * 5));
  const Space s = random_space(rng, 5, p);
  for (int k = 0; k < 50; ++k) {
    const Primal x = random_primal(rng, 5);
    const double lambda = uniform(rng, 0.01, 100.0);
    const Dual jx = s.duality_map(x);
    EXPECT_LE(s.norm(s.duality_map(-x) + jx), 1e-14 * s.norm(jx));
    EXPECT_LE(s.norm(s.duality_map(lambda * x) - lambda * jx), 1e-12 * lambda * s.norm(jx));
  }
}

TEST_P(SpaceProperties, SmoothnessIsNormDerivative) {
  const double p = GetParam();
  Rng rng(static_cast<std::uint64_t>(p * 13));
  const Space s = random_space(rng, 6, p);
  for (int k = 0; k < 50; ++k) {
    Primal x = random_primal(rng, 6);
    Primal y = random_primal(rng, 6);
    x = x / s.norm(x);
    y = y / s.norm(y);
    const double psi = s.smoothness(x, y);
    // first-order convergence: halving t roughly halves the error
    std::vector<double> err;
    for (double t : {1e-2, 1e-3, 1e-4}) err.push_back(std::abs((s.norm(x + t * y) - 1.0) / t - psi));
    EXPECT_LE(err[2], 1e-3);
    if (err[0] > 1e-9) {
      const double order = std::log10(err[0] / std::max(err[2], 1e-300)) / 2.0;
      EXPECT_GE(order, 0.9) << "p=" << p;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Exponents, SpaceProperties, ::testing::ValuesIn(kExponents));

}  // namespace
}  // namespace projcalc
