#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "projcalc/coverage.hpp"
#include "projcalc/errors.hpp"
#include "projcalc/point.hpp"

namespace projcalc {

inline constexpr double kMinExponent = 1.1;
inline constexpr double kMaxExponent = 10.0;

// Finite-dimensional weighted l_p space (equivalently L_p over a finite
// discrete measure with strictly positive atoms) together with its dual
// l_q, 1/p + 1/q = 1.
//
//   ||x||_p    = (sum_s w_s |x_s|^p)^(1/p)
//   <x*, x>    = sum_s w_s x*_s x_s
//   J(x)_s     = |x_s|^(p-2) x_s / ||x||_p^(p-2)
//   J*(x*)_s   = |x*_s|^(q-2) x*_s / ||x*||_q^(q-2)
//
// J and J* are mutually inverse, and both are positively homogeneous and odd.
class Space {
 public:
  Space(Index n, double p) : Space(p, Vec::Ones(n)) {}

  Space(double p, Vec weights) : p_(p), weights_(std::move(weights)) {
    const Index n = weights_.size();
    if (n < 1) throw InvalidConfig("dimension must be positive");
    if (!std::isfinite(p) || p < kMinExponent || p > kMaxExponent)
      throw InvalidConfig("exponent p=" + std::to_string(p) + " outside [1.1, 10]");
    for (Index i = 0; i < n; ++i) {
      if (!std::isfinite(weights_[i]) || !(weights_[i] > 0.0))
        throw InvalidConfig("weight " + std::to_string(i) + " is not strictly positive");
    }
    q_ = p_ / (p_ - 1.0);
  }

  Index dim() const { return weights_.size(); }
  double p() const { return p_; }
  double q() const { return q_; }
  const Vec& weights() const { return weights_; }

  // Norms at or below this are treated as the origin wherever an operation
  // has a singularity there.
  double theta_threshold() const { return 1e-12 * static_cast<double>(dim()); }

  double norm(const Primal& x) const {
    coverage::touch(coverage::Op::norm_primal);
    check(x);
    return weighted_norm(x.coords(), p_);
  }

  double norm(const Dual& xs) const {
    coverage::touch(coverage::Op::norm_dual);
    check(xs);
    return weighted_norm(xs.coords(), q_);
  }

  double pair(const Dual& xs, const Primal& x) const {
    coverage::touch(coverage::Op::pair);
    check(xs);
    check(x);
    return (weights_.array() * xs.coords().array() * x.coords().array()).sum();
  }

  Dual duality_map(const Primal& x) const {
    coverage::touch(coverage::Op::duality_map);
    check(x);
    return Dual(power_map(x.coords(), p_));
  }

  Primal duality_map_inv(const Dual& xs) const {
    coverage::touch(coverage::Op::duality_map_inv);
    check(xs);
    return Primal(power_map(xs.coords(), q_));
  }

  // Psi(x, y) = <J(x), y> / ||x||, the right derivative of t -> ||x + t y||
  // at t = 0.
  double smoothness(const Primal& x, const Primal& y) const {
    coverage::touch(coverage::Op::smoothness);
    const double nx = norm(x);
    if (nx <= theta_threshold()) throw DegenerateInput("smoothness is undefined at the origin");
    return pair(duality_map(x), y) / nx;
  }

  bool is_origin(const Primal& x) const { return norm(x) <= theta_threshold(); }
  bool is_origin(const Dual& xs) const { return norm(xs) <= theta_threshold(); }

  template <class Tag>
  void check(const Point<Tag>& x) const {
    if (x.size() != dim())
      throw DimensionMismatch("point has " + std::to_string(x.size()) +
                              " coordinates, space has " + std::to_string(dim()));
  }

 private:
  // Scaled by the largest magnitude so extreme exponents do not overflow.
  double weighted_norm(const Vec& c, double e) const {
    const double m = c.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (Index i = 0; i < c.size(); ++i) s += weights_[i] * std::pow(std::abs(c[i]) / m, e);
    return m * std::pow(s, 1.0 / e);
  }

  // |c_s|^(e-2) c_s / ||c||_e^(e-2), evaluated as sign(c_s) (|c_s|/||c||)^(e-1) ||c||.
  Vec power_map(const Vec& c, double e) const {
    const double nc = weighted_norm(c, e);
    Vec out = Vec::Zero(c.size());
    if (nc == 0.0) return out;
    for (Index i = 0; i < c.size(); ++i) {
      if (c[i] == 0.0) continue;
      const double mag = std::pow(std::abs(c[i]) / nc, e - 1.0) * nc;
      out[i] = std::copysign(mag, c[i]);
    }
    return out;
  }

  double p_;
  double q_;
  Vec weights_;
};

}  // namespace projcalc
