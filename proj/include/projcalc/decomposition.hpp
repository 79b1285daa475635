#pragma once

#include <algorithm>
#include <cmath>

#include "projcalc/space.hpp"

namespace projcalc {

// Semi-orthogonal decompositions with respect to a fixed nonzero point xbar.
//
//   primal:  x  = a(x)  xbar  + o(x),   <J(xbar), o(x)>  = 0
//   dual:    x* = a*(x*) J(xbar) + o*(x*),  <o*(x*), xbar> = 0
//
// with a(x) = <J(xbar), x> / ||xbar||^2 and a*(x*) = <x*, xbar> / ||xbar||^2.
// J(xbar) is computed once at construction and shared by all four maps.
class Anchor {
 public:
  Anchor(Space space, Primal xbar) : space_(std::move(space)), xbar_(std::move(xbar)) {
    norm_ = space_.norm(xbar_);
    if (!(norm_ > space_.theta_threshold()))
      throw DegenerateInput("decomposition anchor must be a nonzero point");
    xbar_star_ = space_.duality_map(xbar_);
    norm_sq_ = norm_ * norm_;
  }

  const Space& space() const { return space_; }
  const Primal& xbar() const { return xbar_; }
  const Dual& xbar_star() const { return xbar_star_; }
  double xbar_norm() const { return norm_; }

  double a_coef(const Primal& x) const {
    coverage::touch(coverage::Op::a_coef);
    return space_.pair(xbar_star_, x) / norm_sq_;
  }

  Primal o_part(const Primal& x) const {
    coverage::touch(coverage::Op::o_part);
    return x - a_coef(x) * xbar_;
  }

  double a_star(const Dual& xs) const {
    coverage::touch(coverage::Op::a_star);
    return space_.pair(xs, xbar_) / norm_sq_;
  }

  Dual o_star(const Dual& xs) const {
    coverage::touch(coverage::Op::o_star);
    return xs - a_star(xs) * xbar_star_;
  }

  // Membership in the hyperplane O(xbar) = {y : <J(xbar), y> = 0}.
  bool in_O(const Primal& y, double tol = 1e-9) const {
    coverage::touch(coverage::Op::in_O);
    const double scale = std::max(1.0, norm_ * space_.norm(y));
    return std::abs(space_.pair(xbar_star_, y)) <= tol * scale;
  }

 private:
  Space space_;
  Primal xbar_;
  Dual xbar_star_;
  double norm_ = 0.0;
  double norm_sq_ = 0.0;
};

}  // namespace projcalc
