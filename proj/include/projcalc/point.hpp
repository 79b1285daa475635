#pragma once

#include <cmath>
#include <initializer_list>
#include <string>

#include <Eigen/Dense>

#include "projcalc/errors.hpp"

namespace projcalc {

using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

struct PrimalTag {};
struct DualTag {};

// A coordinate vector tagged with the space it lives in. Primal and dual
// points share a representation but never mix implicitly: pairings and
// norms only accept the matching tag.
template <class Tag>
class Point {
 public:
  Point() = default;
  explicit Point(Vec coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> values) : coords_(static_cast<Index>(values.size())) {
    Index i = 0;
    for (double v : values) coords_[i++] = v;
  }

  static Point zero(Index n) { return Point(Vec::Zero(n)); }
  static Point unit(Index n, Index i) {
    Vec c = Vec::Zero(n);
    c[i] = 1.0;
    return Point(std::move(c));
  }

  Index size() const { return coords_.size(); }
  const Vec& coords() const { return coords_; }
  Vec& coords() { return coords_; }

  double operator[](Index i) const { return coords_[i]; }
  double& operator[](Index i) { return coords_[i]; }

  bool all_finite() const { return coords_.allFinite(); }
  bool is_exact_zero() const { return (coords_.array() == 0.0).all(); }

  Point& operator+=(const Point& o) {
    check_same_size(o);
    coords_ += o.coords_;
    return *this;
  }
  Point& operator-=(const Point& o) {
    check_same_size(o);
    coords_ -= o.coords_;
    return *this;
  }
  Point& operator*=(double s) {
    coords_ *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator-(Point a) {
    a.coords_ = -a.coords_;
    return a;
  }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator/(Point a, double s) { return a *= (1.0 / s); }

  friend bool operator==(const Point& a, const Point& b) {
    return a.size() == b.size() && a.coords_ == b.coords_;
  }

 private:
  void check_same_size(const Point& o) const {
    if (o.size() != size())
      throw DimensionMismatch("point sizes differ: " + std::to_string(size()) + " vs " +
                              std::to_string(o.size()));
  }

  Vec coords_;
};

using Primal = Point<PrimalTag>;
using Dual = Point<DualTag>;

// Reinterprets coordinates across the primal/dual boundary. Only for the
// places where the math itself identifies the two (p = 2, masks, signs).
template <class To, class From>
Point<To> retag(const Point<From>& p) {
  return Point<To>(p.coords());
}

}  // namespace projcalc
