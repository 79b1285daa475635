// Project onto a ball in l_3, then evaluate the coderivative at the exterior
// point and check the result with the sampled oracle.
#include <iostream>

#include "projcalc/coderivative.hpp"
#include "projcalc/limsup_oracle.hpp"
#include "projcalc/smooth_calculus.hpp"

int main() {
  using namespace projcalc;
  const Space space(3, 3.0);
  const ConvexSet ball = Ball{1.0};
  const Primal x{2.0, -1.0, 0.5};

  const Primal px = project(space, ball, x);
  std::cout << "P(x) = " << px.coords().transpose() << "  norm " << space.norm(px) << "\n";

  const Primal v{0.0, 1.0, 0.0};
  std::cout << "DP(x)v = " << frechet_apply(space, ball, x, v).coords().transpose() << "\n";

  const Dual ystar{0.0, 1.0, 0.0};
  const CoderivResult d = coderivative(space, ball, x, ystar);
  const Dual xstar = std::get<Singleton>(d).value;
  std::cout << "D*P(x)(y*) = " << xstar.coords().transpose() << "\n";

  const OracleVerdict verdict = test_membership(space, ball, x, xstar, ystar);
  std::cout << "oracle: " << (verdict.rejected() ? "rejected" : "not rejected")
            << ", final max quotient " << verdict.final_max() << "\n";
}
