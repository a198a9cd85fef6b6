// Minimal library walkthrough: closed-form age breakdown and the
// age-optimal generation rate for one parameter set.

#include <iostream>

#include "agevac/analytic.hpp"
#include "agevac/optimize.hpp"

int main() {
  using namespace agevac;

  const SystemParams p = validate({0.4, 1.0, 1.0, 1.0});
  const AgeBreakdown b = age_breakdown(p);

  std::cout << "lambda1=" << p.lambda1 << " mu1=" << p.mu1 << " s=" << p.s << " w=" << p.w << "\n"
            << "  stable margin     : " << stability_margin(p) << "\n"
            << "  vacation fraction : " << vacation_fraction(p) << "\n"
            << "  E(A*B), E(A*Y)    : " << b.e_ab << ", " << b.e_ay << "\n"
            << "  average age       : " << b.delta1 << "\n";

  const OptimizerResult opt = minimize_age(p.mu1, p.s, p.w);
  std::cout << "  best rate         : lambda1* = " << opt.lambda1_star
            << " with age " << opt.delta1_star << "\n";
  return 0;
}
