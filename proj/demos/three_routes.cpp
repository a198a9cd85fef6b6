// The same quantity three ways: closed form, truncated-chain solve, and
// discrete-event simulation. A quick way to convince yourself the pieces
// agree before trusting a sweep.

#include <iostream>

#include "agevac/analytic.hpp"
#include "agevac/ctmc.hpp"
#include "agevac/sim.hpp"

int main() {
  using namespace agevac;

  const SystemParams p = validate({0.3, 1.0, 1.0, 1.0});

  const double formula = pi_b0(p);
  const TruncatedDistribution dist = solve_stationary(p);

  SimConfig cfg;
  cfg.params = p;
  cfg.packets = 200'000;
  cfg.replications = 4;
  cfg.seed = 2024;
  const ExperimentSummary sim = run_experiment(cfg);

  std::cout << "pi_B(0):  closed form " << formula << " | chain " << dist.pi_b[0] << "\n"
            << "delta1:   closed form " << average_age_stream1(p) << " | simulated "
            << sim.avg_age_stream1.mean << " +- " << sim.avg_age_stream1.ci95_half << "\n"
            << "vacation: closed form " << vacation_fraction(p) << " | chain " << dist.sum_pi_v()
            << " | simulated " << sim.vacation_fraction.mean << "\n";
  return 0;
}
