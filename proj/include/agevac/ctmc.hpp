#pragma once

// Independent numeric ground truth: the two-row Markov chain of the vacation
// queue, truncated at a finite level, solved for its stationary distribution
// by a direct banded factorization. Levels carry the stream-1 queue length;
// each level has a V (on vacation) and a B (available) state.
//
// State indexing: (i, V) -> 2i, (i, B) -> 2i + 1. Arrivals at the truncation
// level are dropped, which keeps the generator conservative; the induced bias
// is reported through tail_mass_bound.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "agevac/errors.hpp"
#include "agevac/model.hpp"

namespace agevac {

struct GeneratorSpec {
  struct Transition {
    int from;
    int to;
    double rate;
  };

  SystemParams params;
  int n_max = 0;
  std::vector<Transition> transitions;

  static int vac_state(int level) { return 2 * level; }
  static int busy_state(int level) { return 2 * level + 1; }
  static int level_of(int state) { return state / 2; }
  static bool is_vacation(int state) { return (state & 1) == 0; }
  int num_states() const { return 2 * (n_max + 1); }
};

inline GeneratorSpec build_generator(const SystemParams& params, int n_max) {
  validate(params);
  if (n_max < 2) raise(errc::invalid_config, "n_max must be >= 2");
  GeneratorSpec gen;
  gen.params = params;
  gen.n_max = n_max;
  gen.transitions.reserve(static_cast<std::size_t>(5 * n_max + 2));
  const double l = params.lambda1, m = params.mu1, s = params.s, w = params.w;
  for (int i = 0; i <= n_max; ++i) {
    const int vi = GeneratorSpec::vac_state(i);
    const int bi = GeneratorSpec::busy_state(i);
    if (i < n_max) {
      gen.transitions.push_back({bi, GeneratorSpec::busy_state(i + 1), l});
      gen.transitions.push_back({vi, GeneratorSpec::vac_state(i + 1), l});
    }
    if (s > 0) gen.transitions.push_back({bi, vi, s});
    gen.transitions.push_back({vi, bi, w});
    if (i >= 1) gen.transitions.push_back({bi, GeneratorSpec::busy_state(i - 1), m});
  }
  return gen;
}

struct TruncatedDistribution {
  int n_max = 0;
  std::vector<double> pi_b;  // pi_B(0..n_max)
  std::vector<double> pi_v;  // pi_V(0..n_max)
  double tail_mass_bound = 0;

  double total(int level) const { return pi_b[level] + pi_v[level]; }
  double sum_pi_v() const {
    double t = 0;
    for (double v : pi_v) t += v;
    return t;
  }
  double sum() const {
    double t = 0;
    for (std::size_t i = 0; i < pi_b.size(); ++i) t += pi_b[i] + pi_v[i];
    return t;
  }
};

struct SolveOptions {
  double tail_tol = 1e-12;
};

// Solves pi Q = 0, sum(pi) = 1. The balance row of the last state (n_max, B)
// is replaced by the normalization row; eliminating that bordered row reduces
// the system to a banded solve B u = c followed by a scalar correction. The
// remaining matrix is the transposed generator with one state killed, which
// is column-diagonally dominant, so factorization without pivoting is exact
// enough for the residual checks downstream.
inline TruncatedDistribution solve_stationary(const GeneratorSpec& gen,
                                              const SolveOptions& opts = {}) {
  const int n_states = gen.num_states();
  const int m = n_states - 1;  // killed state is the last index, (n_max, B)

  // Band holds A[r][r+off] for off in [-2, 2], where A = Q^T restricted to
  // the first m states; c holds the rates out of the killed state.
  std::vector<std::array<double, 5>> band(static_cast<std::size_t>(m), {0, 0, 0, 0, 0});
  std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
  std::vector<double> diag(static_cast<std::size_t>(n_states), 0.0);
  for (const auto& t : gen.transitions) diag[static_cast<std::size_t>(t.from)] -= t.rate;
  for (int j = 0; j < m; ++j) band[static_cast<std::size_t>(j)][2] = diag[static_cast<std::size_t>(j)];
  for (const auto& t : gen.transitions) {
    if (t.to >= m) continue;  // inflow into the killed state: row dropped
    if (t.from < m) {
      band[static_cast<std::size_t>(t.to)][static_cast<std::size_t>(t.from - t.to + 2)] += t.rate;
    } else {
      rhs[static_cast<std::size_t>(t.to)] += t.rate;  // c_j = Q[killed][j]
    }
  }

  // Forward elimination over the lower band (no pivoting), fused with the RHS.
  for (int k = 0; k < m; ++k) {
    const double piv = band[static_cast<std::size_t>(k)][2];
    if (!(std::fabs(piv) > 1e-300)) raise(errc::singular_system, "zero pivot in banded solve");
    for (int dr = 1; dr <= 2 && k + dr < m; ++dr) {
      const int r = k + dr;
      const double a_rk = band[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 - dr)];
      if (a_rk == 0.0) continue;
      const double f = a_rk / piv;
      band[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 - dr)] = 0.0;
      for (int dc = 1; dc <= 2 && k + dc < m; ++dc) {
        band[static_cast<std::size_t>(r)][static_cast<std::size_t>(2 - dr + dc)] -=
            f * band[static_cast<std::size_t>(k)][static_cast<std::size_t>(2 + dc)];
      }
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(k)];
    }
  }
  // Back substitution: u = B^{-1} c.
  std::vector<double> u(static_cast<std::size_t>(m), 0.0);
  for (int k = m - 1; k >= 0; --k) {
    double x = rhs[static_cast<std::size_t>(k)];
    for (int dc = 1; dc <= 2 && k + dc < m; ++dc) {
      x -= band[static_cast<std::size_t>(k)][static_cast<std::size_t>(2 + dc)] *
           u[static_cast<std::size_t>(k + dc)];
    }
    u[static_cast<std::size_t>(k)] = x / band[static_cast<std::size_t>(k)][2];
  }

  double sum_u = 0;
  for (double v : u) sum_u += v;
  const double pi_last = 1.0 / (1.0 - sum_u);
  if (!std::isfinite(pi_last) || pi_last <= 0) {
    raise(errc::singular_system, "normalization correction failed");
  }

  std::vector<double> pi(static_cast<std::size_t>(n_states), 0.0);
  for (int j = 0; j < m; ++j) pi[static_cast<std::size_t>(j)] = -u[static_cast<std::size_t>(j)] * pi_last;
  pi[static_cast<std::size_t>(m)] = pi_last;

  double total = 0;
  for (double v : pi) total += v;
  TruncatedDistribution dist;
  dist.n_max = gen.n_max;
  dist.pi_b.resize(static_cast<std::size_t>(gen.n_max + 1));
  dist.pi_v.resize(static_cast<std::size_t>(gen.n_max + 1));
  for (int i = 0; i <= gen.n_max; ++i) {
    double pv = pi[static_cast<std::size_t>(GeneratorSpec::vac_state(i))] / total;
    double pb = pi[static_cast<std::size_t>(GeneratorSpec::busy_state(i))] / total;
    if (pv < 0 || pb < 0) {
      if (pv < -1e-12 || pb < -1e-12) raise(errc::singular_system, "negative stationary probability");
      pv = std::max(pv, 0.0);
      pb = std::max(pb, 0.0);
    }
    dist.pi_v[static_cast<std::size_t>(i)] = pv;
    dist.pi_b[static_cast<std::size_t>(i)] = pb;
  }

  // Geometric-tail estimate of the probability mass beyond n_max.
  const double last = dist.total(gen.n_max);
  const double prev = dist.total(gen.n_max - 1);
  if (prev > 0 && last < prev) {
    const double r = last / prev;
    dist.tail_mass_bound = last * r / (1.0 - r);
  } else if (last == 0) {
    dist.tail_mass_bound = 0;
  } else {
    dist.tail_mass_bound = std::numeric_limits<double>::infinity();
  }
  if (!(dist.tail_mass_bound <= opts.tail_tol)) {
    raise(errc::truncation_insufficient,
          "tail mass bound " + std::to_string(dist.tail_mass_bound) + " above tolerance at n_max=" +
              std::to_string(gen.n_max));
  }
  return dist;
}

struct AutoSolveOptions {
  int n_max = 500;
  int max_n_max = 4000;
  double tail_tol = 1e-12;
};

// Retries with doubled truncation level until the tail bound passes.
inline TruncatedDistribution solve_stationary(const SystemParams& params,
                                              const AutoSolveOptions& opts = {}) {
  int n = opts.n_max;
  for (;;) {
    try {
      return solve_stationary(build_generator(params, n), SolveOptions{opts.tail_tol});
    } catch (const Error& e) {
      if (e.code() != errc::truncation_insufficient || 2 * n > opts.max_n_max) throw;
      n *= 2;
    }
  }
}

// Maximum absolute residual of the interior balance equations.
inline double verify_balance(const TruncatedDistribution& dist, const SystemParams& params) {
  const double l = params.lambda1, m = params.mu1, s = params.s, w = params.w;
  double worst = 0;
  for (int i = 0; i < dist.n_max; ++i) {
    const double prev_v = i > 0 ? dist.pi_v[static_cast<std::size_t>(i - 1)] : 0.0;
    const double prev_b = i > 0 ? dist.pi_b[static_cast<std::size_t>(i - 1)] : 0.0;
    const double mu_out = i > 0 ? m : 0.0;
    const double rv = (l + w) * dist.pi_v[static_cast<std::size_t>(i)] - l * prev_v -
                      s * dist.pi_b[static_cast<std::size_t>(i)];
    const double rb = (l + s + mu_out) * dist.pi_b[static_cast<std::size_t>(i)] -
                      m * dist.pi_b[static_cast<std::size_t>(i + 1)] - l * prev_b -
                      w * dist.pi_v[static_cast<std::size_t>(i)];
    worst = std::max(worst, std::max(std::fabs(rv), std::fabs(rb)));
  }
  return worst;
}

struct LumpabilityResult {
  int blocks = 0;
  std::vector<double> aggregated_rate;  // blocks x blocks, row-major, diagonal 0
  std::vector<double> lumped_pi;        // stationary law of the lumped chain (2 blocks only)

  double rate(int from_block, int to_block) const {
    return aggregated_rate[static_cast<std::size_t>(from_block * blocks + to_block)];
  }
};

// Verifies that aggregate rates between partition blocks are constant within
// each source block, and solves the reduced chain when it has two states.
inline LumpabilityResult check_lumpability(const GeneratorSpec& gen,
                                           const std::vector<int>& block_of,
                                           double tol = 1e-12) {
  const int n_states = gen.num_states();
  if (static_cast<int>(block_of.size()) != n_states) {
    raise(errc::invalid_config, "partition must label every state");
  }
  int blocks = 0;
  for (int b : block_of) {
    if (b < 0) raise(errc::invalid_config, "negative block label");
    blocks = std::max(blocks, b + 1);
  }

  // Per-state aggregate outflow to each block.
  std::vector<double> outflow(static_cast<std::size_t>(n_states * blocks), 0.0);
  for (const auto& t : gen.transitions) {
    outflow[static_cast<std::size_t>(t.from * blocks + block_of[static_cast<std::size_t>(t.to)])] +=
        t.rate;
  }

  LumpabilityResult result;
  result.blocks = blocks;
  result.aggregated_rate.assign(static_cast<std::size_t>(blocks * blocks), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(blocks * blocks), false);
  for (int state = 0; state < n_states; ++state) {
    const int bi = block_of[static_cast<std::size_t>(state)];
    for (int bj = 0; bj < blocks; ++bj) {
      if (bi == bj) continue;
      const double r = outflow[static_cast<std::size_t>(state * blocks + bj)];
      const std::size_t cell = static_cast<std::size_t>(bi * blocks + bj);
      if (!seen[cell]) {
        result.aggregated_rate[cell] = r;
        seen[cell] = true;
      } else if (std::fabs(r - result.aggregated_rate[cell]) > tol) {
        raise(errc::not_lumpable,
              "aggregate rate from block " + std::to_string(bi) + " to block " +
                  std::to_string(bj) + " differs across states (" +
                  std::to_string(result.aggregated_rate[cell]) + " vs " + std::to_string(r) + ")");
      }
    }
  }
  if (blocks == 2) {
    const double r01 = result.rate(0, 1);
    const double r10 = result.rate(1, 0);
    result.lumped_pi = {r10 / (r01 + r10), r01 / (r01 + r10)};
  }
  return result;
}

// The partition behind the vacation-fraction corollary: block 0 holds every
// V state, block 1 every B state.
inline std::vector<int> vacation_partition(const GeneratorSpec& gen) {
  std::vector<int> block_of(static_cast<std::size_t>(gen.num_states()));
  for (int st = 0; st < gen.num_states(); ++st) {
    block_of[static_cast<std::size_t>(st)] = GeneratorSpec::is_vacation(st) ? 0 : 1;
  }
  return block_of;
}

}  // namespace agevac
