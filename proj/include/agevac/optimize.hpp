#pragma once

// Age-minimizing generation rate. The average age is strictly convex in
// lambda1 on the stability interval and diverges at both endpoints, so a
// bracketed scalar search always succeeds: golden-section narrows the
// bracket, then bisection on a central-difference derivative polishes the
// stationary point.

#include <cmath>
#include <limits>
#include <vector>

#include "agevac/analytic.hpp"
#include "agevac/errors.hpp"
#include "agevac/model.hpp"

namespace agevac {

struct OptimizerResult {
  double lambda1_star = 0;
  double delta1_star = 0;
  double derivative_residual = 0;  // |dDelta1/dlambda1| at the optimum (central difference)
  double bracket_lo = 0;
  double bracket_hi = 0;
  int iterations = 0;

  // Dimensionless residual: the age elasticity |dDelta/dlambda| * lambda/Delta.
  double scaled_residual() const {
    return derivative_residual * lambda1_star / delta1_star;
  }
};

struct OptimizeOptions {
  double edge_fraction = 1e-6;      // clip the search interval away from the divergent endpoints
  double bracket_tol_factor = 1e-9; // stop when bracket width < factor * mu1
  int max_iterations = 200;
  double fd_step_fraction = 1e-6;   // central-difference step h = fraction * lambda1
};

inline OptimizerResult minimize_age(double mu1, double s, double w,
                                    const OptimizeOptions& opts = {}) {
  if (!std::isfinite(mu1) || !std::isfinite(s) || !std::isfinite(w)) {
    raise(errc::non_finite_rate, "rates must be finite");
  }
  if (mu1 <= 0 || w <= 0 || s < 0) raise(errc::non_positive_rate, "need mu1 > 0, w > 0, s >= 0");

  const double bound = mu1 / (1.0 + s / w);
  const auto delta = [&](double l) { return average_age_stream1({l, mu1, s, w}); };
  const auto deriv = [&](double l) {
    const double h = opts.fd_step_fraction * l;
    return (delta(l + h) - delta(l - h)) / (2.0 * h);
  };

  double lo = opts.edge_fraction * bound;
  double hi = (1.0 - opts.edge_fraction) * bound;
  if (!(lo < hi)) raise(errc::numerical_failure, "empty search interval");

  // Golden-section phase.
  constexpr double invphi = 0.6180339887498949;
  double c = hi - (hi - lo) * invphi;
  double d = lo + (hi - lo) * invphi;
  double fc = delta(c), fd = delta(d);
  int iters = 0;
  const double width_tol = opts.bracket_tol_factor * mu1;
  while (hi - lo > width_tol && iters < opts.max_iterations) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - (hi - lo) * invphi;
      fc = delta(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + (hi - lo) * invphi;
      fd = delta(d);
    }
    ++iters;
  }
  double star = 0.5 * (lo + hi);

  // Derivative-bisection polish: drives the central-difference derivative to
  // its rounding floor around the stationary point.
  {
    double a = std::max(opts.edge_fraction * bound, star - 64.0 * opts.fd_step_fraction * star);
    double b = std::min((1.0 - opts.edge_fraction) * bound, star + 64.0 * opts.fd_step_fraction * star);
    double ga = deriv(a), gb = deriv(b);
    int expand = 0;
    while (ga * gb > 0 && expand < 40) {
      const double span = b - a;
      a = std::max(opts.edge_fraction * bound, a - span);
      b = std::min((1.0 - opts.edge_fraction) * bound, b + span);
      ga = deriv(a);
      gb = deriv(b);
      ++expand;
    }
    if (ga * gb <= 0) {
      for (int i = 0; i < 100 && b - a > 1e-15 * bound; ++i) {
        const double mid = 0.5 * (a + b);
        const double gm = deriv(mid);
        if (gm == 0) {
          a = b = mid;
          break;
        }
        if (ga * gm < 0) {
          b = mid;
          gb = gm;
        } else {
          a = mid;
          ga = gm;
        }
        ++iters;
      }
      star = 0.5 * (a + b);
    }
  }

  OptimizerResult result;
  result.lambda1_star = star;
  result.delta1_star = delta(star);
  result.derivative_residual = std::fabs(deriv(star));
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  result.iterations = iters;
  if (!(result.lambda1_star > 0) || !(result.lambda1_star < bound) ||
      !std::isfinite(result.delta1_star)) {
    raise(errc::numerical_failure, "optimizer failed to locate an interior minimum");
  }
  return result;
}

// One row of the fixed-ratio vacation-granularity comparison: scale k keeps
// s/w constant at `ratio` with (s, w) = (k * ratio, k).
struct GranularityRow {
  double scale = 0;
  double s = 0;
  double w = 0;
  double lambda1_star = 0;
  double delta1_star = 0;
  double vacation_fraction = 0;
};

inline std::vector<GranularityRow> compare_vacation_granularity(double mu1, double ratio,
                                                                const std::vector<double>& scales) {
  if (!(ratio >= 0)) raise(errc::non_positive_rate, "ratio s/w must be >= 0");
  std::vector<GranularityRow> rows;
  rows.reserve(scales.size());
  for (double k : scales) {
    if (!(k > 0)) raise(errc::non_positive_rate, "scales must be > 0");
    GranularityRow row;
    row.scale = k;
    row.s = k * ratio;
    row.w = k;
    const OptimizerResult r = minimize_age(mu1, row.s, row.w);
    row.lambda1_star = r.lambda1_star;
    row.delta1_star = r.delta1_star;
    row.vacation_fraction = vacation_fraction({1.0, mu1, row.s, row.w});
    rows.push_back(row);
  }
  return rows;
}

// One row of the relay sweep: the best stream-1 rate against a stream-2 load.
struct LoadRow {
  double lambda2 = 0;
  double lambda1_star = 0;
  double delta1_star = 0;
  double delta2 = 0;  // +inf when lambda2 == 0
};

inline std::vector<LoadRow> optimal_rate_vs_load(double mu1, double mu2,
                                                 const std::vector<double>& lambda2s) {
  std::vector<LoadRow> rows;
  rows.reserve(lambda2s.size());
  for (double l2 : lambda2s) {
    if (l2 < 0) raise(errc::non_positive_rate, "lambda2 must be >= 0");
    LoadRow row;
    row.lambda2 = l2;
    const OptimizerResult r = minimize_age(mu1, l2, mu2);
    row.lambda1_star = r.lambda1_star;
    row.delta1_star = r.delta1_star;
    row.delta2 = l2 > 0 ? average_age_stream2(l2, mu2) : std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace agevac
