#pragma once

// Closed-form results for the vacation queue: queue-length p.g.f., the
// two-exponential sojourn-time mixture, the age cross-moment decomposition
// E(A*B) + E(A*Y), and the assembled average age of both streams.

#include <cmath>
#include <cstddef>
#include <vector>

#include "agevac/errors.hpp"
#include "agevac/model.hpp"

namespace agevac {

namespace detail {
inline double sq(double x) { return x * x; }

// Coefficients of the sojourn quadratic z^2 + b z + c. Both roots are strictly
// negative exactly when the system is stable.
inline double sojourn_b(const SystemParams& p) { return p.w + p.s + p.mu1 - p.lambda1; }
inline double sojourn_c(const SystemParams& p) {
  return p.w * p.mu1 - p.lambda1 * p.w - p.lambda1 * p.s;
}

// mu1 * pi_B(0), the common prefactor of the sojourn transform.
inline double mixture_prefactor(const SystemParams& p) {
  return stability_margin(p) / (1.0 + p.s / p.w);
}

constexpr double kDegenerateRootTol = 1e-9;  // on disc/(alpha1+alpha2)^2

inline bool roots_near_degenerate(const SystemParams& p) {
  if (p.s == 0.0) return false;  // handled symbolically, no weight blow-up
  const double b = sojourn_b(p);
  const double disc = b * b - 4.0 * sojourn_c(p);
  return disc < kDegenerateRootTol * b * b;
}
}  // namespace detail

// Probability that the server is available with an empty queue.
inline double pi_b0(const SystemParams& p) {
  require_stable(p);
  return stability_margin(p) / (p.mu1 * (1.0 + p.s / p.w));
}

// Probability that the server is on vacation with an empty queue; satisfies
// the level-0 balance identity (lambda1 + w) * pi_v0 = s * pi_b0.
inline double pi_v0(const SystemParams& p) {
  require_stable(p);
  return p.s * stability_margin(p) / ((p.lambda1 + p.w) * p.mu1 * (1.0 + p.s / p.w));
}

// P(x) = E(x^N) for the number of stream-1 packets in the system.
inline double pgf_eval(const SystemParams& p, double x) {
  require_stable(p);
  if (!(x >= 0.0 && x <= 1.0)) raise(errc::invalid_config, "pgf argument x must lie in [0, 1]");
  const double l = p.lambda1, m = p.mu1;
  const double num = m * pi_b0(p) * (l + p.w + p.s - l * x);
  const double den = l * l * x * x - (l * p.w + l * l + l * p.s + l * m) * x + l * m + p.w * m;
  return num / den;
}

// Sojourn-time density f_T(t) = c1*exp(alpha1*t) + c2*exp(alpha2*t) with
// alpha1 >= alpha2 (alpha1 is the slow, dominant exponent).
struct SojournMixture {
  double alpha1 = 0;
  double alpha2 = 0;
  double c1 = 0;
  double c2 = 0;
  SystemParams params;

  double density(double t) const {
    return c1 * std::exp(alpha1 * t) + c2 * std::exp(alpha2 * t);
  }
  double cdf(double t) const {
    return 1.0 + (c1 / alpha1) * std::exp(alpha1 * t) + (c2 / alpha2) * std::exp(alpha2 * t);
  }
  // Laplace transform E(exp(-zT)).
  double laplace(double z) const { return c1 / (z - alpha1) + c2 / (z - alpha2); }
  double total_mass() const { return c1 / -alpha1 + c2 / -alpha2; }
  double mean() const { return c1 / (alpha1 * alpha1) + c2 / (alpha2 * alpha2); }
  double second_moment() const {
    return -2.0 * c1 / (alpha1 * alpha1 * alpha1) - 2.0 * c2 / (alpha2 * alpha2 * alpha2);
  }
};

inline SojournMixture sojourn_mixture(const SystemParams& p) {
  require_stable(p);
  if (p.s == 0.0) {
    // No vacations: sojourn is Exp(mu1 - lambda1); the w-root carries zero
    // weight and is kept only to preserve the two-root shape.
    const double a = -(p.mu1 - p.lambda1);
    const double c = p.mu1 - p.lambda1;
    if (a >= -p.w) return {a, -p.w, c, 0.0, p};
    return {-p.w, a, 0.0, c, p};
  }
  const double b = detail::sojourn_b(p);
  const double c = detail::sojourn_c(p);
  const double disc = b * b - 4.0 * c;
  if (disc < detail::kDegenerateRootTol * b * b) {
    raise(errc::near_degenerate_roots,
          "sojourn roots nearly coincide; mixture weights are ill-conditioned");
  }
  // b > 0 under stability, so the subtraction-free root comes first.
  const double alpha2 = -0.5 * (b + std::sqrt(disc));
  const double alpha1 = c / alpha2;
  const double kappa = detail::mixture_prefactor(p);
  const double k = p.w + p.s;
  const double c1 = kappa * (k + alpha1) / (alpha1 - alpha2);
  const double c2 = kappa * (k + alpha2) / (alpha2 - alpha1);
  return {alpha1, alpha2, c1, c2, p};
}

// E(A*B), the interarrival/waiting cross-moment. Evaluated through the
// divided difference of g(z) = (w+s+z) / (z^2 (z-lambda1)^2) between the two
// sojourn roots, reduced to the symmetric functions e1 = alpha1+alpha2 and
// e2 = alpha1*alpha2 so the expression stays finite when the roots collide.
inline double expected_ab(const SystemParams& p) {
  require_stable(p);
  const double l = p.lambda1;
  const double e1 = -detail::sojourn_b(p);
  const double e2 = detail::sojourn_c(p);
  const double k = p.w + p.s;
  const double u = e1 - l;
  const double v = (u * (2.0 * k * e2 - (k * e1 + e2) * u) + e2 * e2);
  const double m = e2 - l * e1 + l * l;  // (alpha1-l)(alpha2-l)
  return l * detail::mixture_prefactor(p) * v / (e2 * e2 * m * m);
}

// E(A*Y), the interarrival/virtual-service cross-moment, conditioned on
// whether the arriving packet finds the system empty and on vacation.
inline double expected_ay(const SystemParams& p) {
  require_stable(p);
  const double l = p.lambda1, m = p.mu1, s = p.s, w = p.w;
  const double margin = stability_margin(p);
  const double kden = (l + w) * (m * (1.0 + s / w));
  return (s + w + m) * s * margin / ((l * w * m) * kden) +
         (s + w) / (l * w * m) * (1.0 - s * margin / kden);
}

// Average age of the monitored stream, assembled from the literal four-term
// closed form. Falls back to the root-symmetric AB term when the mixture
// weights are ill-conditioned.
inline double average_age_stream1(const SystemParams& p) {
  require_stable(p);
  const double l = p.lambda1, m = p.mu1, s = p.s, w = p.w;
  double term_ab;
  if (detail::roots_near_degenerate(p)) {
    term_ab = l * expected_ab(p);
  } else {
    const SojournMixture mix = sojourn_mixture(p);
    term_ab = l * l * mix.c1 / (detail::sq(mix.alpha1) * detail::sq(mix.alpha1 - l)) +
              l * l * mix.c2 / (detail::sq(mix.alpha2) * detail::sq(mix.alpha2 - l));
  }
  const double margin = stability_margin(p);
  const double frac = (m * s * margin + (s + w) * (l + w) * (m * (1.0 + s / w))) /
                      ((w * m) * (l + w) * (m * (1.0 + s / w)));
  return term_ab + 1.0 / l + frac;
}

// Average age of the relayed stream under LCFS-preemptive service
// (an M/M/1/1 queue): 1/mu2 + 1/lambda2.
inline double average_age_stream2(double lambda2, double mu2) {
  if (!std::isfinite(lambda2) || !std::isfinite(mu2))
    raise(errc::non_finite_rate, "stream-2 rates must be finite");
  if (lambda2 <= 0 || mu2 <= 0) raise(errc::non_positive_rate, "stream-2 rates must be > 0");
  return 1.0 / mu2 + 1.0 / lambda2;
}

// Average age of stream 1 when the vacation process is a preemptive relayed
// stream. Definitionally the substitution s = lambda2, w = mu2.
inline double average_age_app2(double lambda1, double mu1, double lambda2, double mu2) {
  return average_age_stream1(relay_params(lambda1, mu1, lambda2, mu2));
}

// Power-series coefficients pi(i) = pi_B(i) + pi_V(i) of the p.g.f., obtained
// from the explicit partial-fraction expansion: the poles in x are
// x_j = 1 - alpha_j/lambda1, and pi(i) = sum_j (c_j/lambda1) x_j^-(i+1).
inline std::vector<double> pgf_coefficients(const SystemParams& p, std::size_t count) {
  const SojournMixture mix = sojourn_mixture(p);
  const double l = p.lambda1;
  const double x1 = 1.0 - mix.alpha1 / l;
  const double x2 = 1.0 - mix.alpha2 / l;
  const double r1 = mix.c1 / l;
  const double r2 = mix.c2 / l;
  std::vector<double> coef(count);
  double p1 = 1.0 / x1, p2 = 1.0 / x2;
  for (std::size_t i = 0; i < count; ++i) {
    coef[i] = r1 * p1 + r2 * p2;
    p1 /= x1;
    p2 /= x2;
  }
  return coef;
}

// Everything cmd_analyze prints, bundled.
struct AgeBreakdown {
  double pi_b0 = 0;
  double pi_v0 = 0;
  double e_ab = 0;            // E(A*B), time^2
  double e_ay = 0;            // E(A*Y), time^2
  double e_y_busy = 0;        // E(Y | arrival does not find state (0,V))
  double e_y_vac = 0;         // E(Y | arrival finds state (0,V)) = e_y_busy + 1/w
  double p_uninterrupted = 0; // mu1/(mu1+s), service wins the race against the vacation timer
  double delta1 = 0;          // average age of stream 1
};

inline AgeBreakdown age_breakdown(const SystemParams& p) {
  AgeBreakdown b;
  b.pi_b0 = pi_b0(p);
  b.pi_v0 = pi_v0(p);
  b.e_ab = expected_ab(p);
  b.e_ay = expected_ay(p);
  b.e_y_busy = (p.s + p.w) / (p.w * p.mu1);
  b.e_y_vac = b.e_y_busy + 1.0 / p.w;
  b.p_uninterrupted = p.mu1 / (p.mu1 + p.s);
  b.delta1 = average_age_stream1(p);
  return b;
}

}  // namespace agevac
