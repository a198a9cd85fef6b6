#pragma once

// Model parameters for a single-stream FCFS queue whose server takes
// exponentially timed vacations: arrivals at rate lambda1, service at rate
// mu1, vacations start at rate s and end at rate w. All four rates share one
// implicit time unit. The relay application maps a second stream onto the
// vacation process via s = lambda2, w = mu2.

#include <cmath>
#include <string>

#include "agevac/errors.hpp"

namespace agevac {

struct SystemParams {
  double lambda1 = 0;  // stream-1 generation rate, > 0
  double mu1 = 0;      // stream-1 service rate, > 0
  double s = 0;        // vacation-start rate, >= 0 (0 = plain M/M/1)
  double w = 0;        // vacation-end rate, > 0

  bool operator==(const SystemParams&) const = default;
};

inline SystemParams validate(SystemParams p) {
  auto check_finite = [](double v, const char* name) {
    if (!std::isfinite(v)) raise(errc::non_finite_rate, std::string(name) + " must be finite");
  };
  check_finite(p.lambda1, "lambda1");
  check_finite(p.mu1, "mu1");
  check_finite(p.s, "s");
  check_finite(p.w, "w");
  if (p.lambda1 <= 0) raise(errc::non_positive_rate, "lambda1 must be > 0");
  if (p.mu1 <= 0) raise(errc::non_positive_rate, "mu1 must be > 0");
  if (p.w <= 0) raise(errc::non_positive_rate, "w must be > 0 (mean vacation duration must be finite)");
  if (p.s < 0) raise(errc::non_positive_rate, "s must be >= 0");
  return p;
}

// mu1 - lambda1*(1 + s/w); positive iff the queue is ergodic.
inline double stability_margin(const SystemParams& p) {
  return p.mu1 - p.lambda1 * (1.0 + p.s / p.w);
}

// The margin-zero boundary counts as unstable: every age formula diverges there.
inline bool stable(const SystemParams& p) { return stability_margin(p) > 0.0; }

inline void require_stable(const SystemParams& p) {
  validate(p);
  if (!stable(p)) {
    raise(errc::unstable,
          "parameters violate mu1 > lambda1*(1 + s/w) (margin = " +
              std::to_string(stability_margin(p)) + ")");
  }
}

// Long-run fraction of time the server is on vacation, s/(s+w). Depends on the
// ratio s/w only; equals the throughput fraction available to the relayed stream.
inline double vacation_fraction(const SystemParams& p) {
  return p.s / (p.s + p.w);
}

enum class Mode { vacation, relay };

inline const char* mode_name(Mode m) { return m == Mode::vacation ? "vacation" : "relay"; }

// Relay application: stream-2 arrivals play the role of vacation starts and
// stream-2 service completions the role of vacation ends.
inline SystemParams relay_params(double lambda1, double mu1, double lambda2, double mu2) {
  return validate({lambda1, mu1, lambda2, mu2});
}

struct Regime {
  Mode tag = Mode::vacation;
  double lambda2 = 0;  // relay only
  double mu2 = 0;      // relay only

  static Regime vacation() { return {}; }
  static Regime relay(double lambda2, double mu2) { return {Mode::relay, lambda2, mu2}; }

  // For relay, produces the SystemParams with s = lambda2 and w = mu2,
  // bit-identical to constructing vacation params directly.
  SystemParams apply(double lambda1, double mu1, double s = 0, double w = 0) const {
    if (tag == Mode::relay) return relay_params(lambda1, mu1, lambda2, mu2);
    return validate({lambda1, mu1, s, w});
  }
};

}  // namespace agevac
