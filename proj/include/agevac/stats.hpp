#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace agevac {

inline double mean_of(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

inline double sample_stddev(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Normal-approximation 95% half-width across replications; NaN when n < 2.
inline double ci95_half(std::span<const double> xs) {
  const double m = mean_of(xs);
  const double sd = sample_stddev(xs, m);
  if (!std::isfinite(sd)) return std::numeric_limits<double>::quiet_NaN();
  return 1.959963984540054 * sd / std::sqrt(static_cast<double>(xs.size()));
}

struct Chi2Result {
  double statistic = 0;
  int dof = 0;
};

// Pearson chi-square of observed counts against expected probabilities.
// Trailing bins with expected count < min_expected are pooled into one.
inline Chi2Result chi2_goodness(const std::vector<std::uint64_t>& observed,
                                const std::vector<double>& expected_prob,
                                double min_expected = 5.0) {
  std::uint64_t n = 0;
  for (auto c : observed) n += c;
  double stat = 0;
  int bins = 0;
  double pooled_obs = 0, pooled_exp = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected_prob[i] * static_cast<double>(n);
    if (e >= min_expected) {
      stat += (static_cast<double>(observed[i]) - e) * (static_cast<double>(observed[i]) - e) / e;
      ++bins;
    } else {
      pooled_obs += static_cast<double>(observed[i]);
      pooled_exp += e;
    }
  }
  if (pooled_exp > 0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++bins;
  }
  return {stat, bins > 1 ? bins - 1 : 1};
}

// Wilson-Hilferty approximation of the chi-square quantile; adequate for
// goodness thresholds at the dof used here.
inline double chi2_quantile(double prob, int dof) {
  // inverse normal via Acklam-style rational approximation at the few
  // probabilities we use would be overkill; hard-code common z values.
  double z;
  if (prob >= 0.9999) z = 3.719016485;
  else if (prob >= 0.999) z = 3.090232306;
  else if (prob >= 0.99) z = 2.326347874;
  else z = 1.644853627;  // 0.95
  const double d = static_cast<double>(dof);
  const double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
  return d * t * t * t;
}

}  // namespace agevac
