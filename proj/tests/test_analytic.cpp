#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "agevac/analytic.hpp"
#include "test_util.hpp"

using namespace agevac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SystemParams kRef{0.4, 1.0, 1.0, 1.0};   // reference tuple used throughout
const SystemParams kMm1{0.5, 1.0, 0.0, 1.0};   // plain M/M/1 anchor

// Composite-Simpson oracle for E(A*B) = int_0^inf int_a^inf a (t-a) f_T(t)
// lambda e^(-lambda a) dt da, independent of the closed form under test.
double quadrature_e_ab(const SojournMixture& mix) {
  const double l = mix.params.lambda1;
  // truncate where both exponentials are negligible
  const double t_hi = 60.0 / std::min(-mix.alpha1, -mix.alpha2) + 60.0 / l;
  const int n_outer = 4000, n_inner = 4000;
  auto inner = [&](double a) {
    const double h = (t_hi - a) / n_inner;
    double acc = 0;
    for (int i = 0; i <= n_inner; ++i) {
      const double t = a + i * h;
      const double f = (t - a) * mix.density(t);
      const double wgt = (i == 0 || i == n_inner) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += wgt * f;
    }
    return acc * h / 3.0;
  };
  const double a_hi = 60.0 / l;
  const double h = a_hi / n_outer;
  double acc = 0;
  for (int i = 0; i <= n_outer; ++i) {
    const double a = i * h;
    const double f = a * std::exp(-l * a) * inner(a);
    const double wgt = (i == 0 || i == n_outer) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += wgt * f;
  }
  return acc * h / 3.0 * l;
}

}  // namespace

TEST_CASE("pgf normalizes at x = 1") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    CHECK_THAT(pgf_eval(p, 1.0), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("pgf at x = 0 equals the empty-system probability") {
  // frozen from the truncated-chain oracle (cross-checked in test_ctmc):
  // P(0) = pi_B(0) + pi_V(0) = 0.1 + 1/14 = 6/35
  CHECK_THAT(pgf_eval(kRef, 0.0), WithinRel(0.17142857142857143, 1e-12));
  CHECK_THAT(pgf_eval(kRef, 0.0), WithinRel(pi_b0(kRef) + pi_v0(kRef), 1e-12));
}

TEST_CASE("pgf reduces to the M/M/1 geometric transform when s = 0") {
  // (1 - rho) / (1 - rho x) at rho = 0.5, x = 0.5
  CHECK_THAT(pgf_eval(kMm1, 0.5), WithinRel(2.0 / 3.0, 1e-12));
}

TEST_CASE("pgf rejects out-of-domain and unstable input") {
  CHECK_THROWS_AS(pgf_eval(kRef, 1.5), Error);
  CHECK_THROWS_AS(pgf_eval(kRef, -0.1), Error);
  try {
    pgf_eval({0.6, 1.0, 1.0, 1.0}, 0.5);
    FAIL("expected Unstable");
  } catch (const Error& e) {
    CHECK(e.code() == errc::unstable);
  }
}

TEST_CASE("pi_b0 closed form") {
  CHECK_THAT(pi_b0(kRef), WithinRel(0.1, 1e-12));          // frozen, equals the oracle value
  CHECK_THAT(pi_b0(kMm1), WithinRel(0.5, 1e-12));          // M/M/1 idle probability 1 - rho
  CHECK_THROWS_AS(pi_b0({0.5, 1.0, 1.0, 1.0}), Error);     // stability boundary rejected
}

TEST_CASE("pi_v0 closed form and level-0 balance") {
  CHECK(pi_v0({0.4, 1.0, 0.0, 1.0}) == 0.0);
  CHECK_THAT(pi_v0(kRef), WithinRel(1.0 / 14.0, 1e-12));
  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    CHECK_THAT(pi_v0(p), WithinRel(p.s * pi_b0(p) / (p.lambda1 + p.w), 1e-13));
  }
}

TEST_CASE("sojourn mixture collapses to Exp(mu1 - lambda1) when s = 0") {
  const SojournMixture mix = sojourn_mixture(kMm1);
  CHECK(mix.alpha1 == -0.5);
  CHECK(mix.c1 == 0.5);
  CHECK(mix.alpha2 == -1.0);
  CHECK(mix.c2 == 0.0);
  CHECK_THAT(mix.density(1.3), WithinRel(0.5 * std::exp(-0.5 * 1.3), 1e-14));
}

TEST_CASE("sojourn mixture frozen moments at the reference tuple") {
  const SojournMixture mix = sojourn_mixture(kRef);
  CHECK_THAT(mix.mean(), WithinRel(12.5, 1e-12));
  CHECK_THAT(mix.second_moment(), WithinRel(315.0, 1e-12));
}

TEST_CASE("sojourn mixture invariants on random stable tuples") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    SojournMixture mix;
    try {
      mix = sojourn_mixture(p);
    } catch (const Error& e) {
      REQUIRE(e.code() == errc::near_degenerate_roots);
      continue;
    }
    CAPTURE(p.lambda1, p.mu1, p.s, p.w);
    CHECK(mix.alpha1 < 0);
    CHECK(mix.alpha2 <= mix.alpha1);
    CHECK_THAT(mix.total_mass(), WithinAbs(1.0, 1e-12));  // density integrates to one
    const double b = p.w + p.s + p.mu1 - p.lambda1;
    const double c = p.w * p.mu1 - p.lambda1 * p.w - p.lambda1 * p.s;
    CHECK_THAT(mix.alpha1 + mix.alpha2, WithinRel(-b, 1e-12));
    CHECK_THAT(mix.alpha1 * mix.alpha2, WithinRel(c, 1e-12));
  }
}

TEST_CASE("sojourn mixture flags nearly coincident roots") {
  // s tiny and w = mu1 - lambda1 pins the discriminant near zero
  try {
    sojourn_mixture({0.5, 1.0, 1e-12, 0.5});
    FAIL("expected NearDegenerateRoots");
  } catch (const Error& e) {
    CHECK(e.code() == errc::near_degenerate_roots);
  }
}

TEST_CASE("expected_ab matches the quadrature oracle") {
  // frozen oracle values: quadrature of the defining double integral
  CHECK_THAT(expected_ab(kRef), WithinRel(21.755102040816327, 1e-12));
  CHECK_THAT(quadrature_e_ab(sojourn_mixture(kRef)), WithinRel(expected_ab(kRef), 1e-6));
  // s = 0: lambda1 / ((mu1-lambda1) mu1^2) = 1
  CHECK_THAT(expected_ab(kMm1), WithinRel(1.0, 1e-12));
  CHECK_THAT(quadrature_e_ab(sojourn_mixture(kMm1)), WithinRel(1.0, 1e-6));
}

TEST_CASE("expected_ab equals the explicit two-term mixture form") {
  std::mt19937_64 rng(24);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    SojournMixture mix;
    try {
      mix = sojourn_mixture(p);
    } catch (const Error&) {
      continue;
    }
    const auto sq = [](double x) { return x * x; };
    const double two_term =
        p.lambda1 * mix.c1 / (sq(mix.alpha1) * sq(mix.alpha1 - p.lambda1)) +
        p.lambda1 * mix.c2 / (sq(mix.alpha2) * sq(mix.alpha2 - p.lambda1));
    CAPTURE(p.lambda1, p.mu1, p.s, p.w);
    CHECK_THAT(expected_ab(p), WithinRel(two_term, 1e-9));
    CHECK(expected_ab(p) >= 0.0);
    ++checked;
  }
  REQUIRE(checked > 250);
}

TEST_CASE("expected_ay closed form") {
  CHECK_THAT(expected_ay(kRef), WithinRel(145.0 / 28.0, 1e-12));
  // s = 0: A and Y independent, E(AY) = 1/(lambda1 mu1)
  CHECK_THAT(expected_ay(kMm1), WithinRel(2.0, 1e-12));
}

TEST_CASE("lambda1 * expected_ay equals the assembled final fraction") {
  // re-derivation check of the combined form over the common denominator
  std::mt19937_64 rng(25);
  for (int i = 0; i < 300; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    const double margin = stability_margin(p);
    const double frac =
        (p.mu1 * p.s * margin + (p.s + p.w) * (p.lambda1 + p.w) * (p.mu1 * (1 + p.s / p.w))) /
        ((p.w * p.mu1) * (p.lambda1 + p.w) * (p.mu1 * (1 + p.s / p.w)));
    CHECK_THAT(p.lambda1 * expected_ay(p), WithinRel(frac, 1e-12));
  }
}

TEST_CASE("average age of stream 1: anchors") {
  // M/M/1 FCFS age at rho = 0.5: (1/mu)(1 + 1/rho + rho^2/(1-rho)) = 3.5
  CHECK_THAT(average_age_stream1(kMm1), WithinAbs(3.5, 1e-9));
  CHECK_THAT(average_age_stream1(kRef), WithinRel(13.273469387755102, 1e-12));
  CHECK_THAT(average_age_stream1({0.3, 1.0, 1.0, 1.0}), WithinRel(8.173865877712032, 1e-12));
}

TEST_CASE("average age agrees with the cross-moment decomposition route") {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 300; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    const double via_moments = p.lambda1 * (expected_ab(p) + expected_ay(p)) + 1.0 / p.lambda1;
    CAPTURE(p.lambda1, p.mu1, p.s, p.w);
    CHECK_THAT(average_age_stream1(p), WithinRel(via_moments, 1e-12));
  }
}

TEST_CASE("average age stays finite where the mixture degenerates") {
  const SystemParams p{0.5, 1.0, 1e-12, 0.5};
  CHECK_THROWS_AS(sojourn_mixture(p), Error);
  // continuity: at s -> 0 the value tends to the M/M/1 age with this (mu, lambda)
  CHECK_THAT(average_age_stream1(p), WithinAbs(3.5, 1e-6));
}

TEST_CASE("average age diverges toward both endpoints") {
  CHECK(average_age_stream1({1e-9, 1.0, 1.0, 1.0}) > 1e8);
  const double bound = 0.5;
  CHECK(average_age_stream1({bound * (1 - 1e-9), 1.0, 1.0, 1.0}) > 1e6);
  CHECK_THROWS_AS(average_age_stream1({0.6, 1.0, 1.0, 1.0}), Error);
}

TEST_CASE("average age scale covariance") {
  std::mt19937_64 rng(27);
  for (int i = 0; i < 100; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    const double base = average_age_stream1(p);
    for (double k : {2.0, 8.0, 0.25}) {
      const SystemParams q{k * p.lambda1, k * p.mu1, k * p.s, k * p.w};
      CHECK(average_age_stream1(q) == base / k);  // power-of-two scaling is exact
    }
    const SystemParams q{3.7 * p.lambda1, 3.7 * p.mu1, 3.7 * p.s, 3.7 * p.w};
    CHECK_THAT(average_age_stream1(q), WithinRel(base / 3.7, 1e-11));
  }
}

TEST_CASE("average age of stream 2") {
  CHECK(average_age_stream2(4.0, 4.0) == 0.5);
  CHECK(average_age_stream2(1.0, 4.0) == 1.25);
  CHECK_THAT(average_age_stream2(1e12, 4.0), WithinRel(0.25, 1e-6));
  CHECK_THROWS_AS(average_age_stream2(0.0, 4.0), Error);
  CHECK_THROWS_AS(average_age_stream2(1.0, -1.0), Error);
}

TEST_CASE("relay substitution is bit-identical") {
  CHECK(average_age_app2(0.3, 1.0, 1.0, 4.0) == average_age_stream1({0.3, 1.0, 1.0, 4.0}));
  CHECK_THAT(average_age_app2(0.3, 1.0, 1.0, 4.0), WithinRel(4.920904993690283, 1e-12));
  CHECK_THROWS_AS(average_age_app2(0.5, 1.0, 4.0, 1.0), Error);  // unstable
}

TEST_CASE("distributional transform identity links pgf and sojourn law") {
  // P(x) = P_T(lambda1 - lambda1 x), checked pointwise on two routes
  std::mt19937_64 rng(28);
  std::vector<SystemParams> tuples{kRef, kMm1, {0.3, 1.0, 1.0, 4.0}};
  for (int i = 0; i < 30; ++i) tuples.push_back(testing::draw_stable(rng));
  for (const auto& p : tuples) {
    SojournMixture mix;
    try {
      mix = sojourn_mixture(p);
    } catch (const Error&) {
      continue;
    }
    for (int k = 0; k <= 10; ++k) {
      const double x = k / 10.0;
      CHECK_THAT(pgf_eval(p, x), WithinAbs(mix.laplace(p.lambda1 - p.lambda1 * x), 1e-10));
    }
  }
}

TEST_CASE("pgf coefficients: geometric law at s = 0") {
  const auto coef = pgf_coefficients(kMm1, 30);
  for (int i = 0; i < 30; ++i) {
    CHECK_THAT(coef[static_cast<std::size_t>(i)], WithinRel(std::pow(0.5, i + 1), 1e-13));
  }
}

TEST_CASE("pgf coefficients sum toward one and stay nonnegative") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 50; ++i) {
    const SystemParams p = testing::draw_stable(rng);
    std::vector<double> coef;
    try {
      coef = pgf_coefficients(p, 2000);
    } catch (const Error&) {
      continue;
    }
    double sum = 0;
    for (double c : coef) {
      CHECK(c >= -1e-15);
      sum += c;
    }
    CHECK_THAT(sum, WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("age breakdown bundles consistent fields") {
  const AgeBreakdown b = age_breakdown(kRef);
  CHECK(b.pi_b0 > 0);
  CHECK(b.pi_v0 >= 0);
  CHECK(b.pi_b0 + b.pi_v0 < 1);
  CHECK(b.e_y_vac == b.e_y_busy + 1.0 / kRef.w);
  CHECK_THAT(b.e_y_busy, WithinRel(2.0, 1e-12));  // (s+w)/(w mu1) at the reference tuple
  CHECK_THAT(b.p_uninterrupted, WithinRel(0.5, 1e-12));
  CHECK_THAT(b.delta1, WithinRel(kRef.lambda1 * (b.e_ab + b.e_ay) + 1.0 / kRef.lambda1, 1e-12));
}
