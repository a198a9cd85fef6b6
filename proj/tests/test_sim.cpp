#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "agevac/analytic.hpp"
#include "agevac/sim.hpp"
#include "agevac/stats.hpp"

using namespace agevac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SimConfig base_config(SystemParams p, std::uint64_t packets, unsigned reps = 1,
                      std::uint64_t seed = 12345) {
  SimConfig cfg;
  cfg.params = p;
  cfg.packets = packets;
  cfg.replications = reps;
  cfg.seed = seed;
  return cfg;
}

bool summaries_identical(const SimSummary& a, const SimSummary& b) {
  return a.avg_age_stream1 == b.avg_age_stream1 && a.e_at == b.e_at && a.e_ab == b.e_ab &&
         a.e_ay == b.e_ay && a.e_t == b.e_t && a.e_t2 == b.e_t2 &&
         a.vacation_fraction_emp == b.vacation_fraction_emp && a.n_retained == b.n_retained &&
         a.window == b.window && a.interruption_hist == b.interruption_hist;
}

}  // namespace

TEST_CASE("identical seed and config reproduce bit-identical summaries") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 20'000);
  const SimSummary a = run_replication(cfg, 0);
  const SimSummary b = run_replication(cfg, 0);
  CHECK(summaries_identical(a, b));
  const SimSummary c = run_replication(cfg, 1);  // a different substream
  CHECK_FALSE(a.avg_age_stream1 == c.avg_age_stream1);
}

TEST_CASE("invalid configurations are rejected") {
  SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 0);
  CHECK_THROWS_AS(validate_config(cfg), Error);
  cfg.packets = 100;
  cfg.replications = 0;
  CHECK_THROWS_AS(validate_config(cfg), Error);
  cfg.replications = 1;
  cfg.time_limit = -1.0;
  CHECK_THROWS_AS(validate_config(cfg), Error);
  cfg.time_limit = 0;
  cfg.params.lambda1 = -1;
  CHECK_THROWS_AS(validate_config(cfg), Error);
}

TEST_CASE("M/M/1 anchor: simulated age approaches 3.5") {
  const SimConfig cfg = base_config({0.5, 1.0, 0.0, 1.0}, 400'000, 4);
  const ExperimentSummary sum = run_experiment(cfg);
  CHECK_THAT(sum.avg_age_stream1.mean, WithinRel(3.5, 0.02));
  CHECK(std::fabs(sum.avg_age_stream1.mean - 3.5) <= 3 * sum.avg_age_stream1.ci95_half + 0.02);
  CHECK(sum.avg_age_stream1.mean >= 1.0 / 0.5);  // age floor: mean interarrival
  CHECK(sum.vacation_fraction.mean == 0.0);
}

TEST_CASE("vacation fraction matches s/(s+w)") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 100'000, 4);
  const ExperimentSummary sum = run_experiment(cfg);
  CHECK_THAT(sum.vacation_fraction.mean, WithinAbs(0.5, 0.005));
}

TEST_CASE("per-packet decomposition T = B + Y holds to rounding") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 50'000);
  std::vector<PacketRecord> records;
  const SimSummary sum = run_replication(cfg, 0, &records);
  CHECK(sum.max_decomp_err < 1e-9);
  REQUIRE(records.size() == 50'000);
  for (std::size_t i = 1; i < records.size(); ++i) {
    REQUIRE(records[i].t_depart >= records[i - 1].t_depart);  // FCFS order
  }
  // record fields reproduce the summary moments
  double sum_at = 0;
  for (const auto& r : records) sum_at += r.a * r.t;
  CHECK_THAT(sum_at / static_cast<double>(records.size()), WithinRel(sum.e_at, 1e-12));
}

TEST_CASE("simulated age matches the closed form on the reference tuple") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 400'000, 5);
  const ExperimentSummary sum = run_experiment(cfg);
  const double analytic = average_age_stream1({0.4, 1.0, 1.0, 1.0});
  CHECK_THAT(sum.avg_age_stream1.mean, WithinRel(analytic, 0.02));
  CHECK_THAT(sum.e_ab.mean, WithinRel(expected_ab({0.4, 1.0, 1.0, 1.0}), 0.03));
  CHECK_THAT(sum.e_ay.mean, WithinRel(expected_ay({0.4, 1.0, 1.0, 1.0}), 0.03));
}

TEST_CASE("sawtooth area identity ties the integral to the cross moments") {
  // direct integral of the age curve vs lambda*E(AT) + 1/lambda
  const SimConfig cfg = base_config({0.3, 1.0, 1.0, 1.0}, 300'000, 3);
  const ExperimentSummary sum = run_experiment(cfg);
  const double via_moments = 0.3 * sum.e_at.mean + 1.0 / 0.3;
  CHECK_THAT(sum.avg_age_stream1.mean, WithinRel(via_moments, 0.01));
}

TEST_CASE("redraw and resume-remainder services are statistically equivalent") {
  SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 200'000, 3, 777);
  const ExperimentSummary redraw = run_experiment(cfg);
  cfg.resume_service = true;
  const ExperimentSummary resume = run_experiment(cfg);
  const double analytic = average_age_stream1({0.4, 1.0, 1.0, 1.0});
  CHECK_THAT(redraw.avg_age_stream1.mean, WithinRel(analytic, 0.03));
  CHECK_THAT(resume.avg_age_stream1.mean, WithinRel(analytic, 0.03));
  CHECK_THAT(resume.e_t.mean, WithinRel(redraw.e_t.mean, 0.05));
}

TEST_CASE("interruption counts follow a geometric law") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 150'000);
  const SimSummary sum = run_replication(cfg, 0);
  const double p = 1.0 / (1.0 + 1.0);  // mu1/(mu1+s)
  const auto pmf = geometric_pmf(p, kInterruptionBins);
  const Chi2Result chi2 = chi2_goodness(sum.interruption_hist, pmf);
  CAPTURE(chi2.statistic, chi2.dof);
  CHECK(chi2.statistic < chi2_quantile(0.999, chi2.dof));
}

TEST_CASE("conditional virtual service means") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 300'000, 2);
  const ExperimentSummary sum = run_experiment(cfg);
  const double e_y_busy = (1.0 + 1.0) / (1.0 * 1.0);  // (s+w)/(w mu1) = 2
  CHECK(sum.n_empty_b > 1000);
  CHECK(sum.n_empty_v > 1000);
  CHECK_THAT(sum.mean_y_empty_b.mean, WithinRel(e_y_busy, 0.02));
  CHECK_THAT(sum.mean_y_empty_v.mean, WithinRel(e_y_busy + 1.0, 0.02));
}

TEST_CASE("sojourn law matches the analytic mixture") {
  const SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 120'000);
  std::vector<PacketRecord> records;
  run_replication(cfg, 0, &records);
  const SojournGoodness g = empirical_sojourn_check(records, sojourn_mixture({0.4, 1.0, 1.0, 1.0}));
  CHECK_FALSE(g.insufficient_sample);
  CHECK(g.mean_rel_err < 0.01);
  CHECK(g.ks_distance < 0.01);
}

TEST_CASE("sojourn check flags a tiny sample") {
  const SimConfig cfg = base_config({0.5, 1.0, 0.0, 1.0}, 1'000, 1);
  std::vector<PacketRecord> records;
  run_replication(cfg, 0, &records);
  records.resize(100);
  const SojournGoodness g = empirical_sojourn_check(records, sojourn_mixture({0.5, 1.0, 0.0, 1.0}));
  CHECK(g.insufficient_sample);
}

TEST_CASE("M/M/1 sojourn is a single exponential") {
  const SimConfig cfg = base_config({0.5, 1.0, 0.0, 1.0}, 120'000);
  std::vector<PacketRecord> records;
  run_replication(cfg, 0, &records);
  const SojournGoodness g = empirical_sojourn_check(records, sojourn_mixture({0.5, 1.0, 0.0, 1.0}));
  CHECK(g.mean_rel_err < 0.01);
  CHECK(g.ks_distance < 0.01);
}

TEST_CASE("relay mode: both streams match their closed forms") {
  SimConfig cfg = base_config({0.3, 1.0, 1.0, 4.0}, 300'000, 3);
  cfg.mode = Mode::relay;
  const ExperimentSummary sum = run_experiment(cfg);
  CHECK_THAT(sum.avg_age_stream1.mean, WithinRel(average_age_app2(0.3, 1.0, 1.0, 4.0), 0.02));
  CHECK_THAT(sum.avg_age_stream2.mean, WithinRel(1.25, 0.02));  // 1/mu2 + 1/lambda2
  CHECK_THAT(sum.vacation_fraction.mean, WithinAbs(0.2, 0.005)); // s/(s+w) = 1/5
}

TEST_CASE("relay mode with no stream-2 traffic reduces to M/M/1") {
  SimConfig cfg = base_config({0.5, 1.0, 0.0, 1.0}, 100'000, 2);
  cfg.mode = Mode::relay;
  const ExperimentSummary sum = run_experiment(cfg);
  CHECK_THAT(sum.avg_age_stream1.mean, WithinRel(3.5, 0.05));
  CHECK(std::isnan(sum.avg_age_stream2.mean));  // nothing was ever delivered
}

TEST_CASE("unstable parameters are accepted but flagged") {
  SimConfig cfg = base_config({0.6, 1.0, 1.0, 1.0}, 5'000);
  const SimSummary sum = run_replication(cfg, 0);
  CHECK_FALSE(sum.params_stable);
  CHECK(sum.avg_age_stream1 > 0);
}

TEST_CASE("time-limit horizon stops on the clock") {
  SimConfig cfg = base_config({0.5, 1.0, 1.0, 1.0}, 0);
  cfg.time_limit = 50'000.0;
  cfg.warmup_packets = 1'000;
  const SimSummary sum = run_replication(cfg, 0);
  CHECK(sum.n_retained > 10'000);
  CHECK(sum.window < 50'000.0);
}

TEST_CASE("experiment aggregation") {
  SimConfig cfg = base_config({0.4, 1.0, 1.0, 1.0}, 20'000, 6);

  SECTION("single replication leaves the confidence interval undefined") {
    cfg.replications = 1;
    const ExperimentSummary sum = run_experiment(cfg);
    CHECK(std::isnan(sum.avg_age_stream1.ci95_half));
    CHECK(std::isfinite(sum.avg_age_stream1.mean));
  }

  SECTION("aggregate equals the mean of per-replication summaries") {
    const ExperimentSummary sum = run_experiment(cfg);
    REQUIRE(sum.per_rep.size() == 6);
    double acc = 0;
    std::uint64_t hist0 = 0;
    for (const auto& r : sum.per_rep) {
      acc += r.avg_age_stream1;
      hist0 += r.interruption_hist[0];
    }
    CHECK_THAT(sum.avg_age_stream1.mean, WithinRel(acc / 6.0, 1e-12));
    CHECK(sum.interruption_hist[0] == hist0);
    CHECK(std::isfinite(sum.avg_age_stream1.ci95_half));
  }

  SECTION("threaded execution reproduces the sequential results") {
    const ExperimentSummary seq = run_experiment(cfg);
    cfg.threads = 3;
    const ExperimentSummary par = run_experiment(cfg);
    CHECK(seq.avg_age_stream1.mean == par.avg_age_stream1.mean);
    CHECK(seq.e_at.mean == par.e_at.mean);
  }
}
