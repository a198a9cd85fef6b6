#pragma once

// Discrete-event simulation of the vacation/relay queue, the second
// independent oracle. Produces the exact piecewise-linear age integral (no
// time discretization), per-packet interarrival/sojourn/waiting/virtual
// service decompositions, vacation-time fractions, and in relay mode the age
// of the preemptively relayed stream.
//
// Each replication runs single-threaded on its own deterministic substream;
// replications may fan out across threads and are aggregated in index order,
// so results are bit-identical for a fixed seed regardless of thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "agevac/analytic.hpp"
#include "agevac/csv.hpp"
#include "agevac/errors.hpp"
#include "agevac/model.hpp"
#include "agevac/rng.hpp"
#include "agevac/stats.hpp"

namespace agevac {

struct SimConfig {
  SystemParams params;
  Mode mode = Mode::vacation;
  std::uint64_t packets = 100'000;  // stream-1 departures retained per replication
  double time_limit = 0;            // > 0: simulated-time horizon instead of packet count
  std::uint64_t warmup_packets = 0; // 0 -> max(1000, packets/20)
  std::uint64_t seed = 1;
  unsigned replications = 1;
  bool resume_service = false;      // resume the interrupted remainder instead of redrawing
  unsigned threads = 1;

  std::uint64_t effective_warmup() const {
    return warmup_packets > 0 ? warmup_packets : std::max<std::uint64_t>(1000, packets / 20);
  }
};

inline void validate_config(const SimConfig& cfg) {
  validate(cfg.params);
  if (cfg.time_limit < 0 || !std::isfinite(cfg.time_limit)) {
    raise(errc::invalid_config, "time limit must be finite and >= 0");
  }
  if (cfg.time_limit == 0 && cfg.packets < 1) raise(errc::invalid_config, "packet horizon must be >= 1");
  if (cfg.replications < 1) raise(errc::invalid_config, "replications must be >= 1");
}

struct PacketRecord {
  std::uint64_t j = 0;  // 1-based index among retained packets
  double t_arrival = 0;
  double t_depart = 0;
  double a = 0;  // interarrival
  double t = 0;  // sojourn
  double b = 0;  // waiting
  double y = 0;  // virtual service, t_depart - max(previous departure, t_arrival)
};

// What an arriving packet found. State (0,V) is the special case where the
// head-of-line wait starts with a residual vacation.
enum class ArrivalState : std::uint8_t { empty_busy = 0, empty_vacation = 1, nonempty = 2 };

inline constexpr std::size_t kInterruptionBins = 33;  // counts 0..31, last bin overflow

struct SimSummary {
  double avg_age_stream1 = std::numeric_limits<double>::quiet_NaN();
  double avg_age_stream2 = std::numeric_limits<double>::quiet_NaN();  // relay mode only
  double e_at = std::numeric_limits<double>::quiet_NaN();
  double e_ab = std::numeric_limits<double>::quiet_NaN();
  double e_ay = std::numeric_limits<double>::quiet_NaN();
  double e_t = std::numeric_limits<double>::quiet_NaN();
  double e_t2 = std::numeric_limits<double>::quiet_NaN();
  double vacation_fraction_emp = std::numeric_limits<double>::quiet_NaN();
  double mean_y_empty_b = std::numeric_limits<double>::quiet_NaN();
  double mean_y_empty_v = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t n_empty_b = 0;
  std::uint64_t n_empty_v = 0;
  std::vector<std::uint64_t> interruption_hist;  // L = 0..31, overflow in the last bin
  std::uint64_t n_retained = 0;
  double window = std::numeric_limits<double>::quiet_NaN();  // measured time span
  double max_decomp_err = 0;  // max |T - (B+Y)| / max(T, 1) over retained packets
  bool params_stable = true;
};

namespace detail {

struct QueuedPacket {
  double t_arrival;
  double interarrival;
  std::uint32_t interruptions;
  ArrivalState found;
};

}  // namespace detail

inline SimSummary run_replication(const SimConfig& cfg, std::uint64_t replication_index,
                                  std::vector<PacketRecord>* records_out = nullptr) {
  validate_config(cfg);
  const double l = cfg.params.lambda1;
  const double m = cfg.params.mu1;
  const double s = cfg.params.s;
  const double w = cfg.params.w;
  const bool relay = cfg.mode == Mode::relay;
  const std::uint64_t warmup = cfg.effective_warmup();
  const bool by_time = cfg.time_limit > 0;
  const std::uint64_t target = by_time ? std::numeric_limits<std::uint64_t>::max()
                                       : warmup + cfg.packets;
  const double inf = std::numeric_limits<double>::infinity();

  RandomStream rng(substream_seed(cfg.seed, replication_index));

  double t = 0;
  bool on_vacation = false;
  bool serving = false;
  std::deque<detail::QueuedPacket> queue;
  double t_arr1 = rng.exponential(l);
  double t_svc = inf;
  double t_vac_start = rng.exponential(s);  // in relay mode: next stream-2 arrival
  double t_vac_end = inf;                   // in relay mode: stream-2 service completion
  double remaining_service = -1;            // resume mode: leftover work of the interrupted head
  double last_arrival = 0;

  // Vacation-time and stream-2 sawtooth bookkeeping.
  double cum_vac = 0, vac_entered = 0;
  double s2_gen = 0;                 // generation time of the stream-2 packet in service
  double u2 = 0, last2 = 0, i2 = 0;  // stream-2 age: last delivered timestamp, drop time, integral
  std::uint64_t n2_delivered = 0;
  auto i2_at = [&](double at) {
    const double dt = at - last2;
    return i2 + dt * (last2 - u2) + 0.5 * dt * dt;
  };

  // Measurement window: opens at the departure completing the warmup, closes
  // at the last retained departure; both endpoints are departures, so the
  // vacation clock and the stream-2 integral are snapshotted there.
  std::uint64_t n_departed = 0;
  double prev_depart = 0, prev_depart_arrival = 0;
  bool measuring = false;
  double t0 = 0, cum_vac0 = 0, i2_0 = 0;
  double t1 = 0, cum_vac1 = 0, i2_1 = 0;
  double age_integral = 0;

  // Accumulators over retained packets.
  double sum_at = 0, sum_ab = 0, sum_ay = 0, sum_t = 0, sum_t2 = 0;
  double sum_y_eb = 0, sum_y_ev = 0;
  std::uint64_t n_eb = 0, n_ev = 0;
  std::vector<std::uint64_t> hist(kInterruptionBins, 0);
  double max_decomp_err = 0;
  std::uint64_t retained = 0;

  enum Ev { ev_completion, ev_vac_end, ev_vac_start, ev_arrival };
  for (;;) {
    // Next event; on exact floating-point ties the order below decides.
    double tn = t_svc;
    Ev ev = ev_completion;
    if (t_vac_end < tn) { tn = t_vac_end; ev = ev_vac_end; }
    if (t_vac_start < tn) { tn = t_vac_start; ev = ev_vac_start; }
    if (t_arr1 < tn) { tn = t_arr1; ev = ev_arrival; }
    if (by_time && tn > cfg.time_limit) break;
    t = tn;

    switch (ev) {
      case ev_arrival: {
        const ArrivalState found =
            queue.empty() ? (on_vacation ? ArrivalState::empty_vacation : ArrivalState::empty_busy)
                          : ArrivalState::nonempty;
        queue.push_back({t, t - last_arrival, 0, found});
        last_arrival = t;
        t_arr1 = t + rng.exponential(l);
        if (!on_vacation && !serving) {
          serving = true;
          t_svc = t + rng.exponential(m);
        }
        break;
      }

      case ev_completion: {
        const detail::QueuedPacket pkt = queue.front();
        queue.pop_front();
        remaining_service = -1;
        ++n_departed;
        if (t < prev_depart) throw std::logic_error("FCFS departure order violated");

        if (measuring) {
          // Exact sawtooth area of the linear segment between departures.
          const double dt = t - prev_depart;
          age_integral += dt * (prev_depart - prev_depart_arrival) + 0.5 * dt * dt;

          const double tt = t - pkt.t_arrival;
          const double bb = std::max(prev_depart - pkt.t_arrival, 0.0);
          const double yy = t - std::max(prev_depart, pkt.t_arrival);
          sum_at += pkt.interarrival * tt;
          sum_ab += pkt.interarrival * bb;
          sum_ay += pkt.interarrival * yy;
          sum_t += tt;
          sum_t2 += tt * tt;
          max_decomp_err = std::max(max_decomp_err, std::fabs(tt - (bb + yy)) / std::max(tt, 1.0));
          if (pkt.found == ArrivalState::empty_busy) {
            sum_y_eb += yy;
            ++n_eb;
          } else if (pkt.found == ArrivalState::empty_vacation) {
            sum_y_ev += yy;
            ++n_ev;
          }
          ++hist[std::min<std::size_t>(pkt.interruptions, kInterruptionBins - 1)];
          ++retained;
          if (records_out) {
            records_out->push_back({retained, pkt.t_arrival, t, pkt.interarrival, tt, bb, yy});
          }
          t1 = t;
          cum_vac1 = cum_vac;
          if (relay) i2_1 = i2_at(t);
        } else if (n_departed == warmup) {
          measuring = true;
          t0 = t;
          cum_vac0 = cum_vac;
          if (relay) i2_0 = i2_at(t);
        }
        prev_depart = t;
        prev_depart_arrival = pkt.t_arrival;

        if (!queue.empty()) {
          t_svc = t + rng.exponential(m);
        } else {
          serving = false;
          t_svc = inf;
        }
        break;
      }

      case ev_vac_start: {
        if (relay) {
          t_vac_start = t + rng.exponential(s);  // next stream-2 arrival
          if (!on_vacation) {
            on_vacation = true;
            vac_entered = t;
            if (serving) {
              queue.front().interruptions++;
              if (cfg.resume_service) remaining_service = t_svc - t;
              serving = false;
              t_svc = inf;
            }
          }
          // The new stream-2 packet preempts any packet in service, including
          // a stream-2 packet; memorylessness makes the reset invisible to
          // stream 1.
          s2_gen = t;
          t_vac_end = t + rng.exponential(w);
        } else {
          on_vacation = true;
          vac_entered = t;
          if (serving) {
            queue.front().interruptions++;
            if (cfg.resume_service) remaining_service = t_svc - t;
            serving = false;
            t_svc = inf;
          }
          t_vac_start = inf;
          t_vac_end = t + rng.exponential(w);
        }
        break;
      }

      case ev_vac_end: {
        cum_vac += t - vac_entered;
        on_vacation = false;
        t_vac_end = inf;
        if (relay) {
          // Stream-2 delivery: its age drops to the delivered timestamp.
          i2 = i2_at(t);
          last2 = t;
          u2 = s2_gen;
          ++n2_delivered;
        } else {
          t_vac_start = t + rng.exponential(s);
        }
        if (!queue.empty()) {
          serving = true;
          const double svc = (cfg.resume_service && remaining_service >= 0)
                                 ? remaining_service
                                 : rng.exponential(m);
          remaining_service = -1;
          t_svc = t + svc;
        }
        break;
      }
    }
    if (n_departed >= target) break;
  }

  if (retained == 0 || !(t1 > t0)) {
    raise(errc::invalid_config, "horizon too short: no packets retained after warmup");
  }

  SimSummary out;
  out.n_retained = retained;
  out.window = t1 - t0;
  out.avg_age_stream1 = age_integral / out.window;
  out.vacation_fraction_emp = (cum_vac1 - cum_vac0) / out.window;
  if (relay && n2_delivered > 0) out.avg_age_stream2 = (i2_1 - i2_0) / out.window;
  const double n = static_cast<double>(retained);
  out.e_at = sum_at / n;
  out.e_ab = sum_ab / n;
  out.e_ay = sum_ay / n;
  out.e_t = sum_t / n;
  out.e_t2 = sum_t2 / n;
  if (n_eb > 0) out.mean_y_empty_b = sum_y_eb / static_cast<double>(n_eb);
  if (n_ev > 0) out.mean_y_empty_v = sum_y_ev / static_cast<double>(n_ev);
  out.n_empty_b = n_eb;
  out.n_empty_v = n_ev;
  out.interruption_hist = std::move(hist);
  out.max_decomp_err = max_decomp_err;
  out.params_stable = stable(cfg.params);
  return out;
}

struct Estimate {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double ci95_half = std::numeric_limits<double>::quiet_NaN();  // NaN with < 2 replications
};

struct ExperimentSummary {
  Estimate avg_age_stream1;
  Estimate avg_age_stream2;
  Estimate e_at, e_ab, e_ay, e_t;
  Estimate vacation_fraction;
  Estimate mean_y_empty_b, mean_y_empty_v;
  std::vector<std::uint64_t> interruption_hist;  // pooled across replications
  std::uint64_t n_retained = 0;                  // pooled
  std::uint64_t n_empty_b = 0, n_empty_v = 0;    // pooled
  double max_decomp_err = 0;
  bool params_stable = true;
  std::vector<SimSummary> per_rep;
};

namespace detail {

inline Estimate estimate_of(const std::vector<SimSummary>& reps, double SimSummary::* field) {
  std::vector<double> xs;
  xs.reserve(reps.size());
  for (const auto& r : reps) xs.push_back(r.*field);
  return {mean_of(xs), ci95_half(xs)};
}

}  // namespace detail

// Runs all replications on deterministically derived substreams and
// aggregates means with normal-approximation 95% confidence intervals.
inline ExperimentSummary run_experiment(const SimConfig& cfg) {
  validate_config(cfg);
  const unsigned reps = cfg.replications;
  std::vector<SimSummary> sums(reps);
  const unsigned workers = std::max(1u, std::min(cfg.threads, reps));
  if (workers == 1) {
    for (unsigned r = 0; r < reps; ++r) sums[r] = run_replication(cfg, r);
  } else {
    std::vector<std::future<void>> futs;
    futs.reserve(workers);
    for (unsigned wkr = 0; wkr < workers; ++wkr) {
      futs.push_back(std::async(std::launch::async, [&, wkr] {
        for (unsigned r = wkr; r < reps; r += workers) sums[r] = run_replication(cfg, r);
      }));
    }
    for (auto& f : futs) f.get();
  }

  ExperimentSummary out;
  out.per_rep = std::move(sums);
  out.avg_age_stream1 = detail::estimate_of(out.per_rep, &SimSummary::avg_age_stream1);
  out.avg_age_stream2 = detail::estimate_of(out.per_rep, &SimSummary::avg_age_stream2);
  out.e_at = detail::estimate_of(out.per_rep, &SimSummary::e_at);
  out.e_ab = detail::estimate_of(out.per_rep, &SimSummary::e_ab);
  out.e_ay = detail::estimate_of(out.per_rep, &SimSummary::e_ay);
  out.e_t = detail::estimate_of(out.per_rep, &SimSummary::e_t);
  out.vacation_fraction = detail::estimate_of(out.per_rep, &SimSummary::vacation_fraction_emp);
  out.interruption_hist.assign(kInterruptionBins, 0);
  double sum_y_eb = 0, sum_y_ev = 0;
  for (const auto& r : out.per_rep) {
    out.n_retained += r.n_retained;
    out.n_empty_b += r.n_empty_b;
    out.n_empty_v += r.n_empty_v;
    out.max_decomp_err = std::max(out.max_decomp_err, r.max_decomp_err);
    out.params_stable = out.params_stable && r.params_stable;
    for (std::size_t i = 0; i < kInterruptionBins; ++i) out.interruption_hist[i] += r.interruption_hist[i];
    if (r.n_empty_b) sum_y_eb += r.mean_y_empty_b * static_cast<double>(r.n_empty_b);
    if (r.n_empty_v) sum_y_ev += r.mean_y_empty_v * static_cast<double>(r.n_empty_v);
  }
  out.mean_y_empty_b = detail::estimate_of(out.per_rep, &SimSummary::mean_y_empty_b);
  out.mean_y_empty_v = detail::estimate_of(out.per_rep, &SimSummary::mean_y_empty_v);
  if (out.n_empty_b) out.mean_y_empty_b.mean = sum_y_eb / static_cast<double>(out.n_empty_b);
  if (out.n_empty_v) out.mean_y_empty_v.mean = sum_y_ev / static_cast<double>(out.n_empty_v);
  return out;
}

struct SojournGoodness {
  std::size_t n = 0;
  bool insufficient_sample = false;  // fewer than 1e5 records
  double mean_emp = 0, mean_model = 0, mean_rel_err = 0;
  double m2_emp = 0, m2_model = 0, m2_rel_err = 0;
  double ks_distance = 0;  // sup-norm between empirical and mixture CDF
};

// Compares recorded sojourn times against the analytic two-exponential law.
inline SojournGoodness empirical_sojourn_check(std::span<const PacketRecord> records,
                                               const SojournMixture& mixture) {
  SojournGoodness g;
  g.n = records.size();
  g.insufficient_sample = g.n < 100'000;
  if (g.n == 0) return g;
  std::vector<double> ts;
  ts.reserve(g.n);
  double sum = 0, sum2 = 0;
  for (const auto& r : records) {
    ts.push_back(r.t);
    sum += r.t;
    sum2 += r.t * r.t;
  }
  std::sort(ts.begin(), ts.end());
  const double n = static_cast<double>(g.n);
  g.mean_emp = sum / n;
  g.m2_emp = sum2 / n;
  g.mean_model = mixture.mean();
  g.m2_model = mixture.second_moment();
  g.mean_rel_err = std::fabs(g.mean_emp - g.mean_model) / g.mean_model;
  g.m2_rel_err = std::fabs(g.m2_emp - g.m2_model) / g.m2_model;
  double ks = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double f = mixture.cdf(ts[i]);
    ks = std::max(ks, std::fabs(f - static_cast<double>(i) / n));
    ks = std::max(ks, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  g.ks_distance = ks;
  return g;
}

// Geometric pmf (1-p)^i p for the interruption-count goodness test.
inline std::vector<double> geometric_pmf(double p, std::size_t bins) {
  std::vector<double> pmf(bins, 0.0);
  double q = 1.0;
  for (std::size_t i = 0; i + 1 < bins; ++i) {
    pmf[i] = q * p;
    q *= 1.0 - p;
  }
  pmf[bins - 1] = q;  // overflow bin carries the tail mass
  return pmf;
}

inline void write_records_csv(const std::string& path, std::span<const PacketRecord> records) {
  CsvWriter csv(path);
  csv.row({"j", "t_arrival", "t_depart", "A", "T", "B", "Y"});
  for (const auto& r : records) {
    csv.row({std::to_string(r.j), format_sig(r.t_arrival), format_sig(r.t_depart), format_sig(r.a),
             format_sig(r.t), format_sig(r.b), format_sig(r.y)});
  }
}

}  // namespace agevac
