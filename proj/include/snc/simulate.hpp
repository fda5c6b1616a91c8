#pragma once

#include <cstdint>
#include <random>

#include "snc/numeric.hpp"

namespace snc {

// Discrete-time sample-path simulator. Everything is integer bits and slots
// so that the path-wise inequalities (Def. 1, Th. 1) can be asserted exactly,
// not within float tolerance.

// Periodic on-off source with a random phase: burst at the period start,
// residual spread over the remaining slots. With period chosen so that the
// residual is integral the source emits exactly rate*period bits per period
// and satisfies A(s,t] <= burst + rate (t-s) path-wise.
struct SimSource {
  std::int64_t burst_bits;
  std::int64_t rate_bits_per_slot;
  std::int64_t period_slots;
  std::int64_t residual_bits;  // per non-burst slot

  std::int64_t emit(std::int64_t slot, std::int64_t phase) const {
    std::int64_t pos = (slot + phase) % period_slots;
    return pos == 0 ? burst_bits : residual_bits;
  }
};

// Smallest period P with rate*P >= burst and an integral residual
// (rate*P - burst) / (P - 1). Such P exists because P - 1 = |burst - rate|
// always qualifies; the scan finds the least one.
inline SimSource make_onoff(std::int64_t burst_bits, std::int64_t rate_bits_per_slot) {
  if (burst_bits <= 0 || rate_bits_per_slot <= 0)
    throw std::invalid_argument("positive burst and rate required");
  if (burst_bits <= rate_bits_per_slot)
    return SimSource{rate_bits_per_slot, rate_bits_per_slot, 1, 0};  // degenerate: CBR
  std::int64_t lo = (burst_bits + rate_bits_per_slot - 1) / rate_bits_per_slot;
  for (std::int64_t p = std::max<std::int64_t>(2, lo);; ++p) {
    std::int64_t excess = rate_bits_per_slot * p - burst_bits;
    if (excess >= 0 && excess % (p - 1) == 0)
      return SimSource{burst_bits, rate_bits_per_slot, p, excess / (p - 1)};
  }
}

inline SimSource make_cbr(std::int64_t rate_bits_per_slot) {
  return SimSource{rate_bits_per_slot, rate_bits_per_slot, 1, 0};
}

// Cumulative path: cum[t] = A(0, t), cum[0] = 0.
struct SamplePath {
  std::vector<std::int64_t> cum;

  std::int64_t at(std::size_t t) const { return cum[t]; }
  std::int64_t over(std::size_t s, std::size_t t) const { return cum[t] - cum[s]; }
  std::size_t slots() const { return cum.size() - 1; }
};

// Deterministic per-replication stream: seed and replication index fully
// determine phases, hence bit-identical reruns.
inline std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t replication) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (replication + 1)));
  rng.discard(16);
  return rng;
}

inline SamplePath generate_path(std::span<const SimSource> sources, std::size_t slots,
                                std::mt19937_64& rng) {
  std::vector<std::int64_t> phases(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    std::uniform_int_distribution<std::int64_t> u(0, sources[i].period_slots - 1);
    phases[i] = u(rng);
  }
  SamplePath p;
  p.cum.assign(slots + 1, 0);
  for (std::size_t t = 1; t <= slots; ++t) {
    std::int64_t a = 0;
    for (std::size_t i = 0; i < sources.size(); ++i)
      a += sources[i].emit(static_cast<std::int64_t>(t) - 1, phases[i]);
    p.cum[t] = p.cum[t - 1] + a;
  }
  return p;
}

struct SimHop {
  std::int64_t capacity_bits_per_slot;
  std::vector<SimSource> cross;
};

struct SimTandem {
  std::vector<SimSource> through;
  std::vector<SimHop> hops;
};

// One replication: per-hop cross arrival paths and through departure paths.
struct TandemPaths {
  SamplePath through_arrivals;                // into hop 0
  std::vector<SamplePath> cross_arrivals;     // per hop
  std::vector<SamplePath> through_departures; // per hop
};

// Arrivals-then-service each slot; cross is served strictly before through
// (worst case for the through flow among work-conserving orders); through
// departures cut through to the next hop within the same slot, matching the
// fluid min-plus composition.
inline TandemPaths run_tandem(const SimTandem& net, std::size_t slots, std::uint64_t seed,
                              std::uint64_t replication = 0) {
  std::mt19937_64 rng = replication_rng(seed, replication);
  TandemPaths out;
  out.through_arrivals = generate_path(net.through, slots, rng);
  std::size_t n = net.hops.size();
  out.cross_arrivals.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.cross_arrivals[i] = generate_path(net.hops[i].cross, slots, rng);
  out.through_departures.assign(n, SamplePath{});
  for (std::size_t i = 0; i < n; ++i) out.through_departures[i].cum.assign(slots + 1, 0);

  std::vector<std::int64_t> qc(n, 0), qt(n, 0);
  for (std::size_t t = 1; t <= slots; ++t) {
    std::int64_t thr_in = out.through_arrivals.over(t - 1, t);
    for (std::size_t i = 0; i < n; ++i) {
      qc[i] += out.cross_arrivals[i].over(t - 1, t);
      qt[i] += thr_in;
      std::int64_t cap = net.hops[i].capacity_bits_per_slot;
      std::int64_t sc = std::min(qc[i], cap);
      qc[i] -= sc;
      cap -= sc;
      std::int64_t st = std::min(qt[i], cap);
      qt[i] -= st;
      out.through_departures[i].cum[t] = out.through_departures[i].cum[t - 1] + st;
      thr_in = st;
    }
  }
  return out;
}

struct MeasureResult {
  std::int64_t max_backlog_bits = 0;
  std::vector<long> delay_slots;  // virtual delay per slot t = 1..T; -1 if censored
  std::size_t censored = 0;
};

// Virtual delay at t: smallest s >= 0 with D(0, t+s) >= A(0, t). Slots whose
// delay is not resolved inside the run are censored, never counted as zero.
inline MeasureResult measure(const SamplePath& arrivals, const SamplePath& departures) {
  MeasureResult m;
  std::size_t T = arrivals.slots();
  m.delay_slots.assign(T, -1);
  std::size_t j = 1;
  for (std::size_t t = 1; t <= T; ++t) {
    m.max_backlog_bits = std::max(m.max_backlog_bits, arrivals.at(t) - departures.at(t));
    if (j < t) j = t;
    while (j <= T && departures.at(j) < arrivals.at(t)) ++j;
    if (j <= T)
      m.delay_slots[t - 1] = static_cast<long>(j - t);
    else
      ++m.censored;
  }
  return m;
}

// Brute-force bivariate min-plus reference on one sample path. Small T only.
namespace minplus_oracle {

// Realized leftover service of a constant-rate hop under Prop. 1:
// S_l(s,t) = max(0, C (t-s) - A_c(s,t)).
inline std::int64_t leftover(std::int64_t capacity, const SamplePath& cross, std::size_t s,
                             std::size_t t) {
  return std::max<std::int64_t>(
      0, capacity * static_cast<std::int64_t>(t - s) - cross.over(s, t));
}

using Bivariate = std::vector<std::vector<std::int64_t>>;  // [s][t], s <= t

inline Bivariate leftover_bivariate(std::int64_t capacity, const SamplePath& cross) {
  std::size_t T = cross.slots();
  Bivariate b(T + 1, std::vector<std::int64_t>(T + 1, 0));
  for (std::size_t s = 0; s <= T; ++s)
    for (std::size_t t = s; t <= T; ++t) b[s][t] = leftover(capacity, cross, s, t);
  return b;
}

// (x (*) y)(s, t) = min_{tau in [s,t]} x(s,tau) + y(tau,t).
inline Bivariate conv(const Bivariate& x, const Bivariate& y) {
  std::size_t T = x.size() - 1;
  Bivariate out(T + 1, std::vector<std::int64_t>(T + 1, 0));
  for (std::size_t s = 0; s <= T; ++s)
    for (std::size_t t = s; t <= T; ++t) {
      std::int64_t best = x[s][s] + y[s][t];
      for (std::size_t tau = s; tau <= t; ++tau)
        best = std::min(best, x[s][tau] + y[tau][t]);
      out[s][t] = best;
    }
  return out;
}

// (A (*) S)(0, t) for all t.
inline std::vector<std::int64_t> conv_with_arrivals(const SamplePath& a, const Bivariate& s) {
  std::size_t T = a.slots();
  std::vector<std::int64_t> out(T + 1, 0);
  for (std::size_t t = 0; t <= T; ++t) {
    std::int64_t best = a.at(0) + s[0][t];
    for (std::size_t tau = 0; tau <= t; ++tau) best = std::min(best, a.at(tau) + s[tau][t]);
    out[t] = best;
  }
  return out;
}

// (A (/) S)(s, t) = max_{tau in [0, min(s,t)]} A(tau, t) - S(tau, s): the
// deviation whose positive part bounds backlog (s = t) and delay (s > t).
inline std::int64_t deconv(const SamplePath& a, const Bivariate& s, std::size_t at_s,
                           std::size_t at_t) {
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  for (std::size_t tau = 0; tau <= std::min(at_s, at_t); ++tau)
    best = std::max(best, a.over(tau, at_t) - s[tau][at_s]);
  return best;
}

}  // namespace minplus_oracle

struct PathwiseReport {
  bool def1_ok = true;   // per hop: D >= A (*) S_l exactly
  bool th1_ok = true;    // end to end: D_n >= A (*) S_1 (*) ... (*) S_n exactly
  std::size_t checks = 0;
};

// Exact integer verification of the dynamic-server property on one
// replication. Small instances only (O(T^3) in the hop fold).
inline PathwiseReport validate_pathwise(const SimTandem& net, std::size_t slots,
                                        std::uint64_t seed, std::uint64_t replication = 0) {
  TandemPaths p = run_tandem(net, slots, seed, replication);
  PathwiseReport rep;
  std::size_t n = net.hops.size();
  minplus_oracle::Bivariate folded;
  for (std::size_t i = 0; i < n; ++i) {
    minplus_oracle::Bivariate s =
        minplus_oracle::leftover_bivariate(net.hops[i].capacity_bits_per_slot, p.cross_arrivals[i]);
    const SamplePath& in = i == 0 ? p.through_arrivals : p.through_departures[i - 1];
    std::vector<std::int64_t> lower = minplus_oracle::conv_with_arrivals(in, s);
    for (std::size_t t = 0; t <= slots; ++t) {
      ++rep.checks;
      if (p.through_departures[i].at(t) < lower[t]) rep.def1_ok = false;
    }
    folded = i == 0 ? std::move(s) : minplus_oracle::conv(folded, s);
  }
  std::vector<std::int64_t> lower = minplus_oracle::conv_with_arrivals(p.through_arrivals, folded);
  for (std::size_t t = 0; t <= slots; ++t) {
    ++rep.checks;
    if (p.through_departures[n - 1].at(t) < lower[t]) rep.th1_ok = false;
  }
  return rep;
}

struct Lemma1Report {
  double theta = 0.0;
  long t = 0;
  double lhs = 0.0;          // MC estimate of E e^{-theta (X (*) Y)(0,t)}
  double rhs = 0.0;          // empirical (M_X * M_Y)(t)
  double rhs_theta0 = 0.0;   // must be exactly t+1
  bool pass = false;
};

// Monte-Carlo check of the convolution MGF bound
//   E e^{-theta (X (*) Y)(0,t)} <= sum_tau M_X(-theta,0,tau) M_Y(-theta,tau,t)
// for two independent iid-increment service processes. Per-process MGFs are
// estimated from batches disjoint from the paired batch, so both sides are
// independent estimates; the union-bound slack of the right side dwarfs the
// MC noise. At theta = 0 the right side is t+1 identically.
inline Lemma1Report validate_lemma1(double theta, long t, std::size_t samples,
                                    std::uint64_t seed) {
  Lemma1Report rep;
  rep.theta = theta;
  rep.t = t;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> ux(0, 12), uy(0, 9);

  auto sample_cum = [&](auto& dist) {
    std::vector<std::int64_t> c(static_cast<std::size_t>(t) + 1, 0);
    for (long i = 1; i <= t; ++i)
      c[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i - 1)] + dist(rng);
    return c;
  };

  // batch 1: empirical per-process MGFs over all window lengths
  std::vector<double> mx(static_cast<std::size_t>(t) + 1, 0.0),
      my(static_cast<std::size_t>(t) + 1, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    auto cx = sample_cum(ux);
    auto cy = sample_cum(uy);
    for (long d = 0; d <= t; ++d) {
      mx[static_cast<std::size_t>(d)] += std::exp(-theta * cx[static_cast<std::size_t>(d)]);
      my[static_cast<std::size_t>(d)] += std::exp(-theta * cy[static_cast<std::size_t>(d)]);
    }
  }
  for (double& v : mx) v /= samples;
  for (double& v : my) v /= samples;

  NeumaierSum rhs;
  for (long tau = 0; tau <= t; ++tau)
    rhs.add(mx[static_cast<std::size_t>(tau)] * my[static_cast<std::size_t>(t - tau)]);
  rep.rhs = rhs.value();
  rep.rhs_theta0 = static_cast<double>(t + 1);

  // batch 2: paired samples of the min-plus convolution
  NeumaierSum lhs;
  for (std::size_t s = 0; s < samples; ++s) {
    auto cx = sample_cum(ux);
    auto cy = sample_cum(uy);
    std::int64_t conv = std::numeric_limits<std::int64_t>::max();
    for (long tau = 0; tau <= t; ++tau)
      conv = std::min(conv, cx[static_cast<std::size_t>(tau)] +
                                cy[static_cast<std::size_t>(t)] -
                                cy[static_cast<std::size_t>(tau)]);
    lhs.add(std::exp(-theta * conv));
  }
  rep.lhs = lhs.value() / samples;
  rep.pass = rep.lhs <= rep.rhs;
  return rep;
}

struct ValidationReport {
  long delay_bound_slots = 0;
  double epsilon = 0.0;
  std::size_t measured = 0;   // non-censored delay samples
  std::size_t censored = 0;
  std::size_t violations = 0;
  double frequency = 0.0;
  double stderr_binomial = 0.0;
  bool pass = false;
};

// Monte-Carlo check that the analytic delay bound is conservative: the
// empirical violation frequency must stay below eps + 3 binomial sigma.
inline ValidationReport validate_bounds(const SimTandem& net, long delay_bound_slots,
                                        double eps, std::size_t slots,
                                        std::size_t replications, std::uint64_t seed) {
  ValidationReport r;
  r.delay_bound_slots = delay_bound_slots;
  r.epsilon = eps;
  for (std::size_t rep = 0; rep < replications; ++rep) {
    TandemPaths p = run_tandem(net, slots, seed, rep);
    MeasureResult m = measure(p.through_arrivals, p.through_departures.back());
    for (std::size_t t = 1; t <= slots; ++t) {
      long d = m.delay_slots[t - 1];
      if (d >= 0) {
        ++r.measured;
        if (d > delay_bound_slots) ++r.violations;
      } else if (static_cast<long>(slots - t) + 1 > delay_bound_slots) {
        // censored but already known to exceed the bound
        ++r.measured;
        ++r.violations;
      } else {
        ++r.censored;
      }
    }
  }
  r.frequency = r.measured ? static_cast<double>(r.violations) / r.measured : 0.0;
  r.stderr_binomial = r.measured ? std::sqrt(eps * (1.0 - eps) / r.measured) : 0.0;
  r.pass = r.frequency <= eps + 3.0 * r.stderr_binomial;
  return r;
}

}  // namespace snc
