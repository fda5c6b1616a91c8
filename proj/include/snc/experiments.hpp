#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "snc/bounds.hpp"
#include "snc/closed_form.hpp"
#include "snc/det.hpp"
#include "snc/scenario.hpp"
#include "snc/simulate.hpp"

namespace snc {

// ---------------------------------------------------------------- builders

inline MgfCurve build_flow_curve(const Scenario& sc, const FlowSpec& f, double theta, long h) {
  double rate = sc.bits_per_slot(f.rate_Mbps);
  switch (f.model) {
    case FlowModel::leaky_bucket:
      return leaky_bucket_mgf(theta, sc.bits(f.burst_Mb), rate, h, f.count);
    case FlowModel::cbr:
      return cbr_mgf(theta, rate, h, f.count);
    case FlowModel::sigma_rho:
      return sigma_rho_mgf(theta, f.count * sc.bits(f.burst_Mb), f.count * rate, h);
  }
  throw std::logic_error("unreachable");
}

inline MgfCurve build_arrival(const Scenario& sc, std::span<const FlowSpec> flows, double theta,
                              long h) {
  std::vector<MgfCurve> parts;
  parts.reserve(flows.size());
  for (const FlowSpec& f : flows) parts.push_back(build_flow_curve(sc, f, theta, h));
  return aggregate_mgf(parts);
}

inline MgfCurve build_leftover(const Scenario& sc, const ServerSpec& sv, double theta, long h) {
  MgfCurve server = constant_rate_service(theta, sc.bits_per_slot(sv.capacity_Mbps), h);
  if (sv.cross.empty()) return server;
  return leftover_service(server, build_arrival(sc, sv.cross, theta, h));
}

// Through arrival against the end-to-end (concatenated) leftover service.
inline PreparedPair build_pair(const Scenario& sc, double theta) {
  long h = sc.horizon_slots;
  PreparedPair p{build_arrival(sc, sc.through, theta, h), MgfCurve{}};
  std::vector<MgfCurve> hops;
  hops.reserve(sc.servers.size());
  for (const ServerSpec& sv : sc.servers) hops.push_back(build_leftover(sc, sv, theta, h));
  p.service = concatenate(hops);
  return p;
}

inline PairFactory pair_factory(const Scenario& sc) {
  return [sc](double theta) { return build_pair(sc, theta); };
}

struct StabilityReport {
  std::vector<double> margins;  // per server, log-ratio units; positive = decaying
  bool stable = true;
};

inline StabilityReport stability_check(const Scenario& sc, double theta) {
  StabilityReport rep;
  MgfCurve arr = build_arrival(sc, sc.through, theta, sc.horizon_slots);
  for (const ServerSpec& sv : sc.servers) {
    MgfCurve lo = build_leftover(sc, sv, theta, sc.horizon_slots);
    double m = stability_margin(arr, lo);
    rep.margins.push_back(m);
    if (!(m > -TailModel::stable_threshold())) rep.stable = false;
  }
  return rep;
}

// Deterministic token-bucket envelope of a flow set.
inline SigmaRho det_envelope(const Scenario& sc, std::span<const FlowSpec> flows) {
  SigmaRho e{0.0, 0.0};
  for (const FlowSpec& f : flows) {
    if (f.model != FlowModel::cbr) e.sigma_bits += f.count * sc.bits(f.burst_Mb);
    e.rho_bits_per_slot += f.count * sc.bits_per_slot(f.rate_Mbps);
  }
  return e;
}

inline DetResult deterministic_bounds(const Scenario& sc) {
  SigmaRho thr = det_envelope(sc, sc.through);
  std::vector<DetHop> hops;
  for (const ServerSpec& sv : sc.servers) {
    SigmaRho c = det_envelope(sc, sv.cross);
    hops.push_back({sc.bits_per_slot(sv.capacity_Mbps), c.sigma_bits, c.rho_bits_per_slot});
  }
  return deterministic_bounds(thr.sigma_bits, thr.rho_bits_per_slot, hops);
}

// Integer-bit simulator instance; refuses scenarios whose parameters do not
// land on whole bits per slot (the path-wise checks are exact or nothing).
inline SimTandem build_sim(const Scenario& sc) {
  auto as_int = [](double x, const char* what) {
    double r = std::round(x);
    if (std::abs(x - r) > 1e-6 || r < 0)
      throw ScenarioError(std::string("simulation needs integral bits for ") + what);
    return static_cast<std::int64_t>(r);
  };
  auto sources = [&](std::span<const FlowSpec> flows) {
    std::vector<SimSource> out;
    for (const FlowSpec& f : flows) {
      SimSource s = f.model == FlowModel::cbr
                        ? make_cbr(as_int(sc.bits_per_slot(f.rate_Mbps), "rate"))
                        : make_onoff(as_int(sc.bits(f.burst_Mb), "burst"),
                                     as_int(sc.bits_per_slot(f.rate_Mbps), "rate"));
      for (int i = 0; i < f.count; ++i) out.push_back(s);
    }
    return out;
  };
  SimTandem net;
  net.through = sources(sc.through);
  for (const ServerSpec& sv : sc.servers)
    net.hops.push_back(SimHop{as_int(sc.bits_per_slot(sv.capacity_Mbps), "capacity"),
                              sources(sv.cross)});
  return net;
}

// ---------------------------------------------------------------- csv

class Csv {
 public:
  Csv(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << "\n";
  }
  void raw(const std::string& line) { out_ << line << "\n"; }

  static std::string num(double v) {
    if (v == pos_inf) return "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
  }

 private:
  std::ofstream out_;
};

struct RowBuilder {
  std::ostringstream s;
  bool first = true;
  RowBuilder& add(double v) {
    if (!first) s << ",";
    first = false;
    s << Csv::num(v);
    return *this;
  }
  RowBuilder& add(long v) {
    if (!first) s << ",";
    first = false;
    s << v;
    return *this;
  }
  RowBuilder& add(const std::string& v) {
    if (!first) s << ",";
    first = false;
    s << v;
    return *this;
  }
  std::string str() const { return s.str(); }
};

// ---------------------------------------------------------------- fig2

struct Fig2Summary {
  double slot_ms;
  int det_max_flows = 0;
  double det_utilization = 0.0;
  int prob_max_flows = 0;
  double prob_utilization = 0.0;
};

namespace detail {

// target comparisons tolerate the 1-ulp noise of Mb/Gb conversions
inline bool within_target(double value_ms, double target_ms) {
  return value_ms <= target_ms * (1.0 + 1e-9);
}

inline double fig2_det_delay_ms(const Scenario& sc, const FlowSpec& tpl, int n) {
  double sigma = n * sc.bits(tpl.burst_Mb);
  double rho = n * sc.bits_per_slot(tpl.rate_Mbps);
  double cap = sc.bits_per_slot(sc.servers[0].capacity_Mbps);
  if (rho > cap) return pos_inf;
  return sc.slots_to_ms(sigma / cap);
}

inline BoundResult fig2_prob_delay(const Scenario& sc, const FlowSpec& tpl, int n) {
  FlowSpec f = tpl;
  f.count = n;
  Scenario one = sc;
  one.through = {f};
  PairCache cache(pair_factory(one));
  return delay_bound(cache, one.theta, one.epsilon);
}

inline Fig2Summary fig2_summary_at_slot(Scenario sc, double slot_ms) {
  sc.slot_ms = slot_ms;
  const FlowSpec tpl = sc.through[0];
  double target = sc.experiment.target_delay_ms;
  double cap_Mbps = sc.servers[0].capacity_Mbps;
  Fig2Summary sum;
  sum.slot_ms = slot_ms;
  for (int n = 1; n <= sc.experiment.max_flows; ++n) {
    if (!within_target(fig2_det_delay_ms(sc, tpl, n), target)) break;
    sum.det_max_flows = n;
  }
  // d_prob is monotone in n: bisect the admissibility frontier
  auto prob_ok = [&](int n) {
    BoundResult b = fig2_prob_delay(sc, tpl, n);
    return b.stable && within_target(sc.slots_to_ms(b.value), target);
  };
  int lo = 0, hi = 1;
  while (hi <= sc.experiment.max_flows && prob_ok(hi)) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, sc.experiment.max_flows + 1);
  while (hi - lo > 1) {
    int mid = lo + (hi - lo) / 2;
    if (prob_ok(mid))
      lo = mid;
    else
      hi = mid;
  }
  sum.prob_max_flows = lo;
  sum.det_utilization = sum.det_max_flows * tpl.rate_Mbps / cap_Mbps;
  sum.prob_utilization = sum.prob_max_flows * tpl.rate_Mbps / cap_Mbps;
  return sum;
}

}  // namespace detail

struct Fig2Result {
  std::vector<Fig2Summary> summaries;  // scenario slot and 10x slot
  int exit_code = 0;
};

inline Fig2Result run_fig2(const Scenario& sc, const std::filesystem::path& out_dir) {
  if (sc.experiment.kind != "fig2") throw ScenarioError("scenario is not a fig2 experiment");
  if (sc.through.size() != 1 || sc.servers.size() != 1 || !sc.servers[0].cross.empty())
    throw ScenarioError("fig2 wants one through template, one cross-free server");
  const FlowSpec tpl = sc.through[0];
  double target = sc.experiment.target_delay_ms;
  double cap_Mbps = sc.servers[0].capacity_Mbps;

  Csv csv(out_dir / "fig2.csv",
          "flows,utilization,d_det_ms,d_prob_ms,theta_star,tail_error");
  for (int n = 1; n <= sc.experiment.max_flows; ++n) {
    double det_ms = detail::fig2_det_delay_ms(sc, tpl, n);
    BoundResult b = detail::fig2_prob_delay(sc, tpl, n);
    double prob_ms = b.stable ? sc.slots_to_ms(b.value) : pos_inf;
    csv.raw(RowBuilder()
                .add(static_cast<long>(n))
                .add(n * tpl.rate_Mbps / cap_Mbps)
                .add(det_ms)
                .add(prob_ms)
                .add(b.theta_star)
                .add(b.tail_error)
                .str());
    bool det_in = detail::within_target(det_ms, target);
    bool prob_in = b.stable && detail::within_target(prob_ms, target);
    if (!det_in && !prob_in) break;  // both frontiers passed; rows beyond are inadmissible
  }

  Fig2Result res;
  Csv sum(out_dir / "fig2_summary.csv",
          "slot_ms,det_max_flows,det_utilization,prob_max_flows,prob_utilization");
  for (double slot : {sc.slot_ms, sc.slot_ms * 10.0}) {
    Fig2Summary s = detail::fig2_summary_at_slot(sc, slot);
    res.summaries.push_back(s);
    sum.raw(RowBuilder()
                .add(s.slot_ms)
                .add(static_cast<long>(s.det_max_flows))
                .add(s.det_utilization)
                .add(static_cast<long>(s.prob_max_flows))
                .add(s.prob_utilization)
                .str());
  }
  return res;
}

// ---------------------------------------------------------------- fig3

struct Fig3Row {
  int m;
  double d_det_ms, d_prob_ms, d_nocross_ms, d_cbr_ms;
  double theta_star, tail_error;
};

struct Fig3Result {
  std::vector<Fig3Row> rows;
  int exit_code = 0;
};

inline Fig3Result run_fig3(const Scenario& sc, const std::filesystem::path& out_dir) {
  if (sc.experiment.kind != "fig3") throw ScenarioError("scenario is not a fig3 experiment");
  if (sc.servers.size() != 1 || !sc.servers[0].cross.empty())
    throw ScenarioError("fig3 wants one server with sweep-provided cross traffic");
  double total_b = sc.experiment.cross_total_burst_Mb;
  double total_r = sc.experiment.cross_total_rate_Mbps;

  auto delay_with_cross = [&](std::vector<FlowSpec> cross) {
    Scenario s = sc;
    s.servers[0].cross = std::move(cross);
    PairCache cache(pair_factory(s));
    return delay_bound(cache, s.theta, s.epsilon);
  };

  // deterministic bound is invariant in m: the sweep keeps totals constant
  Scenario det_sc = sc;
  det_sc.servers[0].cross = {FlowSpec{FlowModel::leaky_bucket, 1, total_b, total_r}};
  double d_det_ms = sc.slots_to_ms(deterministic_bounds(det_sc).delay_slots);

  BoundResult nocross = delay_with_cross({});
  BoundResult cbr = delay_with_cross({FlowSpec{FlowModel::cbr, 1, 0.0, total_r}});
  double d_nocross_ms = nocross.stable ? sc.slots_to_ms(nocross.value) : pos_inf;
  double d_cbr_ms = cbr.stable ? sc.slots_to_ms(cbr.value) : pos_inf;

  Fig3Result res;
  Csv csv(out_dir / "fig3.csv",
          "m,d_det_ms,d_prob_ms,d_nocross_ms,d_cbr_ms,theta_star,tail_error");
  for (int m : sc.experiment.m_values) {
    BoundResult b = delay_with_cross(
        {FlowSpec{FlowModel::leaky_bucket, m, total_b / m, total_r / m}});
    Fig3Row row{m,
                d_det_ms,
                b.stable ? sc.slots_to_ms(b.value) : pos_inf,
                d_nocross_ms,
                d_cbr_ms,
                b.theta_star,
                b.tail_error};
    res.rows.push_back(row);
    csv.raw(RowBuilder()
                .add(static_cast<long>(row.m))
                .add(row.d_det_ms)
                .add(row.d_prob_ms)
                .add(row.d_nocross_ms)
                .add(row.d_cbr_ms)
                .add(row.theta_star)
                .add(row.tail_error)
                .str());
  }
  return res;
}

// ---------------------------------------------------------------- fig4

struct Fig4Row {
  int m;
  double load, d_det_ms, d_prob_ms, theta_star, tail_error;
  bool stable;
};

struct Fig4Result {
  std::vector<Fig4Row> rows;
  int exit_code = 0;
};

inline Fig4Result run_fig4(const Scenario& sc, const std::filesystem::path& out_dir) {
  if (sc.experiment.kind != "fig4") throw ScenarioError("scenario is not a fig4 experiment");
  if (sc.through.size() != 1 || sc.through[0].count != 1 || sc.servers.size() != 1 ||
      !sc.servers[0].cross.empty())
    throw ScenarioError("fig4 wants a single-flow through template and a cross-free server");
  const FlowSpec tpl = sc.through[0];
  double cap_Mbps = sc.servers[0].capacity_Mbps;

  Fig4Result res;
  Csv csv(out_dir / "fig4.csv", "m,load,d_det_ms,d_prob_ms,theta_star,tail_error,stable");
  for (int m : sc.experiment.m_values) {
    Scenario s = sc;
    FlowSpec f = tpl;
    f.count = m;
    s.through = {f};
    s.servers[0].cross = {f};
    DetResult det = deterministic_bounds(s);
    PairCache cache(pair_factory(s));
    BoundResult b = delay_bound(cache, s.theta, s.epsilon);
    Fig4Row row{m,
                2.0 * m * tpl.rate_Mbps / cap_Mbps,
                det.stable ? sc.slots_to_ms(det.delay_slots) : pos_inf,
                b.stable ? sc.slots_to_ms(b.value) : pos_inf,
                b.theta_star,
                b.tail_error,
                b.stable};
    res.rows.push_back(row);
    if (!b.stable) res.exit_code = 3;
    csv.raw(RowBuilder()
                .add(static_cast<long>(row.m))
                .add(row.load)
                .add(row.d_det_ms)
                .add(row.d_prob_ms)
                .add(row.theta_star)
                .add(row.tail_error)
                .add(static_cast<long>(row.stable ? 1 : 0))
                .str());
  }
  return res;
}

// ---------------------------------------------------------------- fig5

struct Fig5Row {
  int n;
  double d_det_ms, d_prob_ms, d_iterative_ms, theta_star, tail_error;
};

struct Fig5Result {
  std::vector<Fig5Row> rows;
  AffineFit det_fit, prob_fit;
  double single_hop_prob_ms = 0.0;
  int exit_code = 0;
};

namespace detail {

// Per-theta state shared across the hop-count sweep: the raw star-folds and
// the iteratively propagated arrivals are extended lazily and reused, which
// keeps the sweep at one O(H^2) fold per extra hop instead of per (n, theta).
struct Fig5Theta {
  MgfCurve arrival;
  MgfCurve leftover;               // clamped single-hop leftover
  std::vector<LogSeq> folds;       // folds[k]: star-fold of k+1 leftovers, unclamped
  std::vector<MgfCurve> arrivals;  // arrivals[i]: output bound after i hops
};

class Fig5Cache {
 public:
  explicit Fig5Cache(const Scenario& sc) : sc_(sc) {}

  Fig5Theta& at(double theta) {
    auto it = memo_.find(theta);
    if (it == memo_.end()) {
      Fig5Theta st;
      st.arrival = build_arrival(sc_, sc_.through, theta, sc_.horizon_slots);
      st.leftover = build_leftover(sc_, sc_.servers[0], theta, sc_.horizon_slots);
      st.folds.push_back(st.leftover.seq);
      st.arrivals.push_back(st.arrival);
      it = memo_.emplace(theta, std::move(st)).first;
    }
    return it->second;
  }

  PairFactory chain_factory(int n) {
    return [this, n](double theta) {
      Fig5Theta& st = at(theta);
      while (static_cast<int>(st.folds.size()) < n)
        st.folds.push_back(conv_star(st.folds.back(), st.leftover.seq));
      MgfCurve net{theta, CurveKind::service, min_with_one(LogSeq(st.folds[n - 1]))};
      return PreparedPair{st.arrival, net};
    };
  }

  PairFactory hop_factory(int hop) {
    return [this, hop](double theta) {
      Fig5Theta& st = at(theta);
      while (static_cast<int>(st.arrivals.size()) <= hop)
        st.arrivals.push_back(output_bound_curve(st.arrivals.back(), st.leftover));
      return PreparedPair{st.arrivals[hop], st.leftover};
    };
  }

 private:
  const Scenario& sc_;
  std::map<double, Fig5Theta> memo_;
};

}  // namespace detail

inline Fig5Result run_fig5(const Scenario& sc, const std::filesystem::path& out_dir) {
  if (sc.experiment.kind != "fig5") throw ScenarioError("scenario is not a fig5 experiment");
  if (sc.servers.size() != 1)
    throw ScenarioError("fig5 replicates a single server spec; give exactly one");
  detail::Fig5Cache cache(sc);

  SigmaRho thr = det_envelope(sc, sc.through);
  SigmaRho crs = det_envelope(sc, sc.servers[0].cross);
  double cap = sc.bits_per_slot(sc.servers[0].capacity_Mbps);

  Fig5Result res;
  Csv csv(out_dir / "fig5.csv",
          "n,d_det_ms,d_prob_ms,d_iterative_ms,theta_star,tail_error");
  std::vector<double> xs, det_ms, prob_ms;
  for (int n : sc.experiment.n_values) {
    std::vector<DetHop> hops(static_cast<std::size_t>(n),
                             DetHop{cap, crs.sigma_bits, crs.rho_bits_per_slot});
    DetResult det = deterministic_bounds(thr.sigma_bits, thr.rho_bits_per_slot, hops);

    PairCache chain(cache.chain_factory(n));
    BoundResult b = delay_bound(chain, sc.theta, sc.epsilon, 1 << 20, /*refine=*/false);

    double iter_ms = 0.0;
    for (int i = 0; i < n && iter_ms != pos_inf; ++i) {
      PairCache hop(cache.hop_factory(i));
      BoundResult hb = delay_bound(hop, sc.theta, sc.epsilon / n, 1 << 20, /*refine=*/false);
      iter_ms = hb.stable ? iter_ms + sc.slots_to_ms(hb.value) : pos_inf;
    }

    Fig5Row row{n,
                det.stable ? sc.slots_to_ms(det.delay_slots) : pos_inf,
                b.stable ? sc.slots_to_ms(b.value) : pos_inf,
                iter_ms,
                b.theta_star,
                b.tail_error};
    res.rows.push_back(row);
    if (row.n == 1) res.single_hop_prob_ms = row.d_prob_ms;
    xs.push_back(n);
    det_ms.push_back(row.d_det_ms);
    prob_ms.push_back(row.d_prob_ms);
    csv.raw(RowBuilder()
                .add(static_cast<long>(row.n))
                .add(row.d_det_ms)
                .add(row.d_prob_ms)
                .add(row.d_iterative_ms)
                .add(row.theta_star)
                .add(row.tail_error)
                .str());
  }

  res.det_fit = fit_affine(xs, det_ms);
  res.prob_fit = fit_affine(xs, prob_ms);
  Csv fit(out_dir / "fig5_fit.csv", "series,slope_ms_per_hop,intercept_ms,rel_residual");
  fit.raw(RowBuilder()
              .add(std::string("det"))
              .add(res.det_fit.slope)
              .add(res.det_fit.intercept)
              .add(res.det_fit.rel_residual)
              .str());
  fit.raw(RowBuilder()
              .add(std::string("prob"))
              .add(res.prob_fit.slope)
              .add(res.prob_fit.intercept)
              .add(res.prob_fit.rel_residual)
              .str());
  return res;
}

// ---------------------------------------------------------------- simcheck

struct SimcheckResult {
  long delay_bound_slots = 0;
  ValidationReport report;
  PathwiseReport pathwise;
  int exit_code = 0;
};

inline SimcheckResult run_simcheck(const Scenario& sc, const std::filesystem::path& out_dir,
                                   std::uint64_t seed) {
  if (sc.experiment.kind != "simcheck") throw ScenarioError("scenario is not a simcheck");
  double eps = sc.experiment.sim_epsilon;
  PairCache cache(pair_factory(sc));
  BoundResult b = delay_bound(cache, sc.theta, eps);
  if (!b.stable) throw ScenarioError("simcheck scenario is unstable; no finite bound");
  long d = static_cast<long>(b.value);

  SimTandem net = build_sim(sc);
  SimcheckResult res;
  res.delay_bound_slots = d;
  res.report = validate_bounds(net, d, eps, static_cast<std::size_t>(sc.experiment.sim_slots),
                               static_cast<std::size_t>(sc.experiment.sim_replications), seed);
  res.pathwise = validate_pathwise(net, 256, seed, 1);

  Csv csv(out_dir / "simcheck.csv",
          "d_slots,d_ms,epsilon,slots,replications,measured,censored,violations,frequency,"
          "stderr,limit,pathwise_def1,pathwise_th1,pass");
  const ValidationReport& r = res.report;
  bool pass = r.pass && res.pathwise.def1_ok && res.pathwise.th1_ok;
  csv.raw(RowBuilder()
              .add(d)
              .add(sc.slots_to_ms(static_cast<double>(d)))
              .add(eps)
              .add(static_cast<long>(sc.experiment.sim_slots))
              .add(static_cast<long>(sc.experiment.sim_replications))
              .add(static_cast<long>(r.measured))
              .add(static_cast<long>(r.censored))
              .add(static_cast<long>(r.violations))
              .add(r.frequency)
              .add(r.stderr_binomial)
              .add(eps + 3.0 * r.stderr_binomial)
              .add(static_cast<long>(res.pathwise.def1_ok ? 1 : 0))
              .add(static_cast<long>(res.pathwise.th1_ok ? 1 : 0))
              .add(static_cast<long>(pass ? 1 : 0))
              .str());
  res.exit_code = pass ? 0 : 4;
  return res;
}

// ---------------------------------------------------------------- oracle

struct OracleSuite {
  std::string name;
  long cases = 0;
  long failures = 0;
  double worst_margin = pos_inf;  // min slack; negative = violation
};

struct OracleResult {
  std::vector<OracleSuite> suites;
  int exit_code = 0;
};

namespace detail {

inline OracleSuite oracle_lemma1(std::uint64_t seed) {
  OracleSuite s{"lemma1"};
  for (double theta : {0.0, 0.02, 0.05, 0.1}) {
    Lemma1Report r = validate_lemma1(theta, 24, 20000, seed ^ std::hash<double>{}(theta));
    ++s.cases;
    double margin = r.rhs - r.lhs;
    s.worst_margin = std::min(s.worst_margin, margin);
    if (!r.pass) ++s.failures;
    if (theta == 0.0 && std::abs(r.rhs - r.rhs_theta0) > 1e-9) ++s.failures;
  }
  return s;
}

// Random finite-support instances of Lemma 3: (x o (y * z)) == ((x o y) o z)
// at lags spanning both signs, to relative 1e-10.
inline OracleSuite oracle_lemma3(std::uint64_t seed, int instances = 1000) {
  OracleSuite s{"lemma3"};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> len(2, 12);
  std::uniform_real_distribution<double> val(-2.0, 2.3);
  std::uniform_int_distribution<long> dlt(-6, 12);
  for (int i = 0; i < instances; ++i) {
    long h = len(rng);
    auto mk = [&] {
      LogSeq q;
      q.v.resize(static_cast<std::size_t>(h + 1));
      for (double& x : q.v) x = val(rng);
      q.tail.log_ratio = neg_inf;  // finite support
      return q;
    };
    LogSeq x = mk(), y = mk(), z = mk();
    long delta = dlt(rng);
    double lhs = deconv_exact(to_offset(x), conv_exact(y, z), delta);
    OffsetSeq xy = deconv_seq(to_offset(x), y, std::min(delta, 0L) - h, h);
    double rhs = deconv_exact(xy, z, delta);
    ++s.cases;
    double margin;
    if (lhs == neg_inf && rhs == neg_inf)
      margin = 0.0;
    else
      margin = 1e-10 - std::abs(lhs - rhs) / std::max(std::abs(lhs), 1.0);
    s.worst_margin = std::min(s.worst_margin, margin);
    if (margin < 0.0) ++s.failures;
  }
  return s;
}

// Eq. (9): the zeta-based Chernoff estimate dominates the exact negative
// binomial tail wherever its side condition d >= n q/(1-q) holds; at d = 0
// the oracle collapses to the generating-function value (1-q)^{-2n}.
inline OracleSuite oracle_eq9() {
  OracleSuite s{"eq9"};
  for (int n = 2; n <= 5; ++n)
    for (double q : {0.1, 0.3, 0.5, 0.7}) {
      ++s.cases;
      double identity = negbin_tail_oracle(n, q, 0) - std::pow(1.0 - q, -2.0 * n);
      double id_margin = 1e-12 - std::abs(identity) * std::pow(1.0 - q, 2.0 * n);
      s.worst_margin = std::min(s.worst_margin, id_margin);
      if (id_margin < 0) ++s.failures;
      long d0 = static_cast<long>(std::ceil(n * q / (1.0 - q)));
      for (long d = d0; d <= d0 + 40; ++d) {
        ++s.cases;
        double log_chernoff = n * log_zeta(n, std::max<long>(d, 1)) + d * std::log(q);
        double log_exact = std::log(negbin_tail_oracle(n, q, d)) + 2.0 * n * std::log1p(-q);
        double margin = log_chernoff - log_exact;  // >= 0 when Chernoff dominates
        s.worst_margin = std::min(s.worst_margin, margin);
        if (margin < -1e-12) ++s.failures;
      }
    }
  return s;
}

}  // namespace detail

inline OracleResult run_oracle(const std::filesystem::path& out_dir, std::uint64_t seed) {
  OracleResult res;
  res.suites.push_back(detail::oracle_lemma1(seed));
  res.suites.push_back(detail::oracle_lemma3(seed + 1));
  res.suites.push_back(detail::oracle_eq9());
  Csv csv(out_dir / "oracle.csv", "suite,cases,failures,worst_margin");
  for (const OracleSuite& s : res.suites) {
    csv.raw(RowBuilder()
                .add(s.name)
                .add(s.cases)
                .add(s.failures)
                .add(s.worst_margin)
                .str());
    if (s.failures > 0) res.exit_code = 4;
  }
  return res;
}

// ---------------------------------------------------------------- dispatch

inline int run_experiment(const std::string& name, const Scenario& sc,
                          const std::filesystem::path& out_dir, std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  if (name == "oracle") return run_oracle(out_dir, seed).exit_code;
  if (name != sc.experiment.kind)
    throw ScenarioError("scenario experiment kind '" + sc.experiment.kind +
                        "' does not match requested '" + name + "'");
  if (name == "fig2") return run_fig2(sc, out_dir).exit_code;
  if (name == "fig3") return run_fig3(sc, out_dir).exit_code;
  if (name == "fig4") return run_fig4(sc, out_dir).exit_code;
  if (name == "fig5") return run_fig5(sc, out_dir).exit_code;
  if (name == "simcheck") return run_simcheck(sc, out_dir, seed).exit_code;
  throw ScenarioError("unknown experiment: " + name);
}

}  // namespace snc
