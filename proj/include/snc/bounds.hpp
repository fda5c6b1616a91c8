#pragma once

#include <map>
#include <optional>

#include "snc/service.hpp"
#include "snc/traffic.hpp"

namespace snc {

struct ThetaTracePoint {
  double theta;
  double objective;  // +inf where the tail refuses to certify
};

struct BoundResult {
  double value = pos_inf;    // bits (backlog), slots (delay) or probability
  double theta_star = 0.0;
  double tail_error = 0.0;   // linear fraction of the transform from the tail bound
  bool stable = false;
  std::vector<ThetaTracePoint> trace;
};

// Through-arrival and end-to-end leftover service prepared at one theta.
struct PreparedPair {
  MgfCurve arrival;
  MgfCurve service;
};

using PairFactory = std::function<PreparedPair(double)>;

// Curves are expensive to build; the delay search revisits the same thetas
// for many candidate lags.
class PairCache {
 public:
  explicit PairCache(PairFactory f) : f_(std::move(f)) {}
  const PreparedPair& at(double theta) {
    auto it = memo_.find(theta);
    if (it == memo_.end()) it = memo_.emplace(theta, f_(theta)).first;
    return it->second;
  }

 private:
  PairFactory f_;
  std::map<double, PreparedPair> memo_;
};

namespace detail {

// Golden-section minimization on log-theta between bracket [a, b]; the
// objective is smooth in ln theta near its interior minimum.
inline std::pair<double, double> golden_min(const std::function<double(double)>& f, double a,
                                            double b, int iters = 40) {
  const double gr = 0.6180339887498949;
  double la = std::log(a), lb = std::log(b);
  double x1 = lb - gr * (lb - la), x2 = la + gr * (lb - la);
  double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      lb = x2;
      x2 = x1;
      f2 = f1;
      x1 = lb - gr * (lb - la);
      f1 = f(std::exp(x1));
    } else {
      la = x1;
      x1 = x2;
      f1 = f2;
      x2 = la + gr * (lb - la);
      f2 = f(std::exp(x2));
    }
  }
  double xm = 0.5 * (la + lb);
  double fm = f(std::exp(xm));
  if (f1 < fm) {
    fm = f1;
    xm = x1;
  }
  if (f2 < fm) {
    fm = f2;
    xm = x2;
  }
  return {std::exp(xm), fm};
}

}  // namespace detail

// Grid scan plus local golden-section refinement. If the best grid point sits
// on the boundary the grid is widened by 4x on that side, up to 6 times, so a
// poorly guessed initial range does not truncate the optimum.
inline BoundResult optimize_theta(const std::function<double(double)>& objective,
                                  ThetaGrid grid, bool refine = true) {
  BoundResult res;
  for (int widen = 0; widen <= 6; ++widen) {
    res.trace.clear();
    std::size_t best = 0;
    double best_val = pos_inf;
    std::vector<double> thetas = grid.values();
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      double v = objective(thetas[i]);
      res.trace.push_back({thetas[i], v});
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    if (best_val == pos_inf) return res;  // nothing certifies: unstable
    bool on_edge = best == 0 || best + 1 == thetas.size();
    if (on_edge && widen < 6) {
      grid = grid.widened();
      continue;
    }
    res.stable = true;
    res.theta_star = thetas[best];
    res.value = best_val;
    if (refine) {
      double a = thetas[best > 0 ? best - 1 : 0];
      double b = thetas[std::min(best + 1, thetas.size() - 1)];
      if (a < b) {
        auto [t, v] = detail::golden_min(objective, a, b);
        if (v < res.value) {
          res.value = v;
          res.theta_star = t;
        }
      }
    }
    return res;
  }
  return res;
}

// P(backlog > x) <= e^{-theta x} M(theta, 0): quantile at eps is
// (ln M - ln eps)/theta, minimized over theta.
inline BoundResult backlog_bound(PairCache& cache, const ThetaGrid& grid, double eps) {
  auto obj = [&](double theta) {
    const PreparedPair& p = cache.at(theta);
    DeconvResult d = deconv_circle(p.arrival, p.service, 0);
    if (!d.certified) return pos_inf;
    return (d.log_value - std::log(eps)) / theta;
  };
  BoundResult res = optimize_theta(obj, grid);
  if (res.stable) {
    const PreparedPair& p = cache.at(res.theta_star);
    DeconvResult d = deconv_circle(p.arrival, p.service, 0);
    res.tail_error = std::exp(d.log_tail - d.log_value);
  }
  return res;
}

// Delay transform at candidate lag d: ln M(theta, -d), minimized over theta.
inline double log_delay_transform(PairCache& cache, double theta, long d) {
  const PreparedPair& p = cache.at(theta);
  DeconvResult r = deconv_circle(p.arrival, p.service, -d);
  return r.certified ? r.log_value : pos_inf;
}

// Smallest integer d with min_theta M(theta, -d) <= eps. Feasibility is
// scanned on the grid (galloping + bisection over d); with refine set, theta
// is then refined at the answer and the refinement is allowed to pull d
// further down. refine=false keeps evaluations on the shared grid, which
// multi-hop chain caches rely on.
inline BoundResult delay_bound(PairCache& cache, const ThetaGrid& grid, double eps,
                               long dmax = 1 << 20, bool refine = true) {
  double log_eps = std::log(eps);
  std::vector<double> thetas = grid.values();
  std::size_t hint = 0;  // feasible theta tends to persist across nearby d
  auto feasible = [&](long d) {
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      std::size_t i = (hint + k) % thetas.size();
      if (log_delay_transform(cache, thetas[i], d) <= log_eps) {
        hint = i;
        return true;
      }
    }
    return false;
  };

  BoundResult res;
  long d;
  if (feasible(0)) {
    d = 0;
  } else {
    long lo = 0, hi = 1;
    while (!feasible(hi)) {
      lo = hi;
      hi *= 2;
      if (hi > dmax) return res;  // unstable or beyond search range
    }
    while (hi - lo > 1) {
      long mid = lo + (hi - lo) / 2;
      if (feasible(mid))
        hi = mid;
      else
        lo = mid;
    }
    d = hi;
  }

  // Refine theta; a sharper theta can certify d-1 that the grid missed.
  auto obj_at = [&](long dd) {
    return optimize_theta([&](double t) { return log_delay_transform(cache, t, dd); }, grid,
                          refine);
  };
  BoundResult at_d = obj_at(d);
  if (refine) {
    while (d > 0) {
      BoundResult prev = obj_at(d - 1);
      if (!(prev.stable && prev.value <= log_eps)) break;
      --d;
      at_d = prev;
    }
  }
  res = at_d;
  res.value = static_cast<double>(d);
  const PreparedPair& p = cache.at(res.theta_star);
  DeconvResult fin = deconv_circle(p.arrival, p.service, -d);
  res.tail_error = fin.certified ? std::exp(fin.log_tail - fin.log_value) : 1.0;
  return res;
}

// Probability that delay exceeds d: min over theta of min(1, M(theta, -d)).
inline BoundResult violation_probability(PairCache& cache, const ThetaGrid& grid, long d) {
  auto obj = [&](double theta) { return log_delay_transform(cache, theta, d); };
  BoundResult res = optimize_theta(obj, grid);
  if (res.stable) res.value = std::exp(std::min(0.0, res.value));
  return res;
}

// Arrival bound of the departures (Lemma 1 iv): M_D(theta, delta) <=
// (M_A o M_S)(theta, delta). Feeds the next hop in iterative analyses.
inline MgfCurve output_bound_curve(const MgfCurve& arrival, const MgfCurve& service) {
  MgfCurve out{arrival.theta, CurveKind::arrival, LogSeq{}};
  long h = std::min(arrival.horizon(), service.horizon());
  out.seq.v.resize(static_cast<std::size_t>(h + 1));
  for (long delta = 0; delta <= h; ++delta) {
    DeconvResult r = deconv_circle(arrival.seq, service.seq, delta);
    out.seq.v[static_cast<std::size_t>(delta)] = r.certified ? r.log_value : pos_inf;
  }
  out.seq.tail = certify_tail(out.seq, arrival.seq.tail.log_ratio);
  return out;
}

}  // namespace snc
