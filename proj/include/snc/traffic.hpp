#pragma once

#include "snc/mgf.hpp"

namespace snc {

// Log of the worst-case leaky-bucket MGF over a window of delta slots:
//   1 + (r d / (b + r d)) (e^{theta (b + r d)} - 1),
// the two-point extremal distribution of a (b, r)-constrained flow. Carried
// in log space because theta (b + r d) reaches hundreds in the scenarios.
inline double log_leaky_bucket_mgf(double theta, double burst_bits, double rate_bits_per_slot,
                                   long delta) {
  if (delta <= 0) return 0.0;
  double rd = rate_bits_per_slot * static_cast<double>(delta);
  if (rd <= 0.0) return 0.0;  // zero rate: nothing arrives in steady state
  double x = theta * (burst_bits + rd);
  double log_p = std::log(rd) - std::log(burst_bits + rd);
  return log_add(0.0, log_p + log_expm1(x));
}

namespace detail {
inline MgfCurve make_arrival(double theta, long horizon, double analytic_ratio,
                             std::function<double(long)> f) {
  MgfCurve c{theta, CurveKind::arrival, LogSeq{}};
  c.seq.v.resize(static_cast<std::size_t>(horizon + 1));
  for (long d = 0; d <= horizon; ++d) c.seq.v[static_cast<std::size_t>(d)] = f(d);
  c.seq.tail = certify_tail(c.seq, analytic_ratio);
  return c;
}
}  // namespace detail

// count independent homogeneous leaky-bucket flows, aggregated. Increments
// approach theta*count*rate from above, so the asymptote is the floor of the
// certificate and the empirical window its ceiling.
inline MgfCurve leaky_bucket_mgf(double theta, double burst_bits, double rate_bits_per_slot,
                                 long horizon, int count = 1) {
  return detail::make_arrival(
      theta, horizon, theta * count * rate_bits_per_slot, [&](long d) {
        return count * log_leaky_bucket_mgf(theta, burst_bits, rate_bits_per_slot, d);
      });
}

// Constant bit rate: deterministic A(s,t] = r (t-s), MGF e^{theta r d} exactly.
inline MgfCurve cbr_mgf(double theta, double rate_bits_per_slot, long horizon, int count = 1) {
  return detail::make_arrival(theta, horizon, theta * count * rate_bits_per_slot, [&](long d) {
    return theta * count * rate_bits_per_slot * static_cast<double>(d);
  });
}

// Affine log-MGF envelope e^{theta (sigma + rho d)} (Eq. 5 style).
inline MgfCurve sigma_rho_mgf(double theta, double sigma_bits, double rho_bits_per_slot,
                              long horizon) {
  return detail::make_arrival(theta, horizon, theta * rho_bits_per_slot, [&](long d) {
    return theta * (sigma_bits + rho_bits_per_slot * static_cast<double>(d));
  });
}

// Product of per-flow MGFs: flows are mutually independent.
inline MgfCurve aggregate_mgf(std::span<const MgfCurve> flows) {
  if (flows.empty()) throw std::invalid_argument("empty aggregate");
  MgfCurve out = flows[0];
  for (std::size_t i = 1; i < flows.size(); ++i) out = pointwise_product(out, flows[i]);
  return out;
}

// (1/(theta t)) ln M_A(theta, t): the MGF-implied bandwidth need at scale t.
inline double effective_bandwidth(const MgfCurve& a, long t) {
  if (a.kind != CurveKind::arrival) throw std::invalid_argument("arrival curve expected");
  if (t <= 0 || t > a.horizon()) throw std::invalid_argument("t out of range");
  return a.seq.v[static_cast<std::size_t>(t)] / (a.theta * static_cast<double>(t));
}

struct SigmaRho {
  double sigma_bits;
  double rho_bits_per_slot;
};

// Tightest affine envelope dominating the curve on its grid: rho from the
// worst increment (and the certified tail ratio, so the envelope also holds
// beyond the horizon), sigma from the worst residual.
inline SigmaRho fit_sigma_rho(const MgfCurve& a) {
  if (a.kind != CurveKind::arrival) throw std::invalid_argument("arrival curve expected");
  double rho_log = a.seq.tail.log_ratio;
  for (long d = 0; d < a.horizon(); ++d)
    rho_log = std::max(rho_log, a.seq.v[static_cast<std::size_t>(d + 1)] -
                                    a.seq.v[static_cast<std::size_t>(d)]);
  double rho = rho_log / a.theta;
  double sigma = 0.0;
  for (long d = 0; d <= a.horizon(); ++d)
    sigma = std::max(sigma, a.seq.v[static_cast<std::size_t>(d)] / a.theta -
                                rho * static_cast<double>(d));
  return SigmaRho{sigma, rho};
}

}  // namespace snc
