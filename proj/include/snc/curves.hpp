#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>

#include "snc/numeric.hpp"

namespace snc {

// A curve certifies geometric tail decay (or growth) beyond its grid: the
// log-value increments past the horizon are bounded by log_ratio. Summation
// across the open tail is refused unless the combined ratio is strictly
// below 1 - 1e-9 in linear space.
struct TailModel {
  double log_ratio = neg_inf;

  static constexpr double stable_threshold() {
    return -1.0000000005000001e-09;  // log1p(-1e-9)
  }
  bool decaying() const { return log_ratio < stable_threshold(); }
};

// Sequence of log-values over integer lags 0..horizon. Lags below 0 carry
// value 0 (log -inf): bivariate f(s,t) with s > t is identically zero, which
// is what makes the associativity of * and o exact at negative lags.
struct LogSeq {
  std::vector<double> v;
  TailModel tail;

  long horizon() const { return static_cast<long>(v.size()) - 1; }

  // Upper bound on the log-value at any lag: exact on the grid, geometric
  // extension beyond it, zero (log -inf) below lag 0.
  double upper(long d) const {
    if (d < 0) return neg_inf;
    long h = horizon();
    if (d <= h) return v[static_cast<std::size_t>(d)];
    return v[static_cast<std::size_t>(h)] + static_cast<double>(d - h) * tail.log_ratio;
  }
};

// Max log-increment over the trailing `window` steps. This is the empirical
// half of the tail certificate; callers max it with the analytic asymptote.
inline double empirical_tail_ratio(const LogSeq& s, int window = 16) {
  long h = s.horizon();
  if (h < 1) return neg_inf;
  long lo = std::max(0L, h - window);
  double r = neg_inf;
  for (long d = lo; d < h; ++d) {
    double step = s.v[static_cast<std::size_t>(d + 1)] - s.v[static_cast<std::size_t>(d)];
    if (std::isnan(step)) continue;  // -inf - -inf
    r = std::max(r, step);
  }
  return r;
}

inline TailModel certify_tail(const LogSeq& s, double analytic_log_ratio) {
  return TailModel{std::max(empirical_tail_ratio(s), analytic_log_ratio)};
}

// (a * b)(T) = sum_{u=0..T} a(T-u) b(u) in linear space. Exact on the common
// grid; no clamping here so that folds stay associative term by term.
inline LogSeq conv_star(const LogSeq& a, const LogSeq& b) {
  long h = std::min(a.horizon(), b.horizon());
  LogSeq out;
  out.v.assign(static_cast<std::size_t>(h + 1), neg_inf);
  std::vector<double> terms;
  for (long t = 0; t <= h; ++t) {
    terms.clear();
    for (long u = 0; u <= t; ++u)
      terms.push_back(a.v[static_cast<std::size_t>(t - u)] + b.v[static_cast<std::size_t>(u)]);
    out.v[static_cast<std::size_t>(t)] = log_sum_exp(terms);
  }
  // The asymptotic ratio of a convolution is the max of the component ratios,
  // approached from below when the components differ, so the empirical
  // estimate alone would undershoot.
  out.tail = certify_tail(out, std::max(a.tail.log_ratio, b.tail.log_ratio));
  return out;
}

// Full-support convolution for finite-support sequences: the result lives on
// [0, ha+hb] and carries no tail mass. conv_star instead truncates to the
// common grid and certifies the remainder through the tail model, which is
// the right trade on production grids but silently drops support here.
inline LogSeq conv_exact(const LogSeq& a, const LogSeq& b) {
  long h = a.horizon() + b.horizon();
  LogSeq out;
  out.v.assign(static_cast<std::size_t>(h + 1), neg_inf);
  std::vector<double> terms;
  for (long t = 0; t <= h; ++t) {
    terms.clear();
    for (long u = std::max(0L, t - a.horizon()); u <= std::min(t, b.horizon()); ++u)
      terms.push_back(a.v[static_cast<std::size_t>(t - u)] + b.v[static_cast<std::size_t>(u)]);
    out.v[static_cast<std::size_t>(t)] = log_sum_exp(terms);
  }
  out.tail.log_ratio = neg_inf;
  return out;
}

struct DeconvResult {
  double log_value = pos_inf;  // truncated sum plus tail bound
  double log_tail = pos_inf;   // tail bound alone
  bool certified = false;      // false when the tail ratio refuses to decay
};

// (x o y)(delta) = sum_{tau >= max(0,-delta)} x(delta+tau) y(tau).
// delta may be negative (delay evaluation). The sum is split into the exact
// grid part and a certified geometric tail; grid values of x are used exactly
// for as long as they reach, because early increments can exceed the
// asymptotic ratio and a pure geometric bound from the horizon would be
// unsound there.
inline DeconvResult deconv_circle(const LogSeq& x, const LogSeq& y, long delta) {
  DeconvResult res;
  long hx = x.horizon(), hy = y.horizon();
  double q = x.tail.log_ratio + y.tail.log_ratio;
  if (!(q < TailModel::stable_threshold())) return res;  // refuse: tail not summable

  long tau0 = std::max(0L, -delta);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(std::max(0L, hy - tau0 + 1)) + 8);
  for (long tau = tau0; tau <= hy; ++tau)
    terms.push_back(x.upper(delta + tau) + y.v[static_cast<std::size_t>(tau)]);

  // Tail tau > hy. While x still has grid values (delta + tau <= hx), keep x
  // exact and extend only y; after that both extend and the remainder is a
  // closed geometric sum with ratio q.
  double ry = y.tail.log_ratio;
  std::vector<double> tail_terms;
  long tau = std::max(hy + 1, tau0);
  for (; delta + tau <= hx; ++tau)
    tail_terms.push_back(x.v[static_cast<std::size_t>(delta + tau)] +
                         y.upper(tau));
  double base = x.upper(delta + tau) + y.upper(tau);
  if (base != neg_inf) tail_terms.push_back(base - log1m_exp(q));
  res.log_tail = log_sum_exp(tail_terms);

  for (double t : tail_terms) terms.push_back(t);
  res.log_value = log_sum_exp(terms);
  res.certified = true;
  return res;
}

// Clamp to min(1, .) in linear space. If the clamp is still active at the
// horizon the tail certificate is void (the curve has not entered decay on
// the grid), recorded as ratio 1.
inline LogSeq min_with_one(LogSeq s) {
  for (double& x : s.v) x = std::min(x, 0.0);
  if (!s.v.empty() && s.v.back() >= 0.0) s.tail.log_ratio = 0.0;
  return s;
}

// Sequence over a lag window that may start below zero. Only used to realize
// the iterated evaluation of chained deconvolutions; the production path
// folds with conv_star and deconvolves once.
struct OffsetSeq {
  long lo = 0;  // first lag
  std::vector<double> v;

  long hi() const { return lo + static_cast<long>(v.size()) - 1; }
  double at(long d) const {
    if (d < lo || d > hi()) return neg_inf;
    return v[static_cast<std::size_t>(d - lo)];
  }
};

inline OffsetSeq to_offset(const LogSeq& s) {
  return OffsetSeq{0, s.v};
}

// (x o y)(delta) for finite-support sequences, exact (no tail model). Support
// of x is [x.lo, x.hi()], zero elsewhere; same for y over [0, ...].
inline double deconv_exact(const OffsetSeq& x, const LogSeq& y, long delta) {
  std::vector<double> terms;
  for (long tau = std::max(0L, -delta + x.lo); tau <= y.horizon(); ++tau) {
    double xv = x.at(delta + tau);
    double yv = y.v[static_cast<std::size_t>(tau)];
    if (xv == neg_inf || yv == neg_inf) continue;
    terms.push_back(xv + yv);
  }
  return log_sum_exp(terms);
}

// Materialize (x o y) over [lo, hi] exactly (finite supports).
inline OffsetSeq deconv_seq(const OffsetSeq& x, const LogSeq& y, long lo, long hi) {
  OffsetSeq out;
  out.lo = lo;
  out.v.resize(static_cast<std::size_t>(hi - lo + 1));
  for (long d = lo; d <= hi; ++d) out.v[static_cast<std::size_t>(d - lo)] = deconv_exact(x, y, d);
  return out;
}

}  // namespace snc
