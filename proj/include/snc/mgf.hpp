#pragma once

#include <functional>
#include <numeric>

#include "snc/curves.hpp"

namespace snc {

enum class CurveKind { arrival, service };

// Log-spaced optimization grid for the Chernoff parameter theta.
struct ThetaGrid {
  double lo = 1e-8;
  double hi = 1e-2;
  int points = 64;

  std::vector<double> values() const {
    std::vector<double> g(static_cast<std::size_t>(points));
    double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i) {
      double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
      g[static_cast<std::size_t>(i)] = std::exp(llo + f * (lhi - llo));
    }
    return g;
  }
  ThetaGrid widened() const { return ThetaGrid{lo / 4.0, hi * 4.0, points}; }
};

// Conjugate Hoelder exponents: 1/p + 1/q = 1, p, q > 1.
struct HolderPair {
  double p;
  double q;
  bool valid() const {
    return p > 1.0 && q > 1.0 && std::abs(1.0 / p + 1.0 / q - 1.0) < 1e-12;
  }
};

// MGF bound of an arrival (E e^{theta A}, nondecreasing in the lag) or of a
// service process (E e^{-theta S}) at one fixed theta, on a lag grid.
struct MgfCurve {
  double theta = 0.0;
  CurveKind kind = CurveKind::arrival;
  LogSeq seq;

  long horizon() const { return seq.horizon(); }
};

inline void require_compatible(const MgfCurve& a, const MgfCurve& b) {
  if (a.theta != b.theta) throw std::invalid_argument("theta mismatch");
  if (a.horizon() != b.horizon()) throw std::invalid_argument("horizon mismatch");
}

// Service concatenation step (Lemma 1 ii): values may exceed 1 on short lags;
// clamping is deferred to the end of a fold to keep the fold associative.
inline MgfCurve conv_star(const MgfCurve& a, const MgfCurve& b) {
  require_compatible(a, b);
  if (a.kind != CurveKind::service || b.kind != CurveKind::service)
    throw std::invalid_argument("conv_star expects service curves");
  return MgfCurve{a.theta, CurveKind::service, conv_star(a.seq, b.seq)};
}

// Arrival-by-service deconvolution (Lemma 1 iii); delta < 0 evaluates the
// delay transform. Never clamped here.
inline DeconvResult deconv_circle(const MgfCurve& x, const MgfCurve& y, long delta) {
  require_compatible(x, y);
  if (x.kind != CurveKind::arrival || y.kind != CurveKind::service)
    throw std::invalid_argument("deconv_circle expects arrival o service");
  return deconv_circle(x.seq, y.seq, delta);
}

// Product bound for independent processes (same theta).
inline MgfCurve pointwise_product(const MgfCurve& a, const MgfCurve& b) {
  require_compatible(a, b);
  if (a.kind != b.kind) throw std::invalid_argument("kind mismatch");
  MgfCurve out{a.theta, a.kind, LogSeq{}};
  out.seq.v.resize(a.seq.v.size());
  for (std::size_t i = 0; i < a.seq.v.size(); ++i) out.seq.v[i] = a.seq.v[i] + b.seq.v[i];
  out.seq.tail.log_ratio = a.seq.tail.log_ratio + b.seq.tail.log_ratio;
  return out;
}

// Hoelder bound for dependent processes: x sampled at p*theta, y at q*theta,
// result valid at theta. The target theta is passed explicitly since it is
// no longer recoverable from the operands.
inline MgfCurve holder_product(const MgfCurve& x, const MgfCurve& y, HolderPair hp,
                               double theta) {
  if (!hp.valid()) throw std::invalid_argument("invalid Hoelder pair");
  if (x.horizon() != y.horizon()) throw std::invalid_argument("horizon mismatch");
  if (std::abs(x.theta - hp.p * theta) > 1e-9 * x.theta ||
      std::abs(y.theta - hp.q * theta) > 1e-9 * y.theta)
    throw std::invalid_argument("operands not sampled at p*theta / q*theta");
  if (x.kind != y.kind) throw std::invalid_argument("kind mismatch");
  MgfCurve out{theta, x.kind, LogSeq{}};
  out.seq.v.resize(x.seq.v.size());
  for (std::size_t i = 0; i < x.seq.v.size(); ++i)
    out.seq.v[i] = x.seq.v[i] / hp.p + y.seq.v[i] / hp.q;
  out.seq.tail.log_ratio =
      x.seq.tail.log_ratio / hp.p + y.seq.tail.log_ratio / hp.q;
  return out;
}

// End-to-end transform of an arrival against a chain of per-hop service
// curves: fold the chain with * first, clamp once, deconvolve once. The
// association (x o (s1 * s2 * ...)) is exact under the zero-extension
// convention, and folding first keeps every split of the end-to-end lag in
// the sum, which an iterated evaluation restricted to nonnegative lags would
// silently drop.
inline DeconvResult deconv_chain(const MgfCurve& x, std::span<const MgfCurve> services,
                                 long delta) {
  if (services.empty()) throw std::invalid_argument("empty service chain");
  MgfCurve net = services[0];
  for (std::size_t i = 1; i < services.size(); ++i) net = conv_star(net, services[i]);
  net.seq = min_with_one(std::move(net.seq));
  return deconv_circle(x, net, delta);
}

// Iterated form ((x o s1) o s2 ...) o sn evaluated at delta, materializing
// intermediates down to the most negative lag they are consulted at. Exact
// for finite-support inputs; used to cross-check deconv_chain.
inline double deconv_chain_iterated(const MgfCurve& x, std::span<const MgfCurve> services,
                                    long delta) {
  if (services.empty()) throw std::invalid_argument("empty service chain");
  long h = x.horizon();
  OffsetSeq cur = to_offset(x.seq);
  for (std::size_t i = 0; i + 1 < services.size(); ++i) {
    long lo = std::min(delta, 0L);
    cur = deconv_seq(cur, services[i].seq, lo - h, h);
  }
  return deconv_exact(cur, services.back().seq, delta);
}

}  // namespace snc
