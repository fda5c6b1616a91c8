#pragma once

#include "snc/mgf.hpp"

namespace snc {

// Work-conserving constant-rate server: M_S(-theta, d) = e^{-theta C d}.
inline MgfCurve constant_rate_service(double theta, double capacity_bits_per_slot,
                                      long horizon) {
  MgfCurve c{theta, CurveKind::service, LogSeq{}};
  c.seq.v.resize(static_cast<std::size_t>(horizon + 1));
  for (long d = 0; d <= horizon; ++d)
    c.seq.v[static_cast<std::size_t>(d)] = -theta * capacity_bits_per_slot * static_cast<double>(d);
  c.seq.tail.log_ratio = -theta * capacity_bits_per_slot;
  return c;
}

// Leftover service under arbitrary work-conserving scheduling (the through
// flow is served no worse than [S - A_c]+): MGF bound min(1, M_S * M_Ac),
// requiring server and cross independent. The clamp is exact here (single
// curve, no pending fold).
inline MgfCurve leftover_service(const MgfCurve& server, const MgfCurve& cross) {
  require_compatible(server, cross);
  if (server.kind != CurveKind::service || cross.kind != CurveKind::arrival)
    throw std::invalid_argument("leftover_service expects service, arrival");
  MgfCurve out{server.theta, CurveKind::service, LogSeq{}};
  out.seq.v.resize(server.seq.v.size());
  for (std::size_t i = 0; i < server.seq.v.size(); ++i)
    out.seq.v[i] = std::min(0.0, server.seq.v[i] + cross.seq.v[i]);
  double analytic = server.seq.tail.log_ratio + cross.seq.tail.log_ratio;
  out.seq.tail = certify_tail(out.seq, analytic);
  if (!out.seq.v.empty() && out.seq.v.back() >= 0.0) out.seq.tail.log_ratio = 0.0;
  return out;
}

// Tandem concatenation (Lemma 1 ii iterated): fold with * unclamped, clamp
// once at the end. min(1, .) stays a valid service MGF bound because
// E e^{-theta S} <= 1 for any nonnegative service process.
inline MgfCurve concatenate(std::span<const MgfCurve> hops) {
  if (hops.empty()) throw std::invalid_argument("empty tandem");
  MgfCurve net = hops[0];
  for (std::size_t i = 1; i < hops.size(); ++i) net = conv_star(net, hops[i]);
  net.seq = min_with_one(std::move(net.seq));
  return net;
}

// Decay margin of the delay transform at this theta: positive iff the
// arrival growth is beaten by the service decay, i.e. the deconvolution tail
// is summable. Reported per server in log-ratio units.
inline double stability_margin(const MgfCurve& arrival, const MgfCurve& leftover) {
  return -(arrival.seq.tail.log_ratio + leftover.seq.tail.log_ratio);
}

}  // namespace snc
