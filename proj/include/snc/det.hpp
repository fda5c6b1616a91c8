#pragma once

#include <span>
#include <vector>

#include "snc/numeric.hpp"

namespace snc {

// Deterministic (epsilon = 0) reference calculus: token-bucket arrival
// envelope against per-hop latency-rate leftover curves.
struct DetHop {
  double capacity_bits_per_slot;
  double cross_sigma_bits = 0.0;
  double cross_rho_bits_per_slot = 0.0;
};

struct DetResult {
  double backlog_bits = pos_inf;
  double delay_slots = pos_inf;
  bool stable = false;
};

// alpha(d) = sigma + rho d; per hop beta_i(d) = (C_i - rho_c_i)(d - T_i)+
// with T_i = sigma_c_i / (C_i - rho_c_i). End-to-end beta has rate min_i and
// latency sum_i; delay is the horizontal deviation T + sigma/R, backlog the
// vertical one sigma + rho T.
inline DetResult deterministic_bounds(double sigma_bits, double rho_bits_per_slot,
                                      std::span<const DetHop> hops) {
  DetResult r;
  double rate = pos_inf;
  double latency = 0.0;
  for (const DetHop& h : hops) {
    double leftover = h.capacity_bits_per_slot - h.cross_rho_bits_per_slot;
    if (leftover <= 0.0) return r;
    rate = std::min(rate, leftover);
    latency += h.cross_sigma_bits / leftover;
  }
  if (rho_bits_per_slot > rate) return r;
  r.stable = true;
  r.delay_slots = latency + sigma_bits / rate;
  r.backlog_bits = sigma_bits + rho_bits_per_slot * latency;
  return r;
}

}  // namespace snc
