#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "snc/numeric.hpp"

namespace snc {

// Closed forms for n identical hops of capacity C with independent
// (sigma_c, rho_c) cross traffic and a (sigma, rho) through flow, all rates
// per slot, sampled at one theta. The bracket variant replaces the bare
// geometric factor gamma by gamma + 1/(1 - e^{-theta(C - rho - rho_c)}),
// which is what the underlying summation actually needs once the infinite
// part of the lag sum is kept; the bare-gamma variant is available behind a
// flag for comparison.
struct GammaTerms {
  double latency_T;      // sigma_c / (C - rho_c), slots
  double gamma;          // (1 - e^{-theta rho (T+1)}) / (1 - e^{-theta rho})
  double gamma_prime;    // 1 / (1 - q)
  double bracket;        // gamma + gamma_prime
  double q;              // e^{-theta (C - rho - rho_c)}
};

inline double latency_T(double sigma_c, double capacity, double rho_c) {
  if (capacity <= rho_c) throw std::invalid_argument("cross rate exceeds capacity");
  return sigma_c / (capacity - rho_c);
}

inline GammaTerms gamma_terms(double theta, double capacity, double sigma, double rho,
                              double sigma_c, double rho_c) {
  (void)sigma;
  GammaTerms g;
  g.latency_T = latency_T(sigma_c, capacity, rho_c);
  double margin = capacity - rho - rho_c;
  if (margin <= 0.0) throw std::invalid_argument("unstable parameters");
  g.q = std::exp(-theta * margin);
  // gamma = sum_{k=0..T} e^{-theta rho k} in closed form
  g.gamma = -std::expm1(-theta * rho * (g.latency_T + 1.0)) / (-std::expm1(-theta * rho));
  g.gamma_prime = 1.0 / (1.0 - g.q);
  g.bracket = g.gamma + g.gamma_prime;
  return g;
}

// Backlog quantile: b >= sigma + n rho sigma_c/(C - rho_c)
//                        + (n ln factor - ln eps)/theta.
inline double backlog_closed_form(double theta, double capacity, double sigma, double rho,
                                  double sigma_c, double rho_c, double eps, int n,
                                  bool theorem_gamma = false) {
  GammaTerms g = gamma_terms(theta, capacity, sigma, rho, sigma_c, rho_c);
  double factor = theorem_gamma ? g.gamma : g.bracket;
  return sigma + n * rho * sigma_c / (capacity - rho_c) +
         (n * std::log(factor) - std::log(eps)) / theta;
}

// Delay quantile: d >= sigma/rho + n sigma_c/(C - rho_c)
//                      + (n ln factor - ln eps)/(theta rho).
inline double delay_closed_form(double theta, double capacity, double sigma, double rho,
                                double sigma_c, double rho_c, double eps, int n,
                                bool theorem_gamma = false) {
  GammaTerms g = gamma_terms(theta, capacity, sigma, rho, sigma_c, rho_c);
  double factor = theorem_gamma ? g.gamma : g.bracket;
  return sigma / rho + n * sigma_c / (capacity - rho_c) +
         (n * std::log(factor) - std::log(eps)) / (theta * rho);
}

// Single-hop improvement: d >= (sigma + sigma_c)/(C - rho_c)
//                              + (ln gamma' - ln eps)/(theta (C - rho_c)).
inline double delay_improved_n1(double theta, double capacity, double sigma, double rho,
                                double sigma_c, double rho_c, double eps) {
  GammaTerms g = gamma_terms(theta, capacity, sigma, rho, sigma_c, rho_c);
  return (sigma + sigma_c) / (capacity - rho_c) +
         (std::log(g.gamma_prime) - std::log(eps)) / (theta * (capacity - rho_c));
}

// zeta(n, d) = (1 + d/n)^{1+d/n} / (d/n)^{d/n}, the Chernoff coefficient of
// the negative-binomial tail.
inline double log_zeta(int n, long d) {
  double x = static_cast<double>(d) / n;
  return (1.0 + x) * std::log1p(x) - x * std::log(x);
}

// Multi-hop improvement: smallest integer d with
//   theta (C - rho_c) d >= theta (sigma + n sigma_c) + n ln zeta(n,d) - ln eps,
// subject to the side condition d >= n q/(1-q) that makes the zeta bound
// applicable. Scans upward; the left side grows linearly and zeta only
// logarithmically, so the scan terminates.
inline long delay_improved_n2(double theta, double capacity, double sigma, double rho,
                              double sigma_c, double rho_c, double eps, int n,
                              long dmax = 1 << 22) {
  if (n < 2) throw std::invalid_argument("n >= 2 required");
  GammaTerms g = gamma_terms(theta, capacity, sigma, rho, sigma_c, rho_c);
  long d = std::max<long>(1, static_cast<long>(std::ceil(n * g.q / (1.0 - g.q))));
  for (; d <= dmax; ++d) {
    double lhs = theta * (capacity - rho_c) * static_cast<double>(d);
    double rhs = theta * (sigma + n * sigma_c) + n * log_zeta(n, d) - std::log(eps);
    if (lhs >= rhs) return d;
  }
  return -1;
}

// Exact negative-binomial tail (1-q)^{-n} sum_{tau >= d} C(tau+n-1, n-1) q^tau,
// summed to tau_max in log space with binomials from lgamma. Reference oracle
// for the zeta-based Chernoff estimate.
inline double negbin_tail_oracle(int n, double q, long d, long tau_max = 1 << 20) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q in (0,1) required");
  double log_q = std::log(q);
  std::vector<double> terms;
  double prev = neg_inf;
  for (long tau = d; tau <= tau_max; ++tau) {
    double log_binom = std::lgamma(static_cast<double>(tau + n)) -
                       std::lgamma(static_cast<double>(tau + 1)) -
                       std::lgamma(static_cast<double>(n));
    double t = log_binom + tau * log_q;
    terms.push_back(t);
    // stop once the ratio is safely geometric and the remainder negligible
    if (tau > d + 16 && t < prev && t < terms.front() - 60.0) break;
    prev = t;
  }
  double body = log_sum_exp(terms);
  return std::exp(body - n * std::log1p(-q));
}

}  // namespace snc
