#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace snc {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// Kahan-Neumaier compensated accumulator. Keeps long series sums accurate to
// a few ulps regardless of term ordering.
class NeumaierSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(e^a + e^b) without overflow; handles -inf identities.
inline double log_add(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(sum_i e^{v_i}) via max shift + compensated summation.
inline double log_sum_exp(std::span<const double> v) {
  double m = neg_inf;
  for (double x : v) m = std::max(m, x);
  if (m == neg_inf) return neg_inf;
  if (m == pos_inf) return pos_inf;
  NeumaierSum s;
  for (double x : v) s.add(std::exp(x - m));
  return m + std::log(s.value());
}

// log(e^x - 1) for x > 0. For large x the -1 is below resolution and the
// identity x + log1p(-e^{-x}) avoids overflow.
inline double log_expm1(double x) {
  if (x <= 0.0) return neg_inf;
  if (x > 30.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

// log(1 - e^x) for x < 0; the two branches keep full precision on both sides
// of x = -ln 2.
inline double log1m_exp(double x) {
  if (x >= 0.0) return neg_inf;  // caller must ensure x < 0; degenerate -> -inf
  if (x < -0.6931471805599453) return std::log1p(-std::exp(x));
  return std::log(-std::expm1(x));
}

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rel_residual = 0.0;  // ||y - fit||_2 / ||y||_2
};

// Least-squares fit y ~ slope*x + intercept.
inline AffineFit fit_affine(std::span<const double> x, std::span<const double> y) {
  std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  AffineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double rss = 0, yss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    rss += r * r;
    yss += y[i] * y[i];
  }
  f.rel_residual = yss > 0 ? std::sqrt(rss / yss) : 0.0;
  return f;
}

}  // namespace snc
