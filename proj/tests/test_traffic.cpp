#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "snc/traffic.hpp"

using namespace snc;
using Catch::Approx;

TEST_CASE("leaky bucket log MGF frozen values") {
  // frozen against 40-digit evaluations of ln(1 + (rd/(b+rd))(e^{theta(b+rd)}-1))
  CHECK(log_leaky_bucket_mgf(1.0, 1.0, 1.0, 1) ==
        Approx(1.4337808304830273).epsilon(1e-14));
  CHECK(log_leaky_bucket_mgf(1e-6, 1e6, 3000.0, 100) ==
        Approx(0.47994872412069345).epsilon(1e-14));
  CHECK(log_leaky_bucket_mgf(1e-5, 1e6, 3000.0, 7) ==
        Approx(6.3277354891218645).epsilon(1e-14));
  CHECK(log_leaky_bucket_mgf(2.443e-6, 2e5, 600.0, 250) ==
        Approx(0.45692525180079674).epsilon(1e-14));
  // deep in the regime where the linear-space formula overflows
  CHECK(log_leaky_bucket_mgf(1e-3, 1e5, 30.0, 12) ==
        Approx(94.7295850309698).epsilon(1e-14));
  CHECK(log_leaky_bucket_mgf(1e-4, 1e6, 3000.0, 50) ==
        Approx(112.96311807273896).epsilon(1e-14));
  // empty window
  CHECK(log_leaky_bucket_mgf(1e-4, 1e6, 3000.0, 0) == 0.0);
  CHECK(log_leaky_bucket_mgf(1e-4, 1e6, 0.0, 25) == 0.0);  // zero rate
}

TEST_CASE("leaky_bucket_mgf curve structure") {
  double theta = 1e-5, b = 1e6, r = 3000.0;
  MgfCurve c = leaky_bucket_mgf(theta, b, r, 128);
  CHECK(c.kind == CurveKind::arrival);
  CHECK(c.horizon() == 128);
  CHECK(c.seq.v[0] == 0.0);
  CHECK(c.seq.v[7] == Approx(6.3277354891218645).epsilon(1e-13));
  // count multiplies the log curve (independent homogeneous flows)
  MgfCurve c3 = leaky_bucket_mgf(theta, b, r, 128, 3);
  for (long d = 0; d <= 128; ++d)
    CHECK(c3.seq.v[static_cast<std::size_t>(d)] ==
          Approx(3.0 * c.seq.v[static_cast<std::size_t>(d)]).epsilon(1e-13).margin(1e-300));
  // increments approach theta r from above, so the certificate exceeds it
  CHECK(c.seq.tail.log_ratio >= theta * r);
  CHECK(c3.seq.tail.log_ratio >= 3.0 * theta * r);
}

TEST_CASE("cbr and sigma-rho curves are exact envelopes") {
  double theta = 2e-4;
  MgfCurve cbr = cbr_mgf(theta, 500.0, 64, 2);
  for (long d = 0; d <= 64; ++d)
    CHECK(cbr.seq.v[static_cast<std::size_t>(d)] ==
          Approx(theta * 1000.0 * d).margin(1e-12));
  CHECK(cbr.seq.tail.log_ratio == Approx(theta * 1000.0).epsilon(1e-12));

  MgfCurve sr = sigma_rho_mgf(theta, 2e4, 700.0, 64);
  for (long d = 0; d <= 64; ++d)
    CHECK(sr.seq.v[static_cast<std::size_t>(d)] ==
          Approx(theta * (2e4 + 700.0 * d)).epsilon(1e-13));
}

TEST_CASE("aggregate multiplies MGFs") {
  double theta = 1e-4;
  std::vector<MgfCurve> flows{cbr_mgf(theta, 100.0, 32), sigma_rho_mgf(theta, 50.0, 40.0, 32)};
  MgfCurve agg = aggregate_mgf(flows);
  for (long d = 0; d <= 32; ++d)
    CHECK(agg.seq.v[static_cast<std::size_t>(d)] ==
          Approx(theta * (50.0 + 140.0 * d)).epsilon(1e-12).margin(1e-15));
  CHECK_THROWS_AS(aggregate_mgf(std::vector<MgfCurve>{}), std::invalid_argument);
}

TEST_CASE("effective bandwidth") {
  double theta = 1e-4;
  MgfCurve cbr = cbr_mgf(theta, 300.0, 64);
  // deterministic flow: effective bandwidth is the rate at every scale
  CHECK(effective_bandwidth(cbr, 1) == Approx(300.0).epsilon(1e-12));
  CHECK(effective_bandwidth(cbr, 64) == Approx(300.0).epsilon(1e-12));

  MgfCurve lb = leaky_bucket_mgf(1e-5, 1e5, 200.0, 256);
  double eb_short = effective_bandwidth(lb, 4);
  double eb_long = effective_bandwidth(lb, 256);
  CHECK(eb_short > 200.0);           // burstiness inflates small scales
  CHECK(eb_long > 200.0);
  CHECK(eb_long < eb_short);         // and washes out with the horizon
  CHECK(eb_short <= (1e5 + 200.0 * 4) / 4.0 + 1e-9);  // never above peak need

  CHECK_THROWS_AS(effective_bandwidth(lb, 0), std::invalid_argument);
  CHECK_THROWS_AS(effective_bandwidth(lb, 257), std::invalid_argument);
}

TEST_CASE("fit_sigma_rho dominates the curve and is tight on affine input") {
  double theta = 3e-5;
  MgfCurve sr = sigma_rho_mgf(theta, 4e4, 900.0, 128);
  SigmaRho f = fit_sigma_rho(sr);
  CHECK(f.sigma_bits == Approx(4e4).epsilon(1e-10));
  CHECK(f.rho_bits_per_slot == Approx(900.0).epsilon(1e-10));

  MgfCurve lb = leaky_bucket_mgf(1e-5, 2e5, 600.0, 256);
  SigmaRho g = fit_sigma_rho(lb);
  // the fitted envelope must dominate every grid point and the tail ratio
  for (long d = 0; d <= 256; ++d)
    CHECK(1e-5 * (g.sigma_bits + g.rho_bits_per_slot * d) >=
          lb.seq.v[static_cast<std::size_t>(d)] - 1e-9);
  CHECK(1e-5 * g.rho_bits_per_slot >= lb.seq.tail.log_ratio - 1e-12);
}

TEST_CASE("holder_product combines dependent flows at conjugate exponents") {
  double theta = 1e-4;
  HolderPair hp{2.0, 2.0};
  REQUIRE(hp.valid());
  MgfCurve x = sigma_rho_mgf(2.0 * theta, 1e4, 300.0, 48);
  MgfCurve y = sigma_rho_mgf(2.0 * theta, 2e4, 500.0, 48);
  MgfCurve out = holder_product(x, y, hp, theta);
  CHECK(out.theta == theta);
  for (long d = 0; d <= 48; ++d)
    CHECK(out.seq.v[static_cast<std::size_t>(d)] ==
          Approx(theta * (3e4 + 800.0 * d)).epsilon(1e-12));

  CHECK_FALSE(HolderPair{1.0, 2.0}.valid());
  CHECK_FALSE(HolderPair{3.0, 2.0}.valid());
  CHECK(HolderPair{3.0, 1.5}.valid());
  CHECK_THROWS_AS(holder_product(x, y, HolderPair{3.0, 1.5}, theta), std::invalid_argument);
}
