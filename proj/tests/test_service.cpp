#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "snc/service.hpp"
#include "snc/traffic.hpp"

using namespace snc;
using Catch::Approx;

TEST_CASE("constant rate service curve") {
  double theta = 1e-4, C = 2400.0;
  MgfCurve s = constant_rate_service(theta, C, 64);
  CHECK(s.kind == CurveKind::service);
  for (long d = 0; d <= 64; ++d)
    CHECK(s.seq.v[static_cast<std::size_t>(d)] == Approx(-theta * C * d).margin(1e-12));
  CHECK(s.seq.tail.log_ratio == Approx(-theta * C).epsilon(1e-13));
}

TEST_CASE("leftover of sigma-rho cross traffic is the latency-rate curve") {
  double theta = 2e-5, C = 240000.0, sigma_c = 1e6, rho_c = 60000.0;
  long h = 256;
  MgfCurve server = constant_rate_service(theta, C, h);
  MgfCurve cross = sigma_rho_mgf(theta, sigma_c, rho_c, h);
  MgfCurve lo = leftover_service(server, cross);
  CHECK(lo.kind == CurveKind::service);

  double T = sigma_c / (C - rho_c);
  for (long d = 0; d <= h; ++d) {
    double expect = -theta * (C - rho_c) * std::max(0.0, d - T);
    CHECK(lo.seq.v[static_cast<std::size_t>(d)] == Approx(expect).epsilon(1e-12).margin(1e-12));
  }
  // certificate: exact decay rate once past the latency
  CHECK(lo.seq.tail.log_ratio == Approx(-theta * (C - rho_c)).epsilon(1e-10));

  CHECK_THROWS_AS(leftover_service(cross, cross), std::invalid_argument);
  CHECK_THROWS_AS(leftover_service(server, server), std::invalid_argument);
}

TEST_CASE("leftover voids the certificate when the clamp owns the horizon") {
  // cross so heavy that min(1, .) is still active at the end of the grid
  double theta = 1e-6, C = 1000.0;
  long h = 64;
  MgfCurve server = constant_rate_service(theta, C, h);
  MgfCurve cross = sigma_rho_mgf(theta, 1e9, 100.0, h);  // burst alone floods the grid
  MgfCurve lo = leftover_service(server, cross);
  CHECK(lo.seq.v.back() == 0.0);
  CHECK(lo.seq.tail.log_ratio == 0.0);  // refuses to promise decay it has not shown
}

TEST_CASE("concatenation of equal constant-rate hops") {
  double theta = 5e-4, C = 800.0;
  long h = 200;
  std::vector<MgfCurve> hops{constant_rate_service(theta, C, h),
                             constant_rate_service(theta, C, h)};
  MgfCurve net = concatenate(hops);
  for (long d = 0; d <= h; ++d) {
    double unclamped = std::log(static_cast<double>(d + 1)) - theta * C * d;
    CHECK(net.seq.v[static_cast<std::size_t>(d)] ==
          Approx(std::min(0.0, unclamped)).epsilon(1e-12).margin(1e-12));
  }
  // single-hop concatenation is the identity up to the final clamp
  std::vector<MgfCurve> one{constant_rate_service(theta, C, h)};
  MgfCurve same = concatenate(one);
  for (std::size_t i = 0; i < same.seq.v.size(); ++i)
    CHECK(same.seq.v[i] == Approx(one[0].seq.v[i]).margin(1e-15));
  CHECK_THROWS_AS(concatenate(std::vector<MgfCurve>{}), std::invalid_argument);
}

TEST_CASE("stability margin signs") {
  double theta = 1e-5, C = 240000.0;
  long h = 128;
  MgfCurve server = constant_rate_service(theta, C, h);
  MgfCurve cross = sigma_rho_mgf(theta, 1e6, 60000.0, h);
  MgfCurve lo = leftover_service(server, cross);

  MgfCurve light = sigma_rho_mgf(theta, 2e6, 50000.0, h);
  CHECK(stability_margin(light, lo) > 0.0);  // 50k + 60k < 240k

  MgfCurve heavy = sigma_rho_mgf(theta, 2e6, 200000.0, h);
  CHECK(stability_margin(heavy, lo) < 0.0);  // 200k + 60k > 240k

  // borderline load 1: margin collapses to zero
  MgfCurve exact = sigma_rho_mgf(theta, 2e6, C - 60000.0, h);
  CHECK(stability_margin(exact, lo) == Approx(0.0).margin(1e-9));
}
