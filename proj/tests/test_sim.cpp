#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "snc/simulate.hpp"

using namespace snc;
using Catch::Approx;

TEST_CASE("make_onoff picks the smallest integral period") {
  SimSource a = make_onoff(1000, 30);
  CHECK(a.period_slots == 98);
  CHECK(a.residual_bits == 20);
  CHECK(a.burst_bits == 1000);
  // emits exactly rate * period per period
  std::int64_t per_period = 0;
  for (std::int64_t s = 0; s < a.period_slots; ++s) per_period += a.emit(s, 0);
  CHECK(per_period == 30 * 98);

  SimSource b = make_onoff(1000, 25);
  CHECK(b.period_slots == 40);
  CHECK(b.residual_bits == 0);

  // burst <= rate degenerates to CBR
  SimSource c = make_onoff(5, 100);
  CHECK(c.period_slots == 1);
  CHECK(c.emit(0, 0) == 100);
  CHECK(c.emit(17, 3) == 100);

  CHECK_THROWS_AS(make_onoff(0, 10), std::invalid_argument);
  CHECK_THROWS_AS(make_onoff(10, 0), std::invalid_argument);
}

TEST_CASE("on-off sources satisfy their leaky-bucket envelope path-wise") {
  std::vector<SimSource> srcs{make_onoff(1000, 30), make_onoff(1000, 30),
                              make_onoff(400, 7)};
  std::mt19937_64 rng = replication_rng(991, 0);
  SamplePath p = generate_path(srcs, 300, rng);
  std::int64_t burst = 1000 + 1000 + 400;
  std::int64_t rate = 30 + 30 + 7;
  for (std::size_t s = 0; s <= 300; ++s)
    for (std::size_t t = s; t <= 300; ++t)
      REQUIRE(p.over(s, t) <= burst + rate * static_cast<std::int64_t>(t - s));
}

TEST_CASE("replications are reproducible and distinct") {
  std::vector<SimSource> srcs{make_onoff(1000, 30), make_onoff(500, 11)};
  std::mt19937_64 r1 = replication_rng(42, 3);
  std::mt19937_64 r2 = replication_rng(42, 3);
  SamplePath a = generate_path(srcs, 200, r1);
  SamplePath b = generate_path(srcs, 200, r2);
  CHECK(a.cum == b.cum);

  std::mt19937_64 r3 = replication_rng(42, 4);
  SamplePath c = generate_path(srcs, 200, r3);
  CHECK(a.cum != c.cum);
}

TEST_CASE("measure computes virtual delay and censors the unresolved") {
  // burst of 1000 at slot 1 drained at 300 per slot
  SamplePath arr{std::vector<std::int64_t>{0, 1000, 1000, 1000, 1000, 1000}};
  SamplePath dep{std::vector<std::int64_t>{0, 300, 600, 900, 1000, 1000}};
  MeasureResult m = measure(arr, dep);
  CHECK(m.max_backlog_bits == 700);
  REQUIRE(m.delay_slots.size() == 5);
  CHECK(m.delay_slots[0] == 3);  // D(0,4) is the first to reach 1000
  CHECK(m.delay_slots[1] == 2);
  CHECK(m.delay_slots[2] == 1);
  CHECK(m.delay_slots[3] == 0);
  CHECK(m.delay_slots[4] == 0);
  CHECK(m.censored == 0);

  // departures never catch up inside the trace: censored, not zero
  SamplePath arr2{std::vector<std::int64_t>{0, 1000, 1000}};
  SamplePath dep2{std::vector<std::int64_t>{0, 300, 600}};
  MeasureResult m2 = measure(arr2, dep2);
  CHECK(m2.censored == 2);
  CHECK(m2.delay_slots[0] == -1);
  CHECK(m2.delay_slots[1] == -1);
}

TEST_CASE("tandem with CBR load at capacity drains every slot") {
  SimTandem net;
  net.through = {make_cbr(300)};
  net.hops = {SimHop{500, {make_cbr(200)}}, SimHop{300, {}}};
  TandemPaths p = run_tandem(net, 64, 7);
  // cross takes 200, through exactly fits the remaining 300 at hop 0 and
  // the full capacity at hop 1: departures track arrivals slot by slot
  for (std::size_t t = 0; t <= 64; ++t) {
    CHECK(p.through_departures[0].at(t) == p.through_arrivals.at(t));
    CHECK(p.through_departures[1].at(t) == p.through_arrivals.at(t));
  }
  MeasureResult m = measure(p.through_arrivals, p.through_departures[1]);
  CHECK(m.max_backlog_bits == 0);
  for (long d : m.delay_slots) CHECK(d == 0);
}

TEST_CASE("overloaded hop builds the deterministic queue") {
  SimTandem net;
  net.through = {make_cbr(400)};
  net.hops = {SimHop{300, {}}};
  std::size_t T = 50;
  TandemPaths p = run_tandem(net, T, 7);
  // backlog grows by 100 per slot
  MeasureResult m = measure(p.through_arrivals, p.through_departures[0]);
  CHECK(m.max_backlog_bits == 100 * static_cast<std::int64_t>(T));
  // departures saturate the capacity every slot
  for (std::size_t t = 1; t <= T; ++t)
    CHECK(p.through_departures[0].over(t - 1, t) == 300);
}

TEST_CASE("departures are causal, monotone and capacity-limited") {
  SimTandem net;
  net.through = {make_onoff(1000, 30), make_onoff(700, 13)};
  net.hops = {SimHop{120, {make_onoff(900, 40)}}, SimHop{90, {make_onoff(300, 20)}}};
  for (std::uint64_t rep = 0; rep < 4; ++rep) {
    TandemPaths p = run_tandem(net, 400, 12345, rep);
    const SamplePath* in = &p.through_arrivals;
    for (std::size_t i = 0; i < net.hops.size(); ++i) {
      const SamplePath& out = p.through_departures[i];
      for (std::size_t t = 1; t <= 400; ++t) {
        REQUIRE(out.at(t) >= out.at(t - 1));
        REQUIRE(out.at(t) <= in->at(t));  // cannot depart what has not arrived
        REQUIRE(out.over(t - 1, t) <= net.hops[i].capacity_bits_per_slot);
      }
      in = &out;
    }
  }
}

TEST_CASE("min-plus oracle identities on sample paths") {
  std::vector<SimSource> srcs{make_onoff(800, 25)};
  std::vector<SimSource> cross{make_onoff(500, 40)};
  std::mt19937_64 rng = replication_rng(5150, 2);
  std::size_t T = 60;
  SamplePath a = generate_path(srcs, T, rng);
  SamplePath c = generate_path(cross, T, rng);
  std::int64_t cap = 150;

  minplus_oracle::Bivariate s = minplus_oracle::leftover_bivariate(cap, c);
  // leftover definition, directly
  for (std::size_t u = 0; u <= T; ++u)
    for (std::size_t t = u; t <= T; ++t) {
      std::int64_t direct = std::max<std::int64_t>(
          0, cap * static_cast<std::int64_t>(t - u) - c.over(u, t));
      REQUIRE(s[u][t] == direct);
    }

  // A(t) - (A (*) S)(0,t) equals the deconvolution deviation at (t, t)
  std::vector<std::int64_t> conv = minplus_oracle::conv_with_arrivals(a, s);
  for (std::size_t t = 0; t <= T; ++t)
    REQUIRE(a.at(t) - conv[t] == minplus_oracle::deconv(a, s, t, t));

  // bivariate convolution is associative (exact integers)
  std::mt19937_64 rng2 = replication_rng(5150, 3);
  SamplePath c2 = generate_path(cross, T, rng2);
  SamplePath c3 = generate_path(srcs, T, rng2);
  minplus_oracle::Bivariate s2 = minplus_oracle::leftover_bivariate(130, c2);
  minplus_oracle::Bivariate s3 = minplus_oracle::leftover_bivariate(110, c3);
  minplus_oracle::Bivariate l = minplus_oracle::conv(minplus_oracle::conv(s, s2), s3);
  minplus_oracle::Bivariate r = minplus_oracle::conv(s, minplus_oracle::conv(s2, s3));
  for (std::size_t u = 0; u <= T; ++u)
    for (std::size_t t = u; t <= T; ++t) REQUIRE(l[u][t] == r[u][t]);
}

TEST_CASE("path-wise service property holds exactly on random tandems") {
  for (std::uint64_t seed : {11ULL, 902ULL, 77777ULL}) {
    SimTandem net;
    net.through = {make_onoff(1000, 30), make_onoff(200, 5)};
    net.hops = {SimHop{150, {make_onoff(600, 35)}},
                SimHop{120, {make_onoff(400, 25)}},
                SimHop{100, {}}};
    PathwiseReport rep = validate_pathwise(net, 192, seed);
    CHECK(rep.def1_ok);
    CHECK(rep.th1_ok);
    CHECK(rep.checks == 4 * 193);
  }
}

TEST_CASE("convolution MGF bound holds in Monte Carlo") {
  Lemma1Report zero = validate_lemma1(0.0, 16, 4000, 99);
  CHECK(zero.rhs_theta0 == 17.0);
  CHECK(zero.lhs == Approx(1.0).epsilon(1e-12));  // e^0 averaged
  CHECK(zero.rhs == Approx(17.0).epsilon(1e-12)); // all empirical MGFs are 1
  CHECK(zero.pass);

  for (double theta : {0.02, 0.1}) {
    Lemma1Report r = validate_lemma1(theta, 24, 20000, 1234);
    CHECK(r.pass);
    CHECK(r.lhs <= r.rhs);
  }
}

TEST_CASE("bound validation counts violations and classifies censoring") {
  // single on-off source, burst 100 rate 10 into capacity 20: period 10,
  // queue empties within 5 slots, delays per period are 4,3,2,1,0,...
  SimTandem net;
  net.through = {make_onoff(100, 10)};
  net.hops = {SimHop{20, {}}};

  ValidationReport ok = validate_bounds(net, 4, 0.2, 1000, 4, 31);
  CHECK(ok.violations == 0);
  CHECK(ok.measured + ok.censored == 4000);
  CHECK(ok.pass);

  // bound 3 is violated once per period: frequency ~0.1 fails eps = 0.05
  ValidationReport bad = validate_bounds(net, 3, 0.05, 1000, 4, 31);
  CHECK(bad.violations > 0);
  CHECK(bad.frequency == Approx(0.1).margin(0.02));
  CHECK_FALSE(bad.pass);
}
