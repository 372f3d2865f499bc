#include <doctest.h>

#include <cstdint>
#include <vector>

#include "qoslab/rtcp.hpp"

using namespace qoslab;

namespace {

struct SplitMix64 {
  uint64_t s;
  uint64_t next() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (next() >> 11) * (1.0 / 9007199254740992.0) * (hi - lo);
  }
};

// Independently coded brute-force jitter recurrence used as the oracle.
double brute_force_jitter(const std::vector<double>& transits) {
  double j = 0.0;
  for (size_t i = 1; i < transits.size(); ++i) {
    const double d = transits[i] - transits[i - 1];
    const double abs_d = d < 0 ? -d : d;
    j = j + (abs_d - j) / 16.0;
  }
  return j;
}

}  // namespace

TEST_CASE("update_jitter: seed then gain-1/16 recurrence, frozen values") {
  JitterState s;
  s = update_jitter(s, 10.0);  // seeds the transit reference only
  CHECK(s.j_ms == doctest::Approx(0.0));
  s = update_jitter(s, 18.0);  // |D| = 8
  CHECK(s.j_ms == doctest::Approx(0.5));
  s = update_jitter(s, 12.0);  // |D| = 6
  CHECK(s.j_ms == doctest::Approx(0.84375));
  s = update_jitter(s, 12.0);  // |D| = 0, decays
  CHECK(s.j_ms == doctest::Approx(0.791015625));
}

TEST_CASE("update_jitter: converges to |D| under a constant alternation") {
  // Transits alternating by a fixed step have constant |D| = 4; the
  // recurrence converges to that value.
  JitterState s;
  double t = 100.0;
  for (int i = 0; i < 500; ++i) {
    s = update_jitter(s, t);
    t = (i % 2 == 0) ? t + 4.0 : t - 4.0;
  }
  CHECK(s.j_ms == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("update_jitter: matches brute-force oracle on random sequences") {
  SplitMix64 rng{123};
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next() % 64);
    std::vector<double> transits;
    transits.reserve(n);
    for (int i = 0; i < n; ++i) transits.push_back(rng.uniform(0.0, 500.0));
    JitterState s;
    for (double t : transits) s = update_jitter(s, t);
    const double expected = brute_force_jitter(transits);
    const double scale = expected > 1.0 ? expected : 1.0;
    REQUIRE(s.j_ms == doctest::Approx(expected).epsilon(1e-9));
    REQUIRE(s.j_ms >= 0.0);
    (void)scale;
  }
}

TEST_CASE("compute_rtt: LSR/DLSR arithmetic and malformed input") {
  CHECK(compute_rtt(1000.0, 800.0, 150.0) == doctest::Approx(50.0));
  CHECK(compute_rtt(500.0, 500.0, 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(compute_rtt(900.0, 800.0, 150.0), MalformedReport);
}

TEST_CASE("estimate_bandwidth: oracle strategy returns emulator truth") {
  EstimatorState s;
  s.strategy = EstimatorStrategy::Oracle;
  s = estimate_bandwidth(s, 3000.0, 0.0, 0.0, 10000.0);
  CHECK(s.est_kbps == doctest::Approx(10000.0));
  s = estimate_bandwidth(s, 3000.0, 500.0, 0.5, 1000.0);  // signals ignored
  CHECK(s.est_kbps == doctest::Approx(1000.0));
}

TEST_CASE("estimate_bandwidth: delay-gradient decrease and increase rules") {
  EstimatorState s;
  s.strategy = EstimatorStrategy::DelayGradient;
  s.est_kbps = 10000.0;

  SUBCASE("queue delay above threshold decreases multiplicatively") {
    s = estimate_bandwidth(s, 900.0, 60.0, 0.0, 0.0);
    CHECK(s.est_kbps == doctest::Approx(8500.0));
  }
  SUBCASE("loss above threshold decreases multiplicatively") {
    s = estimate_bandwidth(s, 900.0, 0.0, 0.03, 0.0);
    CHECK(s.est_kbps == doctest::Approx(8500.0));
  }
  SUBCASE("clean interval increases gently") {
    s = estimate_bandwidth(s, 900.0, 0.0, 0.0, 0.0);
    CHECK(s.est_kbps == doctest::Approx(10800.0));
  }
  SUBCASE("measured throughput can pull the estimate up faster") {
    s = estimate_bandwidth(s, 50000.0, 0.0, 0.0, 0.0);
    CHECK(s.est_kbps == doctest::Approx(50000.0));
  }
  SUBCASE("estimate never exceeds the cap") {
    s.est_kbps = s.est_cap_kbps;
    s = estimate_bandwidth(s, 0.0, 0.0, 0.0, 0.0);
    CHECK(s.est_kbps == doctest::Approx(s.est_cap_kbps));
  }
}

TEST_CASE("estimate_bandwidth: delay-gradient stays within (0, cap] (fuzz)") {
  SplitMix64 rng{9};
  EstimatorState s;
  s.strategy = EstimatorStrategy::DelayGradient;
  for (int i = 0; i < 10000; ++i) {
    s = estimate_bandwidth(s, rng.uniform(0, 250000), rng.uniform(0, 200),
                           rng.uniform(0, 1), 0.0);
    REQUIRE(s.est_kbps > 0.0);
    REQUIRE(s.est_kbps <= s.est_cap_kbps);
  }
}

TEST_CASE("build_report packages the estimator and jitter state") {
  JitterState jitter;
  jitter = update_jitter(jitter, 10.0);
  jitter = update_jitter(jitter, 18.0);
  EstimatorState est;
  est.est_kbps = 4321.0;
  const ReceiverReport r =
      build_report(jitter, est, 55.0, 0.01, PathId::Download, 1500.0, 3);
  CHECK(r.metrics.bandwidth_kbps == doctest::Approx(4321.0));
  CHECK(r.metrics.rtt_ms == doctest::Approx(55.0));
  CHECK(r.metrics.jitter_ms == doctest::Approx(0.5));
  CHECK(r.metrics.sampled_at_ms == doctest::Approx(1500.0));
  CHECK(r.path == PathId::Download);
  CHECK(r.seq == 3);
  CHECK(r.loss_fraction == doctest::Approx(0.01));
}
