#include <doctest.h>

#include <cstdint>

#include "qoslab/rate_control.hpp"

using namespace qoslab;

namespace {

// Deterministic generator for property tests.
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

PathMetrics metrics(double bw, double rtt, double jit) {
  return PathMetrics{bw, rtt, jit, 0.0};
}

}  // namespace

TEST_CASE("classify: documented boundary table") {
  const Thresholds th;

  // All metrics strictly better than the Good/Mid row.
  CHECK(classify(metrics(100000, 20, 1), th) == Level::Good);
  // Exactly on every Good/Mid border counts as Good (inclusive).
  CHECK(classify(metrics(10000, 90, 2), th) == Level::Good);
  // One metric in the mid band pulls the level to Mid.
  CHECK(classify(metrics(100000, 120, 1), th) == Level::Mid);
  // Exactly on a Mid/Poor border is still Mid (Poor requires strict violation).
  CHECK(classify(metrics(5000, 180, 8), th) == Level::Mid);
  // Any single strict violation forces Poor.
  CHECK(classify(metrics(4999, 20, 1), th) == Level::Poor);
  CHECK(classify(metrics(100000, 180.5, 1), th) == Level::Poor);
  CHECK(classify(metrics(100000, 20, 8.5), th) == Level::Poor);
}

TEST_CASE("classify: exhaustive below/at/above grid per metric") {
  const Thresholds th;
  // For each metric: value classes {good side of good border, on good border,
  // mid band, on poor border, strictly poor}. Cross three metrics and check
  // the combination rule: Good iff all good, Poor iff any strictly poor.
  const double bw[] = {20000, 10000, 7000, 5000, 4000};
  const double rtt[] = {30, 90, 120, 180, 200};
  const double jit[] = {1, 2, 5, 8, 9};
  const bool good_class[] = {true, true, false, false, false};
  const bool poor_class[] = {false, false, false, false, true};
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        const Level got = classify(metrics(bw[a], rtt[b], jit[c]), th);
        const bool all_good = good_class[a] && good_class[b] && good_class[c];
        const bool any_poor = poor_class[a] || poor_class[b] || poor_class[c];
        Level want = Level::Mid;
        if (all_good) want = Level::Good;
        if (any_poor) want = Level::Poor;
        CAPTURE(bw[a]);
        CAPTURE(rtt[b]);
        CAPTURE(jit[c]);
        CHECK(got == want);
      }
    }
  }
}

TEST_CASE("classify: Good-all and Poor-any can never hold at once (fuzz)") {
  const Thresholds th;
  SplitMix64 rng{42};
  for (int i = 0; i < 100000; ++i) {
    const PathMetrics m = metrics(rng.uniform(0, 200000), rng.uniform(0, 1000),
                                  rng.uniform(0, 50));
    const bool all_good = m.bandwidth_kbps >= th.good_mid.bw_kbps &&
                          m.rtt_ms <= th.good_mid.rtt_ms &&
                          m.jitter_ms <= th.good_mid.jitter_ms;
    const bool any_poor = m.bandwidth_kbps < th.mid_poor.bw_kbps ||
                          m.rtt_ms > th.mid_poor.rtt_ms ||
                          m.jitter_ms > th.mid_poor.jitter_ms;
    REQUIRE_FALSE((all_good && any_poor));
    const Level got = classify(m, th);
    if (all_good) REQUIRE(got == Level::Good);
    if (any_poor) REQUIRE(got == Level::Poor);
    if (!all_good && !any_poor) REQUIRE(got == Level::Mid);
  }
}

TEST_CASE("classify: monotone in each metric (fuzz)") {
  const Thresholds th;
  SplitMix64 rng{7};
  for (int i = 0; i < 20000; ++i) {
    PathMetrics worse = metrics(rng.uniform(0, 30000), rng.uniform(0, 400),
                                rng.uniform(0, 20));
    PathMetrics better = worse;
    better.bandwidth_kbps += rng.uniform(0, 10000);
    better.rtt_ms -= rng.uniform(0, better.rtt_ms);
    better.jitter_ms -= rng.uniform(0, better.jitter_ms);
    REQUIRE(static_cast<int>(classify(better, th)) >=
            static_cast<int>(classify(worse, th)));
  }
}

TEST_CASE("level_params: ladder rows") {
  const EncodingLadder ladder;
  CHECK(level_params(Level::Good, ladder) == EncodingLevel{4000, 30, 1920, 1080, 5});
  CHECK(level_params(Level::Mid, ladder) == EncodingLevel{2200, 15, 1920, 1080, 7});
  CHECK(level_params(Level::Poor, ladder) == EncodingLevel{700, 5, 640, 360, 5});
  CHECK(ladder.valid());
}

TEST_CASE("combine: worst-case merge commutes with classify (fuzz)") {
  const Thresholds th;
  SplitMix64 rng{11};
  for (int i = 0; i < 50000; ++i) {
    const PathMetrics u = metrics(rng.uniform(0, 30000), rng.uniform(0, 400),
                                  rng.uniform(0, 20));
    const PathMetrics d = metrics(rng.uniform(0, 30000), rng.uniform(0, 400),
                                  rng.uniform(0, 20));
    const PathMetrics c = combine(u, d);
    REQUIRE(c.bandwidth_kbps == std::min(u.bandwidth_kbps, d.bandwidth_kbps));
    REQUIRE(c.rtt_ms == std::max(u.rtt_ms, d.rtt_ms));
    REQUIRE(c.jitter_ms == std::max(u.jitter_ms, d.jitter_ms));
    REQUIRE(classify(c, th) == min_level(classify(u, th), classify(d, th)));
  }
}

TEST_CASE("decide: level change, identity, and hold-down") {
  const Thresholds th;
  const EncodingLadder ladder;

  ControllerState state;  // starts Good
  const auto change = decide(state, metrics(1000, 20, 1), th, ladder, 100.0);
  REQUIRE(change.has_value());
  CHECK(change->first == Level::Poor);
  CHECK(change->second == ladder.poor);
  CHECK(state.current_level == Level::Poor);
  CHECK(state.last_decision_at_ms == 100.0);

  // Identical regime: at most one change (idempotent).
  CHECK_FALSE(decide(state, metrics(1000, 20, 1), th, ladder, 200.0).has_value());

  ControllerState held;
  held.hold_down_ms = 1000.0;
  held.last_decision_at_ms = 0.0;
  CHECK_FALSE(decide(held, metrics(1000, 20, 1), th, ladder, 400.0).has_value());
  CHECK(held.current_level == Level::Good);
  const auto late = decide(held, metrics(1000, 20, 1), th, ladder, 1200.0);
  REQUIRE(late.has_value());
  CHECK(late->first == Level::Poor);
}

TEST_CASE("thresholds and metrics validity") {
  CHECK(Thresholds{}.valid());
  Thresholds crossed;
  crossed.mid_poor.bw_kbps = 20000;  // poor border above good border
  CHECK_FALSE(crossed.valid());
  CHECK(PathMetrics{1000, 50, 1, 0}.valid());
  CHECK_FALSE(PathMetrics{-1, 50, 1, 0}.valid());
}
