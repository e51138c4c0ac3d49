#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "innkeeper/beliefs.hpp"
#include "innkeeper/rng.hpp"
#include "oracles.hpp"

using namespace innkeeper;

TEST_CASE("posterior from counts: canonical spot values") {
  const ModelParams m = canonical_model();
  CHECK(posterior_from_counts(m, 0, 0) == 0.5);  // no evidence: prior
  CHECK(posterior_from_counts(m, 1, 1) == doctest::Approx(8.0 / 11).epsilon(1e-15));
  CHECK(posterior_from_counts(m, 0, 1) == doctest::Approx(2.0 / 9).epsilon(1e-15));
}

TEST_CASE("posterior from counts: strictly increasing in successes") {
  const ModelParams m = canonical_model();
  double prev = -1.0;
  for (int s = 0; s <= 5; ++s) {
    const double post = posterior_from_counts(m, s, 5);
    CHECK(post > prev);
    CHECK(post >= 0.0);
    CHECK(post <= 1.0);
    prev = post;
  }
}

TEST_CASE("posterior from counts: matches product form on a grid") {
  const ModelParams m{0.37, 0.81, 0.24, 0.45};
  for (int n = 0; n <= 40; ++n)
    for (int s = 0; s <= n; ++s)
      CHECK(posterior_from_counts(m, s, n) ==
            doctest::Approx(oracle::posterior(m, s, n)).epsilon(1e-12));
}

TEST_CASE("posterior from counts: degenerate success probabilities") {
  ModelParams m = canonical_model();
  m.p_high = 1.0;  // a failure rules High out entirely
  CHECK(posterior_from_counts(m, 1, 2) == 0.0);
  CHECK(posterior_from_counts(m, 2, 2) > 0.5);

  m = canonical_model();
  m.p_low = 0.0;  // a success rules Low out entirely
  CHECK(posterior_from_counts(m, 1, 2) == 1.0);

  m = canonical_model();
  m.p_high = 1.0;
  m.p_low = 1.0;  // a failure is impossible in either state
  CHECK_THROWS_AS(posterior_from_counts(m, 0, 1), std::domain_error);
}

TEST_CASE("posterior from counts: input validation") {
  const ModelParams m = canonical_model();
  CHECK_THROWS_AS(posterior_from_counts(m, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(posterior_from_counts(m, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(posterior_from_counts(m, 0, -1), std::invalid_argument);
}

TEST_CASE("expected risky payout is linear in the posterior") {
  const ModelParams m = canonical_model();
  CHECK(expected_risky(m, 1.0) == 0.8);
  CHECK(expected_risky(m, 0.0) == 0.3);
  CHECK(expected_risky(m, 8.0 / 11) == doctest::Approx(7.3 / 11).epsilon(1e-15));
}

TEST_CASE("cascade policy: canonical early stages") {
  const ModelParams m = canonical_model();
  const PolicyTable policy = preintervention_policy(m, 5);
  REQUIRE(policy.k == 5);

  // stage 1 sees nothing and pulls Risky on the prior
  CHECK(policy.entry(1, ObsSymbol::Start).arm == Arm::Risky);
  CHECK(policy.entry(1, ObsSymbol::Start).posterior_high == doctest::Approx(0.5));

  // stage 2: one visible success / failure
  CHECK(policy.entry(2, ObsSymbol::RewardOne).arm == Arm::Risky);
  CHECK(policy.entry(2, ObsSymbol::RewardOne).posterior_high ==
        doctest::Approx(8.0 / 11).epsilon(1e-12));
  CHECK(policy.entry(2, ObsSymbol::RewardZero).arm == Arm::Safe);
  CHECK(policy.entry(2, ObsSymbol::RewardZero).posterior_high ==
        doctest::Approx(2.0 / 9).epsilon(1e-12));

  // stage 3 seeing a failure: the chain survived stage 2, so the hidden
  // prefix must have been a success; counts are (1 success, 2 trials)
  CHECK(policy.entry(3, ObsSymbol::RewardZero).posterior_high ==
        doctest::Approx(16.0 / 37).epsilon(1e-12));
  CHECK(policy.entry(3, ObsSymbol::RewardZero).arm == Arm::Risky);

  // a safe predecessor is always copied (stage 1 has no predecessor and
  // keeps the prior entry in the unreachable slots)
  for (std::int64_t j = 2; j <= 5; ++j)
    CHECK(policy.entry(j, ObsSymbol::SafeReward).arm == Arm::Safe);
  CHECK(policy.entry(1, ObsSymbol::SafeReward).arm == Arm::Risky);
}

TEST_CASE("cascade policy: expected payouts stay inside [p_low, p_high]") {
  const ModelParams m = canonical_model();
  const PolicyTable policy = preintervention_policy(m, 20);
  for (std::int64_t j = 1; j <= 20; ++j)
    for (int sym = 0; sym < 4; ++sym) {
      const PolicyEntry& e = policy.entry(j, static_cast<ObsSymbol>(sym));
      CHECK(e.expected >= m.p_low - 1e-12);
      CHECK(e.expected <= m.p_high + 1e-12);
    }
}

TEST_CASE("cascade policy: rejects bad k and bad models") {
  const ModelParams m = canonical_model();
  CHECK_THROWS_AS(preintervention_policy(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(preintervention_policy(m, 5001), std::invalid_argument);
  ModelParams bad = m;
  bad.b = 0.9;
  CHECK_THROWS_AS(preintervention_policy(bad, 3), std::invalid_argument);
}

TEST_CASE("event probabilities: k = 1 has no break mass") {
  const ModelParams m = canonical_model();
  const EventProbs ev = event_probabilities(m, 1);
  CHECK(ev.r1_high == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(ev.r2_high == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ev.s_high == 0.0);
  CHECK(ev.r1_low == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ev.r2_low == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(ev.s_low == 0.0);
  CHECK(ev.r1 == doctest::Approx(0.55).epsilon(1e-15));
  CHECK(ev.r2 == doctest::Approx(0.45).epsilon(1e-15));
  CHECK(ev.s == 0.0);
}

TEST_CASE("event probabilities: k = 2 by hand") {
  // Policy: stage 2 stays on a success, defects on a failure. So the chain
  // survives iff t1 = 1; r1 then needs both draws up (mean 1 >= 0.55),
  // (1,0) lands in r2, and t1 = 0 breaks the cascade.
  const ModelParams m = canonical_model();
  const EventProbs ev = event_probabilities(m, 2);
  CHECK(ev.r1_high == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(ev.r2_high == doctest::Approx(0.16).epsilon(1e-14));
  CHECK(ev.s_high == doctest::Approx(0.20).epsilon(1e-14));
  CHECK(ev.r1_low == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(ev.r2_low == doctest::Approx(0.21).epsilon(1e-14));
  CHECK(ev.s_low == doctest::Approx(0.70).epsilon(1e-14));
}

TEST_CASE("event probabilities: per-state masses sum to one") {
  const ModelParams m = canonical_model();
  for (int k : {1, 2, 3, 7, 20, 135}) {
    const EventProbs ev = event_probabilities(m, k);
    CHECK(ev.r1_high + ev.r2_high + ev.s_high == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev.r1_low + ev.r2_low + ev.s_low == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev.r1 == doctest::Approx(m.q * ev.r1_high + (1 - m.q) * ev.r1_low)
                       .epsilon(1e-13));
  }
}

TEST_CASE("switch expectations: k = 1 canonical") {
  const ModelParams m = canonical_model();
  const EventProbs ev = event_probabilities(m, 1);
  const SwitchExpectations ex = switch_expectations(m, ev);
  REQUIRE(ex.e1.has_value());
  REQUIRE(ex.e2.has_value());
  CHECK(!ex.e3.has_value());  // the cascade cannot break at k = 1
  CHECK(*ex.e1 == doctest::Approx(7.3 / 11).epsilon(1e-12));
  CHECK(*ex.e2 == doctest::Approx(3.7 / 9).epsilon(1e-12));
}

TEST_CASE("event probabilities agree with 2^k enumeration") {
  // 20 randomized admissible models, every k up to 12.
  SplitMix64 rng(0x5eedful);
  int models_checked = 0;
  while (models_checked < 20) {
    ModelParams m;
    m.q = 0.2 + 0.6 * rng.next_double();
    m.p_low = 0.05 + 0.45 * rng.next_double();
    m.p_high = m.p_low + 0.15 + (0.95 - m.p_low - 0.15) * rng.next_double();
    const double hi = std::min(m.p_high, m.prior_mean());
    if (hi - m.p_low < 0.02) continue;
    m.b = m.p_low + (0.25 + 0.5 * rng.next_double()) * (hi - m.p_low);
    if (!validate_model(m).empty()) continue;
    models_checked++;

    for (int k = 1; k <= 12; ++k) {
      const oracle::BruteForce brute(m, k);
      const oracle::Events want = brute.events();
      const EventProbs got = event_probabilities(m, k);
      CHECK(got.r1_high == doctest::Approx(want.r1_high).epsilon(1e-12));
      CHECK(got.r2_high == doctest::Approx(want.r2_high).epsilon(1e-12));
      CHECK(got.s_high == doctest::Approx(want.s_high).epsilon(1e-12));
      CHECK(got.r1_low == doctest::Approx(want.r1_low).epsilon(1e-12));
      CHECK(got.r2_low == doctest::Approx(want.r2_low).epsilon(1e-12));
      CHECK(got.s_low == doctest::Approx(want.s_low).epsilon(1e-12));
    }
  }
}

TEST_CASE("library policy agrees with the enumerated one") {
  SplitMix64 rng(0xca5cadeull);
  int models_checked = 0;
  while (models_checked < 10) {
    ModelParams m;
    m.q = 0.2 + 0.6 * rng.next_double();
    m.p_low = 0.05 + 0.45 * rng.next_double();
    m.p_high = m.p_low + 0.15 + (0.95 - m.p_low - 0.15) * rng.next_double();
    const double hi = std::min(m.p_high, m.prior_mean());
    if (hi - m.p_low < 0.02) continue;
    m.b = m.p_low + (0.25 + 0.5 * rng.next_double()) * (hi - m.p_low);
    if (!validate_model(m).empty()) continue;
    models_checked++;

    const int k = 9;
    const oracle::BruteForce brute(m, k);
    const PolicyTable policy = preintervention_policy(m, k);
    CHECK((policy.entry(1, ObsSymbol::Start).arm == Arm::Risky) ==
          brute.risky(1, 0));
    for (int j = 2; j <= k; ++j) {
      CHECK((policy.entry(j, ObsSymbol::RewardOne).arm == Arm::Risky) ==
            brute.risky(j, 1));
      CHECK((policy.entry(j, ObsSymbol::RewardZero).arm == Arm::Risky) ==
            brute.risky(j, 2));
    }
  }
}
