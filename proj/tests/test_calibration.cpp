#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "innkeeper/calibration.hpp"

using namespace innkeeper;

TEST_CASE("lemma1 sample size: frozen values") {
  const ModelParams m = canonical_model();
  // max(4*.8*.2, 4*.3*.7) = 0.84; gap^2 = 0.25
  CHECK(lemma1_sample_size(m, 0.1) == 34);    // 33.6 -> 34
  CHECK(lemma1_sample_size(m, 0.025) == 135); // 134.4 -> 135
  const ModelParams sym{0.5, 0.75, 0.25, 0.45};
  CHECK(lemma1_sample_size(sym, 0.1) == 30);  // exactly 30, no ceil slack
  CHECK_THROWS_AS(lemma1_sample_size(m, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(lemma1_sample_size(m, 1.0), std::invalid_argument);
}

TEST_CASE("theorem sample size composes the two operands") {
  const ModelParams m = canonical_model();
  // eps' = min(0.5, 0.5*(0.5-0.3)/2) = 0.05 -> 68; eps/4 = 0.025 -> 135
  CHECK(theorem_sample_size(m, 0.1) == 135);
  CHECK(lemma1_sample_size(m, 0.05) == 68);
}

TEST_CASE("switching horizon: frozen values and the Chebyshev inequality") {
  const ModelParams m = canonical_model();
  CHECK(switching_horizon(m, 135, 1.0, 0.1) == 3375);
  CHECK(switching_horizon(m, 1, 1.0, 0.1) == 170);

  // the result satisfies n*p(1-p) / (k - n(1-p))^2 <= gamma
  const double n = 3375, k = 135, p = 0.8;
  const double gamma = std::min(1.0 / 540.0, 0.025);
  CHECK(n * p * (1 - p) / std::pow(k - n * (1 - p), 2) <= gamma + 1e-15);

  ModelParams never_fails = m;
  never_fails.p_high = 1.0;
  CHECK_THROWS_AS(switching_horizon(never_fails, 135, 1.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("population bound") {
  CHECK(population_bound(135, 3375, 0.1) == 70200);  // 20 * 3510 exactly
  CHECK(population_bound(1, 170, 0.1) == 3420);
}

TEST_CASE("per-switch subsidy never lets 2k payments exceed the budget") {
  CHECK(per_switch_subsidy(1.0, 1) == 0.5);
  const double s = per_switch_subsidy(1.0, 135);
  CHECK(static_cast<long double>(s) * 270.0L <= 1.0L);
  CHECK(s * 270.0 == doctest::Approx(1.0).epsilon(1e-12));
  for (std::int64_t k : {2, 3, 7, 10, 135, 999}) {
    const double sub = per_switch_subsidy(1.0, k);
    CHECK(static_cast<long double>(sub) * static_cast<long double>(2 * k) <=
          1.0L);
  }
}

TEST_CASE("solve_delta: k = 1 canonical gives 4/9") {
  const ModelParams m = canonical_model();
  const DeltaResult d = solve_delta(m, 1);
  CHECK(d.delta == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(!d.clamped);
  CHECK(d.delta == d.delta_unclamped);
}

TEST_CASE("solve_delta: interior solutions satisfy the indifference blend") {
  const ModelParams m = canonical_model();
  for (int k : {1, 2, 3, 5, 10, 50, 135}) {
    const EventProbs ev = event_probabilities(m, k);
    const SwitchExpectations ex = switch_expectations(m, ev);
    const DeltaResult d = solve_delta(m, k);
    if (d.clamped) continue;
    double num = d.delta * ev.r1 * *ex.e1;
    double den = d.delta * ev.r1;
    if (ex.e2) { num += ev.r2 * *ex.e2; den += ev.r2; }
    if (ex.e3) { num += ev.s * *ex.e3; den += ev.s; }
    CHECK(num / den == doctest::Approx(m.b).epsilon(1e-12));
  }
}

TEST_CASE("calibrate: canonical reproduction") {
  const ModelParams m = canonical_model();
  const CalibrationReport report = calibrate(m, 0.1, 1.0);
  CHECK(report.params.k == 135);
  CHECK(report.params.n_hat == 3375);
  CHECK(report.params.n_prime == 70200);
  CHECK(report.params.delta >= 0.0);
  CHECK(report.params.delta <= 1.0);
  CHECK(!report.delta_clamped);
  CHECK(report.params.subsidy * 270.0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(static_cast<long double>(report.params.subsidy) * 270.0L <= 1.0L);
  CHECK(report.gamma == doctest::Approx(1.0 / 540).epsilon(1e-15));
  CHECK(report.epsilon_prime == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(std::abs(report.mixture_residual) <= 1e-12);
  REQUIRE(report.expectations.e1.has_value());
  CHECK(*report.expectations.e1 > m.b);
}

TEST_CASE("calibrate: input validation") {
  const ModelParams m = canonical_model();
  CHECK_THROWS_AS(calibrate(m, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(calibrate(m, 0.1, 0.0), std::invalid_argument);
  ModelParams bad = m;
  bad.b = 0.6;
  CHECK_THROWS_AS(calibrate(bad, 0.1, 1.0), std::invalid_argument);
  try {
    calibrate(bad, 0.1, 1.0);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("prior mean") != std::string::npos);
  }
}

TEST_CASE("calibrate: constants move the right way with eps") {
  const ModelParams m = canonical_model();
  const CalibrationReport loose = calibrate(m, 0.2, 1.0);
  const CalibrationReport tight = calibrate(m, 0.05, 1.0);
  CHECK(tight.params.k >= loose.params.k);
  CHECK(tight.params.n_hat >= loose.params.n_hat);
  CHECK(tight.params.n_prime >= loose.params.n_prime);
}
