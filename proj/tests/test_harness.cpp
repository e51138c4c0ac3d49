#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "innkeeper/calibration.hpp"
#include "innkeeper/harness.hpp"
#include "innkeeper/serialize.hpp"

using namespace innkeeper;

namespace {

MediatorParams k1_params() {
  MediatorParams p;
  p.k = 1;
  p.delta = 4.0 / 9;
  p.n_hat = 170;
  p.n_prime = 3420;
  p.beta = 1.0;
  p.subsidy = 0.5;
  p.eps = 0.1;
  return p;
}

MonteCarloConfig small_corpus(std::int64_t runs, std::uint64_t seed) {
  MonteCarloConfig cfg;
  cfg.model = canonical_model();
  cfg.params = k1_params();
  cfg.population = 60;
  cfg.runs = runs;
  cfg.master_seed = seed;
  return cfg;
}

const CheckLine* find_line(const std::vector<CheckLine>& lines,
                           const std::string& name) {
  for (const auto& l : lines)
    if (l.name == name) return &l;
  return nullptr;
}

}  // namespace

TEST_CASE("class indexing round-trips all 64 slots") {
  for (int idx = 0; idx < kClassSlots; ++idx) {
    const InfoClassKey key = class_from_index(idx);
    CHECK(class_index(key.signal, key.rec, key.obs, key.subsidized) == idx);
  }
  CHECK(class_label({PhaseSignal::Switching, Arm::Risky, ObsSymbol::RewardOne,
                     false}) == "s2/R/r1/free");
  CHECK(class_label({PhaseSignal::Switching, Arm::Safe, ObsSymbol::RewardZero,
                     true}) == "s2/S/r0/paid");
  CHECK(class_label({PhaseSignal::PreIntervention, Arm::Risky,
                     ObsSymbol::Start, false}) == "s1/R/start/free");
  CHECK(class_label({PhaseSignal::Deviation, Arm::Safe, ObsSymbol::SafeReward,
                     false}) == "s4/S/rb/free");
}

TEST_CASE("class accumulator statistics") {
  // four occurrences with comply-deviate differences {0.5, 0.5, 0, 0}
  ClassAccum c;
  c.count = 4;
  c.count_high = 3;
  c.t_sum = 3;
  c.comply_sum = 2.0;
  c.deviate_sum = 1.0;
  c.d2_sum = 0.5;

  CHECK(c.e_t() == 0.75);
  CHECK(c.e_t_se() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c.comply_mean() == 0.5);
  CHECK(c.deviate_mean() == 0.25);
  CHECK(c.margin() == 0.25);
  // var = (0.5 - 4*0.0625)/3, se = sqrt(var/4)
  CHECK(c.margin_se() == doctest::Approx(0.5 / std::sqrt(12.0)).epsilon(1e-12));
  CHECK(c.p_high_hat() == 0.75);

  ClassAccum single;
  single.count = 1;
  single.t_sum = 1;
  CHECK(single.e_t_se() == 0.0);
  CHECK(single.margin_se() == 0.0);

  ClassAccum merged = single;
  merged.merge(c);
  CHECK(merged.count == 5);
  CHECK(merged.t_sum == 4);
  CHECK(merged.count_high == 3);
  CHECK(merged.comply_sum == 2.0);
  CHECK(merged.d2_sum == 0.5);
}

TEST_CASE("state aggregate statistics and merge") {
  StateAgg a;
  a.runs = 2;
  a.mean_reward_sum = 1.0;          // runs with means 0.4 and 0.6
  a.mean_reward_sq_sum = 0.52;
  CHECK(a.mean_reward() == 0.5);
  CHECK(a.mean_reward_se() == doctest::Approx(0.1).epsilon(1e-12));

  StateAgg b;
  b.runs = 3;
  b.entered_switching = 2;
  b.max_promised = 0.7;
  a.max_promised = 0.5;
  a.entry_r2 = 1;
  b.entry_r2 = 2;
  a.merge(b);
  CHECK(a.runs == 5);
  CHECK(a.entered_switching == 2);
  CHECK(a.max_promised == 0.7);
  CHECK(a.entry_r2 == 3);

  StateAgg one;
  one.runs = 1;
  one.mean_reward_sum = 0.4;
  one.mean_reward_sq_sum = 0.16;
  CHECK(one.mean_reward_se() == 0.0);
}

TEST_CASE("corpus aggregation satisfies the counting identities") {
  const MonteCarloConfig cfg = small_corpus(400, 424242);
  const AuditReport r = monte_carlo(cfg);

  CHECK(r.high.runs + r.low.runs == cfg.runs);
  CHECK(r.high.runs > 0);
  CHECK(r.low.runs > 0);

  std::int64_t total = 0, total_high = 0, s1_total = 0;
  for (int slot = 0; slot < kClassSlots; ++slot) {
    const ClassAccum& c = r.classes[static_cast<std::size_t>(slot)];
    total += c.count;
    total_high += c.count_high;
    if (class_from_index(slot).signal == PhaseSignal::PreIntervention)
      s1_total += c.count;
  }
  CHECK(total == cfg.runs * cfg.population);
  CHECK(total_high == r.high.runs * cfg.population);
  CHECK(s1_total == cfg.runs * cfg.params.k);
  // compliant corpus: the only cascade class is stage 1's
  CHECK(r.cls(PhaseSignal::PreIntervention, Arm::Risky, ObsSymbol::Start, false)
            .count == cfg.runs);

  const StateAgg pooled = r.pooled();
  CHECK(pooled.entered_switching ==
        pooled.entry_r1_coin + pooled.entry_r2 + pooled.entry_safe_break);
  CHECK(pooled.first_switch_runs == pooled.entered_switching);
  CHECK(pooled.entered_switching + /*direct exploits*/ pooled.exploited -
            pooled.completed ==
        cfg.runs);  // every run either exploits directly or enters switching
  CHECK(pooled.deviated == 0);
  CHECK(pooled.switch_violations == 0);
  CHECK(pooled.budget_violations == 0);
  CHECK(pooled.max_promised <= cfg.params.beta);
  // completed runs pay k switches each way
  CHECK(r.completed_safe_switch.count == pooled.completed * cfg.params.k);
  CHECK(r.completed_risky_switch.count == pooled.completed * cfg.params.k);
}

TEST_CASE("reports are reproducible and independent of worker count") {
  MonteCarloConfig cfg = small_corpus(400, 77001);
  const AuditReport r1 = monte_carlo(cfg);
  const AuditReport r2 = monte_carlo(cfg);
  CHECK(audit_report_to_json(r1).dump() == audit_report_to_json(r2).dump());

  cfg.threads = 3;
  const AuditReport t3 = monte_carlo(cfg);
  const AuditReport t3b = monte_carlo(cfg);
  CHECK(audit_report_to_json(t3).dump() == audit_report_to_json(t3b).dump());

  // integer aggregates match the single-thread fold exactly
  CHECK(t3.high.runs == r1.high.runs);
  CHECK(t3.low.runs == r1.low.runs);
  CHECK(t3.pooled().entered_switching == r1.pooled().entered_switching);
  CHECK(t3.pooled().completed == r1.pooled().completed);
  CHECK(t3.pooled().exploited == r1.pooled().exploited);
  CHECK(t3.pooled().first_switch_t_sum == r1.pooled().first_switch_t_sum);
  for (int slot = 0; slot < kClassSlots; ++slot) {
    const ClassAccum& a = t3.classes[static_cast<std::size_t>(slot)];
    const ClassAccum& b = r1.classes[static_cast<std::size_t>(slot)];
    CHECK(a.count == b.count);
    CHECK(a.count_high == b.count_high);
    CHECK(a.t_sum == b.t_sum);
    // double folds may differ across worker counts only by merge order
    CHECK(a.comply_sum == doctest::Approx(b.comply_sum).epsilon(1e-12));
    CHECK(a.deviate_sum == doctest::Approx(b.deviate_sum).epsilon(1e-12));
  }
  CHECK(t3.high.max_promised == r1.high.max_promised);
  CHECK(t3.high.mean_reward_sum ==
        doctest::Approx(r1.high.mean_reward_sum).epsilon(1e-12));
}

TEST_CASE("forcing the state empties the other aggregate") {
  MonteCarloConfig cfg = small_corpus(100, 5);
  cfg.forced_state = WorldState::High;
  const AuditReport r = monte_carlo(cfg);
  CHECK(r.high.runs == 100);
  CHECK(r.low.runs == 0);
  std::int64_t total_high = 0;
  for (const auto& c : r.classes) total_high += c.count_high;
  CHECK(total_high == 100 * cfg.population);
}

TEST_CASE("stage buckets partition the paid switches of completed runs") {
  MonteCarloConfig cfg = small_corpus(300, 90210);
  cfg.stage_bucket_width = 10;
  const AuditReport r = monte_carlo(cfg);
  REQUIRE(!r.bucket_counts.empty());
  CHECK(r.bucket_counts.size() <= 6);  // population 60, width 10
  std::int64_t safe = 0, risky = 0;
  for (const auto& b : r.bucket_counts) {
    safe += b[0];
    risky += b[1];
  }
  CHECK(safe == r.completed_safe_switch.count);
  CHECK(risky == r.completed_risky_switch.count);
}

TEST_CASE("corpus inputs are validated") {
  MonteCarloConfig cfg = small_corpus(0, 1);
  CHECK_THROWS_AS(monte_carlo(cfg), std::invalid_argument);
  cfg = small_corpus(10, 1);
  cfg.population = 0;
  CHECK_THROWS_AS(monte_carlo(cfg), std::invalid_argument);
  cfg = small_corpus(10, 1);
  cfg.params.k = 0;
  CHECK_THROWS_AS(monte_carlo(cfg), std::invalid_argument);
}

TEST_CASE("incentive audit passes on a compliant corpus") {
  // A k = 1 sample is too weak for the canonical model: low-state runs
  // exploit Risky off one lucky draw often enough that the exploit classes
  // conditioned on a fresh failure genuinely favor deviation. A zero p_low
  // keeps low-state runs out of every exploit-Risky class, so compliance
  // wins outright in each class that occurs.
  MonteCarloConfig cfg;
  cfg.model.q = 0.5;
  cfg.model.p_high = 0.98;
  cfg.model.p_low = 0.0;
  cfg.model.b = 0.45;
  cfg.params = k1_params();
  cfg.params.delta = solve_delta(cfg.model, 1).delta;
  cfg.params.n_hat = switching_horizon(cfg.model, 1, 1.0, 0.1);
  cfg.params.n_prime = population_bound(1, cfg.params.n_hat, 0.1);
  cfg.population = 400;
  cfg.runs = 400;
  cfg.master_seed = 424242;
  const AuditReport r = monte_carlo(cfg);
  const IcAuditResult ic = ic_audit(r, IcTolerances{3.0, 30});

  CHECK(ic.all_pass(false));
  bool saw_paid_safe = false;
  for (const auto& line : ic.classes) {
    CHECK(line.name.substr(0, 3) == "ic ");
    if (line.name == "ic s2/S/r0/paid") {
      saw_paid_safe = true;
      // complying pays b + subsidy = 1.0, a certain win
      CHECK(line.verdict == Verdict::Pass);
    }
  }
  CHECK(saw_paid_safe);
  CHECK(ic.continuation_mean.verdict == Verdict::Pass);
  CHECK(ic.exploit_safe_mean.verdict == Verdict::Pass);

  // absurd min_count turns every verdict inconclusive; strict mode rejects
  const IcAuditResult shy = ic_audit(r, IcTolerances{3.0, 1 << 30});
  CHECK(shy.all_pass(false));
  CHECK(!shy.all_pass(true));
  for (const auto& line : shy.classes)
    CHECK(line.verdict == Verdict::Inconclusive);
}

TEST_CASE("lemma checks flag an undersized sample and clear a real one") {
  // k = 1 keeps the switching machinery honest but is far too small for the
  // midpoint classifier, so the misclassification lines must FAIL while the
  // structural lines pass.
  const std::vector<CheckLine> lines =
      lemma_checks(canonical_model(), k1_params(), 60, 800, 31337);

  const CheckLine* mis_h = find_line(lines, "misclassification_high");
  const CheckLine* mis_l = find_line(lines, "misclassification_low");
  const CheckLine* comp_h = find_line(lines, "switching_completion_high");
  const CheckLine* comp_l = find_line(lines, "switching_completion_low");
  const CheckLine* balance = find_line(lines, "switch_balance");
  const CheckLine* gap = find_line(lines, "switch_mean_gap");
  REQUIRE(mis_h != nullptr);
  REQUIRE(mis_l != nullptr);
  REQUIRE(comp_h != nullptr);
  REQUIRE(comp_l != nullptr);
  REQUIRE(balance != nullptr);
  REQUIRE(gap != nullptr);

  CHECK(mis_h->verdict == Verdict::Fail);  // one draw misreads High ~20%
  CHECK(mis_h->bound == doctest::Approx(0.025));
  CHECK(mis_h->observed > 0.1);
  CHECK(mis_l->verdict == Verdict::Fail);

  CHECK(comp_h->verdict == Verdict::Pass);
  CHECK(comp_l->verdict == Verdict::Pass);
  CHECK(balance->verdict == Verdict::Pass);
  CHECK(gap->verdict == Verdict::Pass);
}

TEST_CASE("verdict names") {
  CHECK(std::string(to_string(Verdict::Pass)) == "PASS");
  CHECK(std::string(to_string(Verdict::Fail)) == "FAIL");
  CHECK(std::string(to_string(Verdict::Inconclusive)) == "INCONCLUSIVE");
}
