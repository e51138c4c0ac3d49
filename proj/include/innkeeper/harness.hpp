#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "innkeeper/engine.hpp"

namespace innkeeper {

// An information class is everything an agent can tell about its situation:
// the phase signal, the recommended arm, what it saw its predecessor do, and
// whether the recommendation carries a subsidy. Incentive compatibility is
// audited per class: within a class, following the recommendation must not
// lose to the alternative on average.
struct InfoClassKey {
  PhaseSignal signal = PhaseSignal::PreIntervention;
  Arm rec = Arm::Risky;
  ObsSymbol obs = ObsSymbol::Start;
  bool subsidized = false;
};

inline constexpr int kClassSlots = 64;  // 4 signals x 2 arms x 4 symbols x 2

inline int class_index(PhaseSignal s, Arm a, ObsSymbol o, bool subsidized) {
  return ((static_cast<int>(s) * 2 + static_cast<int>(a)) * 4 +
          static_cast<int>(o)) * 2 +
         (subsidized ? 1 : 0);
}

InfoClassKey class_from_index(int idx);
std::string class_label(const InfoClassKey& key);

// Raw per-class sums. Draw sums are integers so aggregation order cannot
// perturb them; payoff sums are doubles folded in run order.
struct ClassAccum {
  std::int64_t count = 0;
  std::int64_t count_high = 0;   // occurrences inside High-state runs
  std::int64_t t_sum = 0;        // stage risky draws (realized either way)
  double comply_sum = 0.0;
  double deviate_sum = 0.0;
  double d2_sum = 0.0;           // sum of (comply - deviate)^2

  void merge(const ClassAccum& o) {
    count += o.count;
    count_high += o.count_high;
    t_sum += o.t_sum;
    comply_sum += o.comply_sum;
    deviate_sum += o.deviate_sum;
    d2_sum += o.d2_sum;
  }

  double e_t() const { return static_cast<double>(t_sum) / static_cast<double>(count); }
  double e_t_se() const;        // binomial standard error of e_t
  double comply_mean() const { return comply_sum / static_cast<double>(count); }
  double deviate_mean() const { return deviate_sum / static_cast<double>(count); }
  double margin() const { return comply_mean() - deviate_mean(); }
  double margin_se() const;     // paired standard error of the margin
  double p_high_hat() const {
    return static_cast<double>(count_high) / static_cast<double>(count);
  }
};

struct StateAgg {
  std::int64_t runs = 0;
  double mean_reward_sum = 0.0;
  double mean_reward_sq_sum = 0.0;
  std::int64_t entered_switching = 0;  // runs reaching signal s2
  std::int64_t x_lt_k = 0;             // entered but never hit k safe-switches
  std::int64_t completed = 0;
  std::int64_t switch_violations = 0;  // completed without exactly k+k switches
  std::int64_t exploited = 0;
  std::int64_t exploit_risky = 0;
  std::int64_t wrong_exploit = 0;      // Safe in High or Risky in Low
  std::int64_t deviated = 0;
  std::int64_t budget_violations = 0;  // promised subsidy above beta
  double max_promised = 0.0;
  double max_paid = 0.0;
  // stage-k+1 risky draw over runs that entered switching; conditional on
  // entry that stage's event mix matches the calibration blend exactly
  std::int64_t first_switch_runs = 0;
  std::int64_t first_switch_t_sum = 0;
  std::int64_t entry_r1_coin = 0, entry_r2 = 0, entry_safe_break = 0;

  double mean_reward() const { return mean_reward_sum / static_cast<double>(runs); }
  double mean_reward_se() const;

  void merge(const StateAgg& o);
};

struct MonteCarloConfig {
  ModelParams model;
  MediatorParams params;
  StrategyProfile profile;
  std::int64_t population = 0;
  std::int64_t runs = 0;
  std::uint64_t master_seed = 0;
  std::optional<WorldState> forced_state;
  std::optional<int> forced_coin;
  int threads = 1;             // >1 folds contiguous run blocks per worker
  int stage_bucket_width = 0;  // >0: per-bucket switch placement table
};

// Aggregated outcome of one corpus of runs. Deterministic function of the
// config (worker count included: partial sums merge in block order).
struct AuditReport {
  MonteCarloConfig config;
  StateAgg high;
  StateAgg low;
  std::array<ClassAccum, kClassSlots> classes{};
  // The two subsidized switching classes restricted to runs that completed
  // the switching phase (the matched-switch comparison wants equal counts).
  ClassAccum completed_safe_switch;
  ClassAccum completed_risky_switch;
  // stage_bucket_width > 0: per bucket, subsidized [safe, risky] switch
  // recommendations inside completed runs.
  std::vector<std::array<std::int64_t, 2>> bucket_counts;

  const ClassAccum& cls(PhaseSignal s, Arm a, ObsSymbol o, bool subsidized) const {
    return classes[static_cast<std::size_t>(class_index(s, a, o, subsidized))];
  }
  const StateAgg& state(WorldState w) const {
    return w == WorldState::High ? high : low;
  }
  StateAgg pooled() const;
};

AuditReport monte_carlo(const MonteCarloConfig& config);

// ---- checks ----

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct CheckLine {
  std::string name;
  Verdict verdict = Verdict::Inconclusive;
  double observed = 0.0;
  double bound = 0.0;  // pass needs observed <= bound unless stated otherwise
  std::string detail;
};

struct IcTolerances {
  double z = 3.0;              // confidence multiplier on standard errors
  std::int64_t min_count = 30; // classes below this are inconclusive
};

struct IcAuditResult {
  std::vector<CheckLine> classes;   // one per populated class
  CheckLine continuation_mean;      // E(draw | s2, Risky, saw 1) >= b - z se
  CheckLine exploit_safe_mean;      // E(draw | s3 recommending Safe) <= b + z se
  bool all_pass(bool strict) const;
};

// Per-class incentive margins: comply_mean >= deviate_mean - z * margin_se,
// widened by one subsidy for the two paid s2 classes (their theoretical
// margin sits within a subsidy of zero by design).
IcAuditResult ic_audit(const AuditReport& report, const IcTolerances& tol);

// Statistical consequences the calibrated constants promise:
//   misclassification_*   k-sample mean lands on the wrong side <= eps/4
//   completion_*          P(fewer than k safe-switches | entered) <= gamma
//   switch_balance        completed runs hold exactly k switches each way
//   switch_mean_gap       mean draw at safe- vs risky-switches agrees (z se)
// The _from flavor reuses corpora the caller already ran; the convenience
// overload runs its own (runs per forced state, plus one unconditional).
std::vector<CheckLine> lemma_checks_from(const AuditReport& unconditional,
                                         const AuditReport& forced_high,
                                         const AuditReport& forced_low,
                                         std::int64_t misclass_samples,
                                         std::uint64_t seed, double z);
std::vector<CheckLine> lemma_checks(const ModelParams& model,
                                    const MediatorParams& params,
                                    std::int64_t population, std::int64_t runs,
                                    std::uint64_t master_seed);

struct AuditOptions {
  std::int64_t runs_unconditional = 2000;
  std::int64_t runs_per_state = 2000;
  std::int64_t population = 0;  // 0: use params.n_prime
  std::uint64_t master_seed = 20240901;
  double z = 3.0;
  std::int64_t min_count = 30;
  std::int64_t misclass_samples = 100000;
  int threads = 1;
  int stage_bucket_width = 0;
  StrategyProfile profile;  // compliant unless overridden
};

// Full verification battery: one unconditional corpus (incentive classes,
// budget, switch structure, blend) and one forced corpus per state
// (optimality and completion bounds). `lines` carries every top-level
// verdict; per-class details stay in `ic`.
struct StandardAudit {
  AuditReport unconditional;
  AuditReport forced_high;
  AuditReport forced_low;
  IcAuditResult ic;
  std::vector<CheckLine> lines;
  bool all_pass(bool strict) const;
};

StandardAudit standard_audit(const ModelParams& model,
                             const MediatorParams& params,
                             const AuditOptions& options);

}  // namespace innkeeper
