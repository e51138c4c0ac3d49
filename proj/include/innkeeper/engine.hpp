#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "innkeeper/agents.hpp"
#include "innkeeper/calibration.hpp"
#include "innkeeper/mediator.hpp"
#include "innkeeper/model.hpp"
#include "innkeeper/rng.hpp"

namespace innkeeper {

// One simulated run. `seed` seeds this run's private stream; the stream is
// consumed in a fixed order so traces are bit-stable:
//   1. the hidden state (skipped when forced_state is set)
//   2. the coin (skipped when forced_coin is set)
//   3. one risky draw per stage, skipping stages covered by forced_rewards
// forced_rewards is a prefix: stage i <= forced_rewards.size() uses the
// scripted draw, later stages draw from the stream.
struct RunConfig {
  ModelParams model;
  MediatorParams params;
  StrategyProfile profile;
  std::int64_t population = 0;
  std::uint64_t seed = 0;
  std::int64_t run_id = 0;
  std::optional<WorldState> forced_state;
  std::optional<int> forced_coin;
  std::vector<int> forced_rewards;
};

struct StageRecord {
  std::int64_t stage = 0;
  Message message;
  Arm action = Arm::Risky;
  int risky_draw = 0;     // realized even when the agent pulled Safe
  double reward = 0.0;    // what the agent's pull paid (subsidy excluded)
  double subsidy_paid = 0.0;
};

struct RunSummary {
  WorldState state = WorldState::High;
  std::optional<int> coin;  // absent if the stage-k+1 transition never ran
  double mean_reward = 0.0;
  // count * subsidy products, not per-stage accumulation, so the budget
  // comparison against beta is exact (rounding is monotone).
  double total_subsidy_promised = 0.0;
  double total_subsidy_paid = 0.0;
  bool exploit_entered = false;
  std::optional<std::int64_t> exploit_stage;
  std::optional<Arm> exploit_value;
  bool completed_switching = false;
  SwitchEntry entry = SwitchEntry::NotReached;
  std::int64_t x_count = 0;
  std::int64_t switch_to_safe = 0;
  std::int64_t switch_to_risky = 0;
  std::int64_t subsidized_messages = 0;
  std::optional<std::int64_t> deviation_stage;
};

struct RunTrace {
  RunConfig config;
  RunSummary summary;
  std::vector<StageRecord> records;
};

namespace detail {

void check_run_config(const RunConfig& config);

// Shared core of every run flavor. Sink sees each stage as
//   (stage, message, action, risky_draw)
// right after the mediator records it. Templated so the Monte Carlo harness
// can fold stages without materializing records.
template <typename Sink>
RunSummary run_core(const RunConfig& config, const PolicyTable* policy,
                    Sink&& sink) {
  SplitMix64 rng(config.seed);
  const WorldState state =
      config.forced_state
          ? *config.forced_state
          : (rng.next_bernoulli(config.model.q) ? WorldState::High
                                                : WorldState::Low);
  const int coin = config.forced_coin
                       ? *config.forced_coin
                       : (rng.next_bernoulli(config.params.delta) ? 1 : 0);
  const double p = config.model.success_prob(state);

  MediatorState med(config.model, config.params, config.population, coin,
                    policy);

  StrategyProfile profile = config.profile;
  normalize(profile);

  double reward_sum = 0.0;
  const std::int64_t forced = static_cast<std::int64_t>(config.forced_rewards.size());
  for (std::int64_t stage = 1; stage <= config.population; ++stage) {
    const int draw = stage <= forced
                         ? config.forced_rewards[static_cast<std::size_t>(stage - 1)]
                         : (rng.next_bernoulli(p) ? 1 : 0);
    const Message msg = med.next_message();
    const Arm action = choose(profile, stage, msg, config.model);
    med.record(action, draw);
    reward_sum += action == Arm::Safe ? config.model.b
                                      : static_cast<double>(draw);
    sink(stage, msg, action, draw);
  }

  RunSummary s;
  s.state = state;
  s.coin = med.coin();
  s.mean_reward = reward_sum / static_cast<double>(config.population);
  s.total_subsidy_promised =
      static_cast<double>(med.subsidized_issued()) * config.params.subsidy;
  s.total_subsidy_paid =
      static_cast<double>(med.subsidized_paid()) * config.params.subsidy;
  s.exploit_entered = med.exploit_entered();
  s.exploit_stage = med.exploit_stage();
  if (med.exploit_entered()) s.exploit_value = med.exploit_value();
  s.completed_switching = med.completed_switching();
  s.entry = med.entry();
  s.x_count = med.x_count();
  s.switch_to_safe = med.switch_to_safe_issued();
  s.switch_to_risky = med.switch_to_risky_issued();
  s.subsidized_messages = med.subsidized_issued();
  s.deviation_stage = med.deviation_stage();
  return s;
}

}  // namespace detail

// Full-trace run. run_into reuses the trace's record storage across calls.
RunTrace run(const RunConfig& config);
void run_into(const RunConfig& config, RunTrace& out,
              const PolicyTable* policy = nullptr);

// Record-free run for aggregation loops.
template <typename Sink>
RunSummary run_fold(const RunConfig& config, const PolicyTable* policy,
                    Sink&& sink) {
  detail::check_run_config(config);
  return detail::run_core(config, policy, std::forward<Sink>(sink));
}

struct CounterfactualPayoffs {
  double comply = 0.0;   // pull the recommended arm
  double deviate = 0.0;  // pull the other arm, same realized draw
};

// Both payoffs at one recorded stage, evaluated on the stage's realized
// risky draw (the road not taken is observable because every stage records
// the risky outcome). stage is 1-based.
CounterfactualPayoffs counterfactual_payoffs(const RunTrace& trace,
                                             std::int64_t stage);

}  // namespace innkeeper
