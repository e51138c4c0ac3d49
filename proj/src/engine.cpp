#include "innkeeper/engine.hpp"

#include <stdexcept>

namespace innkeeper {

namespace detail {

void check_run_config(const RunConfig& config) {
  const auto violations = validate_model(config.model);
  if (!violations.empty()) {
    std::string joined = "run: invalid model:";
    for (const auto& v : violations) joined += " " + v + ";";
    throw std::invalid_argument(joined);
  }
  if (config.population < 1)
    throw std::invalid_argument("run: population must be >= 1");
  if (config.params.k < 1) throw std::invalid_argument("run: k must be >= 1");
  if (!(config.params.delta >= 0.0 && config.params.delta <= 1.0))
    throw std::invalid_argument("run: delta must be in [0,1]");
  if (!(config.params.subsidy >= 0.0))
    throw std::invalid_argument("run: subsidy must be >= 0");
  if (config.forced_coin && *config.forced_coin != 0 && *config.forced_coin != 1)
    throw std::invalid_argument("run: forced_coin must be 0 or 1");
  for (int r : config.forced_rewards)
    if (r != 0 && r != 1)
      throw std::invalid_argument("run: forced_rewards must be 0/1");
}

}  // namespace detail

RunTrace run(const RunConfig& config) {
  RunTrace trace;
  run_into(config, trace);
  return trace;
}

void run_into(const RunConfig& config, RunTrace& out,
              const PolicyTable* policy) {
  detail::check_run_config(config);
  out.config = config;
  out.records.clear();
  out.records.reserve(static_cast<std::size_t>(config.population));
  const double b = config.model.b;
  out.summary = detail::run_core(
      config, policy,
      [&](std::int64_t stage, const Message& msg, Arm action, int draw) {
        StageRecord rec;
        rec.stage = stage;
        rec.message = msg;
        rec.action = action;
        rec.risky_draw = draw;
        rec.reward = action == Arm::Safe ? b : static_cast<double>(draw);
        rec.subsidy_paid = action == msg.arm ? msg.pay : 0.0;
        out.records.push_back(rec);
      });
}

CounterfactualPayoffs counterfactual_payoffs(const RunTrace& trace,
                                             std::int64_t stage) {
  if (stage < 1 || stage > static_cast<std::int64_t>(trace.records.size()))
    throw std::invalid_argument("counterfactual_payoffs: stage out of range");
  const StageRecord& rec = trace.records[static_cast<std::size_t>(stage - 1)];
  CounterfactualPayoffs out;
  out.comply = realized_utility(trace.config.model, rec.message.arm,
                                rec.message, rec.risky_draw);
  out.deviate = realized_utility(trace.config.model, other_arm(rec.message.arm),
                                 rec.message, rec.risky_draw);
  return out;
}

}  // namespace innkeeper
