#include "innkeeper/mediator.hpp"

namespace innkeeper {

const char* to_string(SwitchEntry e) {
  switch (e) {
    case SwitchEntry::NotReached: return "not_reached";
    case SwitchEntry::DirectExploit: return "direct_exploit";
    case SwitchEntry::R1Coin: return "r1_coin";
    case SwitchEntry::R2: return "r2";
    case SwitchEntry::SafeBreak: return "safe_break";
  }
  return "?";
}

Arm exploit_decision(const ModelParams& model, std::int64_t r_sum,
                     std::int64_t k) {
  if (k < 1) throw std::invalid_argument("exploit_decision: k must be >= 1");
  if (r_sum < 0 || r_sum > k)
    throw std::invalid_argument("exploit_decision: r_sum must be in [0, k]");
  return model.mean_meets_midpoint(r_sum, k) ? Arm::Risky : Arm::Safe;
}

MediatorState::MediatorState(const ModelParams& model,
                             const MediatorParams& params,
                             std::int64_t population, int coin_value,
                             const PolicyTable* policy)
    : model_(model),
      params_(params),
      population_(population),
      shared_policy_(policy),
      coin_value_(coin_value) {
  if (population < 1)
    throw std::invalid_argument("MediatorState: population must be >= 1");
  if (params.k < 1) throw std::invalid_argument("MediatorState: k must be >= 1");
  if (!(params.delta >= 0.0 && params.delta <= 1.0))
    throw std::invalid_argument("MediatorState: delta must be in [0,1]");
  if (!(params.subsidy >= 0.0))
    throw std::invalid_argument("MediatorState: subsidy must be >= 0");
  if (coin_value != 0 && coin_value != 1)
    throw std::invalid_argument("MediatorState: coin must be 0 or 1");
  if (policy && policy->k < params.k)
    throw std::invalid_argument("MediatorState: shared policy shorter than k");
  if (!policy) owned_policy_ = preintervention_policy(model, params.k);
}

}  // namespace innkeeper
