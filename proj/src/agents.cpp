#include "innkeeper/agents.hpp"

#include <algorithm>

namespace innkeeper {

const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Compliant: return "compliant";
    case StrategyKind::ScriptedDeviant: return "deviant";
    case StrategyKind::MyopicPrior: return "myopic";
  }
  return "?";
}

const char* to_string(DeviationRule r) {
  switch (r) {
    case DeviationRule::Flip: return "flip";
    case DeviationRule::AlwaysSafe: return "always_s";
    case DeviationRule::AlwaysRisky: return "always_r";
  }
  return "?";
}

Arm choose(const StrategyProfile& profile, std::int64_t stage,
           const Message& message, const ModelParams& model) {
  switch (profile.kind) {
    case StrategyKind::Compliant:
      return message.arm;
    case StrategyKind::MyopicPrior:
      return model.prior_mean() > model.b ? Arm::Risky : Arm::Safe;
    case StrategyKind::ScriptedDeviant:
      break;
  }
  if (!std::binary_search(profile.deviation_stages.begin(),
                          profile.deviation_stages.end(), stage))
    return message.arm;
  switch (profile.rule) {
    case DeviationRule::AlwaysSafe: return Arm::Safe;
    case DeviationRule::AlwaysRisky: return Arm::Risky;
    case DeviationRule::Flip: break;
  }
  return other_arm(message.arm);
}

void normalize(StrategyProfile& profile) {
  auto& v = profile.deviation_stages;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace innkeeper
