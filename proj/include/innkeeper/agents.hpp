#pragma once

#include <cstdint>
#include <vector>

#include "innkeeper/model.hpp"

namespace innkeeper {

enum class StrategyKind : std::uint8_t { Compliant, ScriptedDeviant, MyopicPrior };
enum class DeviationRule : std::uint8_t { Flip, AlwaysSafe, AlwaysRisky };

const char* to_string(StrategyKind k);
const char* to_string(DeviationRule r);

// How the simulated agents respond to recommendations.
//   Compliant       always pulls the recommended arm.
//   ScriptedDeviant follows recommendations except at the listed stages,
//                   where it applies `rule` (Flip = the other arm; the
//                   Always* rules may coincide with the recommendation, in
//                   which case no deviation actually happens).
//   MyopicPrior     ignores messages and plays the prior best response.
struct StrategyProfile {
  StrategyKind kind = StrategyKind::Compliant;
  std::vector<std::int64_t> deviation_stages;  // sorted ascending, unique
  DeviationRule rule = DeviationRule::Flip;
};

inline Arm other_arm(Arm a) { return a == Arm::Risky ? Arm::Safe : Arm::Risky; }

Arm choose(const StrategyProfile& profile, std::int64_t stage,
           const Message& message, const ModelParams& model);

// Sorts and dedupes deviation_stages in place (choose() binary-searches).
void normalize(StrategyProfile& profile);

}  // namespace innkeeper
