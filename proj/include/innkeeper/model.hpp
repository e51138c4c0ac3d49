#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace innkeeper {

enum class Arm : std::uint8_t { Risky, Safe };
enum class WorldState : std::uint8_t { High, Low };

// Phase signal attached to every recommendation. s1 = pre-intervention
// (agents are told their own best response), s2 = engineered switching,
// s3 = exploitation, s4 = post-deviation fallback.
enum class PhaseSignal : std::uint8_t {
  PreIntervention,
  Switching,
  Exploit,
  Deviation
};

// What an agent (or the mediator) sees of the predecessor: nothing at stage 1,
// otherwise the predecessor's arm and realized reward. The reward alphabet is
// {0, 1, b}; b is represented by the Safe arm tag, never by comparing doubles.
enum class ObsSymbol : std::uint8_t { Start, RewardOne, RewardZero, SafeReward };

const char* to_string(Arm a);
const char* to_string(WorldState w);
const char* to_string(PhaseSignal s);
const char* to_string(ObsSymbol o);

struct Message {
  Arm arm = Arm::Risky;           // recommended arm
  PhaseSignal signal = PhaseSignal::PreIntervention;
  double pay = 0.0;               // subsidy promised for following the arm
};

struct Observation {
  Arm predecessor_arm = Arm::Risky;
  int predecessor_draw = 0;       // risky draw in {0,1}; ignored when arm is Safe

  ObsSymbol symbol() const {
    if (predecessor_arm == Arm::Safe) return ObsSymbol::SafeReward;
    return predecessor_draw == 1 ? ObsSymbol::RewardOne : ObsSymbol::RewardZero;
  }
};

// Environment: hidden state in {High, Low} with prior q on High, risky arm
// paying Bernoulli(p_high) or Bernoulli(p_low), safe arm paying b always.
struct ModelParams {
  double q = 0.5;
  double p_high = 0.8;
  double p_low = 0.3;
  double b = 0.5;

  double success_prob(WorldState w) const {
    return w == WorldState::High ? p_high : p_low;
  }
  double prior_mean() const { return q * p_high + (1.0 - q) * p_low; }
  double midpoint() const { return 0.5 * (p_high + p_low); }

  // True when successes/trials >= (p_high+p_low)/2, boundary inclusive.
  // Kept in product form; the slack absorbs the last-ulp rounding of
  // trials*(p_high+p_low) so decimal inputs that put the boundary exactly on
  // an integer (e.g. 11/20 vs 0.55) stay inclusive regardless of rounding
  // direction.
  bool mean_meets_midpoint(std::int64_t successes, std::int64_t trials) const {
    return 2.0 * static_cast<double>(successes) >=
           static_cast<double>(trials) * (p_high + p_low) -
               1e-12 * static_cast<double>(trials);
  }
};

// Canonical example environment used throughout the tests.
inline ModelParams canonical_model() { return ModelParams{0.5, 0.8, 0.3, 0.5}; }

// Returns human-readable violations; empty means the model is admissible.
// Checks ranges, p_high > b > p_low, and prior_mean() > b (the risky arm must
// be worth pulling under the prior or the whole exercise is moot).
std::vector<std::string> validate_model(const ModelParams& model);

// What an agent walks away with at one stage: the pulled arm's payout plus
// the subsidy iff the pull matches the recommendation. risky_draw is the
// stage's realized risky payout in {0,1}, used even if the agent pulled Safe
// (callers evaluate counterfactuals on the same draw).
double realized_utility(const ModelParams& model, Arm action,
                        const Message& message, int risky_draw);

}  // namespace innkeeper
