#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "innkeeper/model.hpp"

namespace innkeeper {

// Posterior P(High | s successes in n risky pulls). Counts are sufficient:
// risky draws are IID Bernoulli given the hidden state. Stable for large n
// (log-ratio form) and for degenerate p_high/p_low in {0,1}.
double posterior_from_counts(const ModelParams& model, std::int64_t successes,
                             std::int64_t trials);

// E[risky payout | P(High) = posterior].
inline double expected_risky(const ModelParams& model, double posterior_high) {
  return posterior_high * model.p_high + (1.0 - posterior_high) * model.p_low;
}

struct PolicyEntry {
  Arm arm = Arm::Risky;
  double posterior_high = 0.0;  // P(High | the information this entry encodes)
  double expected = 0.0;        // expected risky payout under that posterior
};

// Best-response map for the observational cascade that runs before the
// mediator intervenes. entry(j, sym) is what the stage-j agent does after
// seeing its predecessor:
//   Start      - stage 1, nothing to see, pulls Risky (prior mean beats b).
//   RewardOne  - predecessor pulled Risky and drew 1.
//   RewardZero - predecessor pulled Risky and drew 0.
//   SafeReward - predecessor pulled Safe; the agent copies it. A safe pull
//                reveals the predecessor thought Risky was not worth it, and
//                the successor has strictly less reward information.
// Seeing a risky pull at stage j-1 implies agents 1..j-1 ALL pulled Risky
// (one safe pull makes everyone after copy it), so the posterior conditions
// on the whole chain surviving, not just on the one visible draw.
struct PolicyTable {
  std::int64_t k = 0;
  // stages[j-1][symbol index]; stage-1 row repeats the prior entry.
  std::vector<std::array<PolicyEntry, 4>> stages;

  const PolicyEntry& entry(std::int64_t stage, ObsSymbol sym) const {
    return stages[static_cast<std::size_t>(stage - 1)]
                 [static_cast<std::size_t>(sym)];
  }
};

// Builds the cascade policy for stages 1..k by forward recursion on the
// chain-survival mass A_j(r) = P(agents 1..j pulled Risky and draw j = r).
// Arm rule at each entry: Risky iff expected risky payout strictly beats b
// (ties go to Safe). Throws std::invalid_argument for k < 1 or k > 5000 (the
// event DP downstream is quadratic in k) or an invalid model.
PolicyTable preintervention_policy(const ModelParams& model, std::int64_t k);

// Where the first k cascade agents can end up, per hidden state and overall:
//   r1: all pulled Risky and the mean draw met the midpoint (p_high+p_low)/2
//   r2: all pulled Risky, mean below the midpoint
//   s : someone pulled Safe
// Probabilities in [0,1]; r1+r2+s = 1 per state up to rounding.
struct EventProbs {
  double r1_high = 0, r2_high = 0, s_high = 0;
  double r1_low = 0, r2_low = 0, s_low = 0;
  double r1 = 0, r2 = 0, s = 0;  // q-weighted marginals
};

// Exact DP over (successes so far, last draw), absorbing safe-defection mass
// stage by stage. The last draw is part of the state because the next agent's
// stay/defect decision keys on it.
EventProbs event_probabilities(const ModelParams& model,
                               const PolicyTable& policy);
EventProbs event_probabilities(const ModelParams& model, std::int64_t k);

// Expected risky payout conditioned on each terminal event. Empty when the
// matching event has zero probability (e.g. the cascade can never break for
// k = 1, so e3 is absent).
struct SwitchExpectations {
  std::optional<double> e1, e2, e3;
};

SwitchExpectations switch_expectations(const ModelParams& model,
                                       const EventProbs& events);

}  // namespace innkeeper
