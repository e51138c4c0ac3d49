#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "innkeeper/beliefs.hpp"
#include "innkeeper/model.hpp"

namespace innkeeper {

// Everything the mediator needs at runtime. Produced by calibrate(); the
// individual formulas below are exposed separately for testing and sweeps.
struct MediatorParams {
  std::int64_t k = 0;        // cascade length / samples per exploit decision
  double delta = 0.0;        // P(coin = 1): forced-switching probability
  std::int64_t n_hat = 0;    // switching-phase horizon backing the delta/K math
  std::int64_t n_prime = 0;  // population size needed for the optimality target
  double beta = 0.0;         // total subsidy budget per run
  double subsidy = 0.0;      // per-switch payment, beta/(2k) rounded down
  double eps = 0.0;          // optimality slack the constants were sized for
};

// Raised when the indifference equation has no usable solution (the event R1
// has zero mass or its conditional mean does not exceed b). Cannot happen for
// admissible models, kept as a guard for hand-built parameter sets.
class DegenerateDeltaError : public std::runtime_error {
 public:
  explicit DegenerateDeltaError(const std::string& what)
      : std::runtime_error(what) {}
};

// Chebyshev sample size: with k draws per state, the probability that the
// empirical mean lands on the wrong side of the midpoint is at most eps.
//   k = ceil( max(4 p_high(1-p_high), 4 p_low(1-p_low)) / (eps (p_high-p_low)^2) )
std::int64_t lemma1_sample_size(const ModelParams& model, double eps);

// Composed sample size: the larger of lemma1 at eps/4 and lemma1 at
// eps' = min(1/2, (1-q)(b - p_low)/2). The first drives the exploit
// decision's error; the second keeps the cascade informative enough.
std::int64_t theorem_sample_size(const ModelParams& model, double eps);

// Smallest n such that n risky pulls produce k failures except with
// probability gamma = min(beta/4k, eps/4), via the Chebyshev quadratic
//   (1-p)^2 n^2 - (1-p)(2k + p/gamma) n + (1-p)^2 k^2 >= 0
// solved at p = p_high (the scarce-failure state). Rejects p_high = 1:
// failures never arrive and no horizon exists.
std::int64_t switching_horizon(const ModelParams& model, std::int64_t k,
                               double beta, double eps);

// Population large enough that the pre-intervention and switching overhead
// is an eps/2 fraction: ceil((2/eps)(k + n_hat)).
std::int64_t population_bound(std::int64_t k, std::int64_t n_hat, double eps);

// Per-switch payment: beta/(2k) nudged down so that 2k payments cannot
// exceed beta even in floating point.
double per_switch_subsidy(double beta, std::int64_t k);

struct DeltaResult {
  double delta = 0.0;            // clamped to [0,1]
  double delta_unclamped = 0.0;  // raw solution of the indifference equation
  bool clamped = false;
};

// Solves for the coin bias that makes a switching signal carry exactly
// neutral news about the risky arm:
//   delta = [P(r2)(b - e2) + P(s)(b - e3)] / [P(r1)(e1 - b)]
// Terms whose event has zero probability drop out. Throws
// DegenerateDeltaError when P(r1) = 0 or e1 <= b.
DeltaResult solve_delta(const ModelParams& model, std::int64_t k);

struct CalibrationReport {
  MediatorParams params;
  EventProbs events;
  SwitchExpectations expectations;
  double delta_unclamped = 0.0;
  bool delta_clamped = false;
  double gamma = 0.0;          // switching-horizon tail bound actually used
  double epsilon_prime = 0.0;  // second operand of theorem_sample_size
  // E(draw | switching signal) - b at the unclamped delta; NaN when clamped
  // (the blend statement only holds for an interior solution).
  double mixture_residual = 0.0;
};

// Full pipeline: k, delta, horizon, population, subsidy, diagnostics.
// Validates the model and throws std::invalid_argument with the violation
// list on failure; propagates DegenerateDeltaError from solve_delta.
CalibrationReport calibrate(const ModelParams& model, double eps, double beta);

}  // namespace innkeeper
