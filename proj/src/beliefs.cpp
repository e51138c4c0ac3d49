#include "innkeeper/beliefs.hpp"

#include <cmath>
#include <stdexcept>

namespace innkeeper {

double posterior_from_counts(const ModelParams& model, std::int64_t successes,
                             std::int64_t trials) {
  if (trials < 0 || successes < 0 || successes > trials)
    throw std::invalid_argument("posterior_from_counts: bad counts");
  // Degenerate likelihoods first; the log form below would hit 0 * inf.
  const bool high_impossible =
      (model.p_high == 0.0 && successes > 0) ||
      (model.p_high == 1.0 && successes < trials);
  const bool low_impossible = (model.p_low == 0.0 && successes > 0) ||
                              (model.p_low == 1.0 && successes < trials);
  if (high_impossible && low_impossible)
    throw std::domain_error("posterior_from_counts: counts impossible under both states");
  if (high_impossible) return 0.0;
  if (low_impossible) return 1.0;

  // P(High) = 1 / (1 + ratio), ratio = (1-q)P(counts|Low) / (q P(counts|High)),
  // evaluated in logs so large trial counts cannot overflow.
  double log_ratio = std::log((1.0 - model.q) / model.q);
  if (successes > 0)
    log_ratio += static_cast<double>(successes) * std::log(model.p_low / model.p_high);
  if (trials - successes > 0)
    log_ratio += static_cast<double>(trials - successes) *
                 std::log((1.0 - model.p_low) / (1.0 - model.p_high));
  return 1.0 / (1.0 + std::exp(log_ratio));
}

namespace {

constexpr std::int64_t kMaxCascadeLength = 5000;

PolicyEntry make_entry(const ModelParams& model, double posterior) {
  PolicyEntry e;
  e.posterior_high = posterior;
  e.expected = expected_risky(model, posterior);
  e.arm = e.expected > model.b ? Arm::Risky : Arm::Safe;
  return e;
}

void check_policy_args(const ModelParams& model, std::int64_t k) {
  if (k < 1 || k > kMaxCascadeLength)
    throw std::invalid_argument("cascade length k must be in [1, 5000]");
  if (!validate_model(model).empty())
    throw std::invalid_argument("invalid model");
}

}  // namespace

PolicyTable preintervention_policy(const ModelParams& model, std::int64_t k) {
  check_policy_args(model, k);

  PolicyTable table;
  table.k = k;
  table.stages.resize(static_cast<std::size_t>(k));

  // Stage 1: prior only. The prior-mean > b admissibility check guarantees
  // the arm comes out Risky. The observation slots are unreachable at stage 1
  // and just repeat the prior entry.
  const PolicyEntry prior_entry = make_entry(model, model.q);
  table.stages[0].fill(prior_entry);

  // Chain-survival mass per state, indexed by the latest draw, plus the
  // accumulated mass of broken chains (someone already pulled Safe).
  double alive_h[2] = {1.0 - model.p_high, model.p_high};
  double alive_l[2] = {1.0 - model.p_low, model.p_low};
  double broke_h = 0.0, broke_l = 0.0;

  for (std::int64_t j = 2; j <= k; ++j) {
    auto& row = table.stages[static_cast<std::size_t>(j - 1)];
    row[static_cast<std::size_t>(ObsSymbol::Start)] = prior_entry;

    for (int r = 0; r <= 1; ++r) {
      const double num = model.q * alive_h[r];
      const double den = num + (1.0 - model.q) * alive_l[r];
      // den == 0 means this observation cannot occur; keep the entry well
      // formed with the prior posterior (it is never consulted).
      const double post = den > 0.0 ? num / den : model.q;
      row[static_cast<std::size_t>(r == 1 ? ObsSymbol::RewardOne
                                          : ObsSymbol::RewardZero)] =
          make_entry(model, post);
    }

    // Seeing a safe pull: posterior over "the chain broke at some earlier
    // stage". The arm is Safe by the copy rule regardless of the posterior.
    {
      const double num = model.q * broke_h;
      const double den = num + (1.0 - model.q) * broke_l;
      PolicyEntry e = make_entry(model, den > 0.0 ? num / den : model.q);
      e.arm = Arm::Safe;
      row[static_cast<std::size_t>(ObsSymbol::SafeReward)] = e;
    }

    // Advance survival to stage j: paths continue only through draws the
    // stage-j policy answers with Risky; the rest break the chain here.
    double pass_h = 0.0, pass_l = 0.0;
    for (int r = 0; r <= 1; ++r) {
      const ObsSymbol sym = r == 1 ? ObsSymbol::RewardOne : ObsSymbol::RewardZero;
      if (row[static_cast<std::size_t>(sym)].arm == Arm::Risky) {
        pass_h += alive_h[r];
        pass_l += alive_l[r];
      } else {
        broke_h += alive_h[r];
        broke_l += alive_l[r];
      }
    }
    alive_h[0] = pass_h * (1.0 - model.p_high);
    alive_h[1] = pass_h * model.p_high;
    alive_l[0] = pass_l * (1.0 - model.p_low);
    alive_l[1] = pass_l * model.p_low;
  }

  return table;
}

namespace {

// One hidden state's event masses via DP over (successes, last draw).
void event_masses(const ModelParams& model, const PolicyTable& policy,
                  double p, double* r1, double* r2, double* s) {
  const std::int64_t k = policy.k;
  const auto idx = [](std::int64_t succ, int r) {
    return static_cast<std::size_t>(2 * succ + r);
  };

  std::vector<double> cur(static_cast<std::size_t>(2 * (k + 1)), 0.0);
  std::vector<double> next(cur.size(), 0.0);
  cur[idx(0, 0)] = 1.0 - p;
  cur[idx(1, 1)] = p;
  double broke = 0.0;

  for (std::int64_t j = 2; j <= k; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::int64_t succ = 0; succ <= j - 1; ++succ) {
      for (int r = 0; r <= 1; ++r) {
        const double mass = cur[idx(succ, r)];
        if (mass == 0.0) continue;
        const ObsSymbol sym =
            r == 1 ? ObsSymbol::RewardOne : ObsSymbol::RewardZero;
        if (policy.entry(j, sym).arm == Arm::Risky) {
          next[idx(succ + 1, 1)] += mass * p;
          next[idx(succ, 0)] += mass * (1.0 - p);
        } else {
          broke += mass;  // stage-j agent defects; chain is safe forever after
        }
      }
    }
    cur.swap(next);
  }

  double hi = 0.0, lo = 0.0;
  for (std::int64_t succ = 0; succ <= k; ++succ) {
    const double mass = cur[idx(succ, 0)] + cur[idx(succ, 1)];
    if (mass == 0.0) continue;
    if (model.mean_meets_midpoint(succ, k))
      hi += mass;
    else
      lo += mass;
  }
  *r1 = hi;
  *r2 = lo;
  *s = broke;
}

}  // namespace

EventProbs event_probabilities(const ModelParams& model,
                               const PolicyTable& policy) {
  EventProbs ev;
  event_masses(model, policy, model.p_high, &ev.r1_high, &ev.r2_high, &ev.s_high);
  event_masses(model, policy, model.p_low, &ev.r1_low, &ev.r2_low, &ev.s_low);
  ev.r1 = model.q * ev.r1_high + (1.0 - model.q) * ev.r1_low;
  ev.r2 = model.q * ev.r2_high + (1.0 - model.q) * ev.r2_low;
  ev.s = model.q * ev.s_high + (1.0 - model.q) * ev.s_low;
  return ev;
}

EventProbs event_probabilities(const ModelParams& model, std::int64_t k) {
  return event_probabilities(model, preintervention_policy(model, k));
}

SwitchExpectations switch_expectations(const ModelParams& model,
                                       const EventProbs& ev) {
  SwitchExpectations out;
  const auto blend = [&](double mass_h, double marginal) -> std::optional<double> {
    if (marginal <= 0.0) return std::nullopt;
    const double post = model.q * mass_h / marginal;
    return expected_risky(model, post);
  };
  out.e1 = blend(ev.r1_high, ev.r1);
  out.e2 = blend(ev.r2_high, ev.r2);
  out.e3 = blend(ev.s_high, ev.s);
  return out;
}

}  // namespace innkeeper
