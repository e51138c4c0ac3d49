#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "innkeeper/beliefs.hpp"
#include "innkeeper/calibration.hpp"
#include "innkeeper/model.hpp"

namespace innkeeper {

// How the run left the pre-intervention phase at stage k+1 (diagnostics for
// the audit harness; the conditioning events of the switching-signal blend).
enum class SwitchEntry : std::uint8_t {
  NotReached,     // run ended (or deviated) before stage k+1
  DirectExploit,  // all-risky, mean at midpoint, coin = 0
  R1Coin,         // all-risky, mean at midpoint, coin = 1
  R2,             // all-risky, mean below midpoint
  SafeBreak       // someone pulled Safe during the cascade
};

const char* to_string(SwitchEntry e);

// Exploit-arm rule once k switching samples are in: Risky iff their mean
// meets the midpoint (boundary inclusive).
Arm exploit_decision(const ModelParams& model, std::int64_t r_sum,
                     std::int64_t k);

// The mediator proper. Drives one run: alternate next_message() / record()
// for stages 1..population. Stages 1..k relay the cascade best response
// (signal s1). At stage k+1 the mediator either starts exploiting Risky
// (unbroken all-risky cascade with a passing mean, coin = 0) or enters the
// switching phase (signal s2), where it engineers exactly k switches in each
// direction, paying `subsidy` per switch:
//     predecessor drew 1  -> recommend Risky, no pay
//     predecessor drew 0  -> recommend Safe,  pay (switch off Risky)
//     predecessor safe    -> recommend Risky, pay (switch back)
// After 2k switches the mean of the k switching-phase risky samples picks
// the exploit arm (signal s3). A deviation before exploitation moves the run
// to signal s4 permanently: thereafter the mediator recommends the best
// response under its own full-history posterior, paying nothing. Deviations
// during exploitation are ignored.
//
// The coin is supplied by the caller (the engine draws it or forces it); the
// mediator consults it exactly once, at the stage-k+1 transition, and
// coin() reports it only if consulted.
class MediatorState {
 public:
  // `policy` may share a precomputed table (must outlive the state and match
  // model/k); pass nullptr to build one internally.
  MediatorState(const ModelParams& model, const MediatorParams& params,
                std::int64_t population, int coin_value,
                const PolicyTable* policy = nullptr);

  MediatorState(const MediatorState&) = delete;
  MediatorState& operator=(const MediatorState&) = delete;
  MediatorState(MediatorState&&) = default;

  // Message for the upcoming stage. Call exactly once per stage.
  Message next_message() {
    if (issued_) throw std::logic_error("next_message: stage already issued");
    if (stage_ > population_) throw std::logic_error("next_message: run is over");

    Message msg;
    if (deviation_flag_ && !exploit_flag_) {
      msg = Message{deviation_arm(), PhaseSignal::Deviation, 0.0};
    } else if (exploit_flag_) {
      msg = Message{exploit_value_, PhaseSignal::Exploit, 0.0};
    } else if (stage_ <= params_.k) {
      const ObsSymbol sym = stage_ == 1 ? ObsSymbol::Start : last_obs_.symbol();
      msg = Message{policy().entry(stage_, sym).arm,
                    PhaseSignal::PreIntervention, 0.0};
    } else {
      if (phase_ == PhaseSignal::PreIntervention) transition_at_k_plus_1();
      if (phase_ == PhaseSignal::Switching && switching_count_ >= 2 * params_.k)
        finish_switching();
      if (phase_ == PhaseSignal::Exploit) {
        msg = Message{exploit_value_, PhaseSignal::Exploit, 0.0};
      } else {
        switch (last_obs_.symbol()) {
          case ObsSymbol::RewardOne:
            msg = Message{Arm::Risky, PhaseSignal::Switching, 0.0};
            break;
          case ObsSymbol::RewardZero:
            msg = Message{Arm::Safe, PhaseSignal::Switching, params_.subsidy};
            x_count_++;
            break;
          default:  // SafeReward
            msg = Message{Arm::Risky, PhaseSignal::Switching, params_.subsidy};
            break;
        }
      }
    }

    if (msg.pay > 0.0) {
      subsidized_issued_++;
      if (msg.arm == Arm::Safe) switch_to_safe_issued_++;
      else switch_to_risky_issued_++;
    }
    pending_ = msg;
    issued_ = true;
    return msg;
  }

  // Realized outcome of the stage just issued. `risky_draw` is the stage's
  // risky payout in {0,1}, realized whether or not the agent pulled Risky.
  void record(Arm action, int risky_draw) {
    if (!issued_) throw std::logic_error("record: no message pending");
    if (risky_draw != 0 && risky_draw != 1)
      throw std::invalid_argument("record: risky_draw must be 0 or 1");

    switch (pending_.signal) {
      case PhaseSignal::PreIntervention:
        if (action == Arm::Risky) first_k_successes_ += risky_draw;
        else first_k_all_risky_ = false;
        break;
      case PhaseSignal::Switching:
        if (pending_.pay > 0.0) switching_count_++;
        if (action == Arm::Risky && r_count_ < params_.k) {
          r_count_++;
          r_sum_ += risky_draw;
        }
        break;
      default:
        break;
    }

    if (action == Arm::Risky) {
      risky_pulls_++;
      risky_successes_ += risky_draw;
    }
    if (pending_.pay > 0.0 && action == pending_.arm) subsidized_paid_++;
    if (action != pending_.arm && !exploit_flag_ && !deviation_flag_) {
      deviation_flag_ = true;
      deviation_stage_ = stage_;
      phase_ = PhaseSignal::Deviation;
    }

    last_obs_ = Observation{action, risky_draw};
    issued_ = false;
    stage_++;
  }

  // ---- inspection ----
  std::int64_t stage() const { return stage_; }
  std::int64_t population() const { return population_; }
  PhaseSignal phase() const { return phase_; }
  bool exploit_entered() const { return exploit_flag_; }
  Arm exploit_value() const { return exploit_value_; }
  std::optional<std::int64_t> exploit_stage() const { return exploit_stage_; }
  bool completed_switching() const { return completed_switching_; }
  SwitchEntry entry() const { return entry_; }
  std::optional<int> coin() const {
    return coin_consulted_ ? std::optional<int>(coin_value_) : std::nullopt;
  }
  std::optional<std::int64_t> deviation_stage() const { return deviation_stage_; }
  std::int64_t switching_count() const { return switching_count_; }
  std::int64_t r_count() const { return r_count_; }
  std::int64_t r_sum() const { return r_sum_; }
  std::int64_t x_count() const { return x_count_; }
  std::int64_t switch_to_safe_issued() const { return switch_to_safe_issued_; }
  std::int64_t switch_to_risky_issued() const { return switch_to_risky_issued_; }
  std::int64_t subsidized_issued() const { return subsidized_issued_; }
  std::int64_t subsidized_paid() const { return subsidized_paid_; }
  std::int64_t risky_pulls() const { return risky_pulls_; }
  std::int64_t risky_successes() const { return risky_successes_; }
  const MediatorParams& params() const { return params_; }

 private:
  const PolicyTable& policy() const {
    return shared_policy_ ? *shared_policy_ : owned_policy_;
  }

  void transition_at_k_plus_1() {
    coin_consulted_ = true;
    const bool passed =
        first_k_all_risky_ &&
        model_.mean_meets_midpoint(first_k_successes_, params_.k);
    if (passed && coin_value_ == 0) {
      exploit_flag_ = true;
      exploit_value_ = Arm::Risky;
      exploit_stage_ = stage_;
      phase_ = PhaseSignal::Exploit;
      entry_ = SwitchEntry::DirectExploit;
    } else {
      phase_ = PhaseSignal::Switching;
      entry_ = passed ? SwitchEntry::R1Coin
                      : (first_k_all_risky_ ? SwitchEntry::R2
                                            : SwitchEntry::SafeBreak);
    }
  }

  void finish_switching() {
    if (r_count_ != params_.k)
      throw std::logic_error(
          "finish_switching: switching completed without k risky samples");
    exploit_flag_ = true;
    exploit_value_ = exploit_decision(model_, r_sum_, params_.k);
    exploit_stage_ = stage_;
    phase_ = PhaseSignal::Exploit;
    completed_switching_ = true;
  }

  Arm deviation_arm() const {
    const double post =
        posterior_from_counts(model_, risky_successes_, risky_pulls_);
    return expected_risky(model_, post) > model_.b ? Arm::Risky : Arm::Safe;
  }

  ModelParams model_;
  MediatorParams params_;
  std::int64_t population_ = 0;
  const PolicyTable* shared_policy_ = nullptr;
  PolicyTable owned_policy_;

  std::int64_t stage_ = 1;
  PhaseSignal phase_ = PhaseSignal::PreIntervention;
  bool issued_ = false;
  Message pending_;
  Observation last_obs_;

  int coin_value_ = 0;
  bool coin_consulted_ = false;

  bool first_k_all_risky_ = true;
  std::int64_t first_k_successes_ = 0;

  std::int64_t switching_count_ = 0;
  std::int64_t r_count_ = 0;
  std::int64_t r_sum_ = 0;
  std::int64_t x_count_ = 0;
  std::int64_t switch_to_safe_issued_ = 0;
  std::int64_t switch_to_risky_issued_ = 0;
  std::int64_t subsidized_issued_ = 0;
  std::int64_t subsidized_paid_ = 0;

  std::int64_t risky_pulls_ = 0;
  std::int64_t risky_successes_ = 0;

  bool exploit_flag_ = false;
  Arm exploit_value_ = Arm::Safe;
  std::optional<std::int64_t> exploit_stage_;
  bool completed_switching_ = false;
  SwitchEntry entry_ = SwitchEntry::NotReached;

  bool deviation_flag_ = false;
  std::optional<std::int64_t> deviation_stage_;
};

}  // namespace innkeeper
