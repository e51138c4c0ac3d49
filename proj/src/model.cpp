#include "innkeeper/model.hpp"

#include <sstream>

namespace innkeeper {

const char* to_string(Arm a) { return a == Arm::Risky ? "R" : "S"; }

const char* to_string(WorldState w) {
  return w == WorldState::High ? "H" : "L";
}

const char* to_string(PhaseSignal s) {
  switch (s) {
    case PhaseSignal::PreIntervention: return "s1";
    case PhaseSignal::Switching: return "s2";
    case PhaseSignal::Exploit: return "s3";
    case PhaseSignal::Deviation: return "s4";
  }
  return "?";
}

const char* to_string(ObsSymbol o) {
  switch (o) {
    case ObsSymbol::Start: return "start";
    case ObsSymbol::RewardOne: return "r1";
    case ObsSymbol::RewardZero: return "r0";
    case ObsSymbol::SafeReward: return "rb";
  }
  return "?";
}

namespace {

std::string fmt_range(const char* name, double v) {
  std::ostringstream os;
  os << name << "=" << v << " out of range";
  return os.str();
}

}  // namespace

std::vector<std::string> validate_model(const ModelParams& m) {
  std::vector<std::string> out;
  if (!(m.q > 0.0 && m.q < 1.0)) out.push_back(fmt_range("q", m.q));
  if (!(m.p_high >= 0.0 && m.p_high <= 1.0))
    out.push_back(fmt_range("p_high", m.p_high));
  if (!(m.p_low >= 0.0 && m.p_low <= 1.0))
    out.push_back(fmt_range("p_low", m.p_low));
  if (!(m.b >= 0.0 && m.b <= 1.0)) out.push_back(fmt_range("b", m.b));
  if (!(m.p_high > m.b)) {
    std::ostringstream os;
    os << "p_high must exceed b (p_high=" << m.p_high << ", b=" << m.b << ")";
    out.push_back(os.str());
  }
  if (!(m.b > m.p_low)) {
    std::ostringstream os;
    os << "b must exceed p_low (b=" << m.b << ", p_low=" << m.p_low << ")";
    out.push_back(os.str());
  }
  if (!(m.prior_mean() > m.b)) {
    std::ostringstream os;
    os << "prior mean of the risky arm must exceed b (mean=" << m.prior_mean()
       << ", b=" << m.b << ")";
    out.push_back(os.str());
  }
  return out;
}

double realized_utility(const ModelParams& model, Arm action,
                        const Message& message, int risky_draw) {
  double base = action == Arm::Safe ? model.b : static_cast<double>(risky_draw);
  return action == message.arm ? base + message.pay : base;
}

}  // namespace innkeeper
