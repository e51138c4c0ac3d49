#include "innkeeper/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace innkeeper {

namespace {

// ceil() that first snaps to the nearest integer within a relative 1e-9.
// The count formulas frequently land exactly on an integer in real
// arithmetic (e.g. a horizon of 270/0.08 = 3375) and the last-ulp noise of
// the double evaluation must not bump the count to the next integer.
std::int64_t ceil_count(double x) {
  const double snapped = std::nearbyint(x);
  if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, std::abs(x)))
    return static_cast<std::int64_t>(snapped);
  return static_cast<std::int64_t>(std::ceil(x));
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::int64_t lemma1_sample_size(const ModelParams& model, double eps) {
  require(eps > 0.0 && eps < 1.0, "lemma1_sample_size: eps must be in (0,1)");
  require(model.p_high > model.p_low,
          "lemma1_sample_size: p_high must exceed p_low");
  const double var_h = 4.0 * model.p_high * (1.0 - model.p_high);
  const double var_l = 4.0 * model.p_low * (1.0 - model.p_low);
  const double gap = model.p_high - model.p_low;
  return ceil_count(std::max(var_h, var_l) / (eps * gap * gap));
}

std::int64_t theorem_sample_size(const ModelParams& model, double eps) {
  require(eps > 0.0 && eps < 1.0, "theorem_sample_size: eps must be in (0,1)");
  const double eps_prime =
      std::min(0.5, (1.0 - model.q) * (model.b - model.p_low) / 2.0);
  require(eps_prime > 0.0, "theorem_sample_size: b must exceed p_low");
  return std::max(lemma1_sample_size(model, eps / 4.0),
                  lemma1_sample_size(model, eps_prime));
}

std::int64_t switching_horizon(const ModelParams& model, std::int64_t k,
                               double beta, double eps) {
  require(k >= 1, "switching_horizon: k must be >= 1");
  require(beta > 0.0, "switching_horizon: beta must be > 0");
  require(eps > 0.0 && eps < 1.0, "switching_horizon: eps must be in (0,1)");
  require(model.p_high < 1.0,
          "switching_horizon: p_high = 1 yields no failures to switch on");
  const double gamma =
      std::min(beta / (4.0 * static_cast<double>(k)), eps / 4.0);
  const double fail = 1.0 - model.p_high;
  const double kd = static_cast<double>(k);
  const double a = fail * (2.0 * kd + model.p_high / gamma);
  const double disc = a * a - 4.0 * fail * fail * kd * kd;
  // disc = a^2 - (2 fail k)^2 > 0 since a > 2 fail k for gamma < 1.
  return ceil_count((a + std::sqrt(disc)) / (2.0 * fail * fail));
}

double per_switch_subsidy(double beta, std::int64_t k) {
  require(k >= 1, "per_switch_subsidy: k must be >= 1");
  require(beta > 0.0, "per_switch_subsidy: beta must be > 0");
  // fl(beta/2k) can round up, in which case 2k payments would exceed the
  // budget by an ulp; nudge down until the exact product (2k has < 40 bits,
  // so the long double product is exact) fits.
  double subsidy = beta / (2.0 * static_cast<double>(k));
  while (static_cast<long double>(subsidy) *
             static_cast<long double>(2 * k) >
         static_cast<long double>(beta))
    subsidy = std::nextafter(subsidy, 0.0);
  return subsidy;
}

std::int64_t population_bound(std::int64_t k, std::int64_t n_hat, double eps) {
  require(k >= 1 && n_hat >= 1, "population_bound: counts must be >= 1");
  require(eps > 0.0 && eps < 1.0, "population_bound: eps must be in (0,1)");
  return ceil_count((2.0 / eps) * static_cast<double>(k + n_hat));
}

DeltaResult solve_delta(const ModelParams& model, std::int64_t k) {
  const EventProbs ev = event_probabilities(model, k);
  const SwitchExpectations ex = switch_expectations(model, ev);

  if (!(ev.r1 > 0.0))
    throw DegenerateDeltaError("solve_delta: P(r1) = 0, no coin bias exists");
  const double e1 = *ex.e1;
  if (!(e1 > model.b)) {
    std::ostringstream os;
    os << "solve_delta: E(draw | r1) = " << e1 << " does not exceed b = "
       << model.b;
    throw DegenerateDeltaError(os.str());
  }

  double numerator = 0.0;
  if (ex.e2) numerator += ev.r2 * (model.b - *ex.e2);
  if (ex.e3) numerator += ev.s * (model.b - *ex.e3);

  DeltaResult out;
  out.delta_unclamped = numerator / (ev.r1 * (e1 - model.b));
  out.delta = std::clamp(out.delta_unclamped, 0.0, 1.0);
  out.clamped = out.delta != out.delta_unclamped;
  return out;
}

CalibrationReport calibrate(const ModelParams& model, double eps, double beta) {
  const auto violations = validate_model(model);
  if (!violations.empty()) {
    std::string joined = "calibrate: invalid model:";
    for (const auto& v : violations) joined += " " + v + ";";
    throw std::invalid_argument(joined);
  }
  require(beta > 0.0, "calibrate: beta must be > 0");
  require(eps > 0.0 && eps < 1.0, "calibrate: eps must be in (0,1)");

  CalibrationReport report;
  auto& p = report.params;
  p.eps = eps;
  p.beta = beta;
  p.k = theorem_sample_size(model, eps);

  const DeltaResult d = solve_delta(model, p.k);
  p.delta = d.delta;
  report.delta_unclamped = d.delta_unclamped;
  report.delta_clamped = d.clamped;

  p.n_hat = switching_horizon(model, p.k, beta, eps);
  p.n_prime = population_bound(p.k, p.n_hat, eps);

  p.subsidy = per_switch_subsidy(beta, p.k);

  report.gamma = std::min(beta / (4.0 * static_cast<double>(p.k)), eps / 4.0);
  report.epsilon_prime =
      std::min(0.5, (1.0 - model.q) * (model.b - model.p_low) / 2.0);
  report.events = event_probabilities(model, p.k);
  report.expectations = switch_expectations(model, report.events);

  if (!d.clamped) {
    const auto& ev = report.events;
    const auto& ex = report.expectations;
    double num = d.delta_unclamped * ev.r1 * *ex.e1;
    double den = d.delta_unclamped * ev.r1;
    if (ex.e2) { num += ev.r2 * *ex.e2; den += ev.r2; }
    if (ex.e3) { num += ev.s * *ex.e3; den += ev.s; }
    report.mixture_residual = num / den - model.b;
  } else {
    report.mixture_residual = std::numeric_limits<double>::quiet_NaN();
  }

  return report;
}

}  // namespace innkeeper
