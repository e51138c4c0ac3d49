#include "innkeeper/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace innkeeper {

InfoClassKey class_from_index(int idx) {
  InfoClassKey key;
  key.subsidized = (idx & 1) != 0;
  key.obs = static_cast<ObsSymbol>((idx >> 1) & 3);
  key.rec = static_cast<Arm>((idx >> 3) & 1);
  key.signal = static_cast<PhaseSignal>((idx >> 4) & 3);
  return key;
}

std::string class_label(const InfoClassKey& key) {
  std::string out = to_string(key.signal);
  out += '/';
  out += to_string(key.rec);
  out += '/';
  out += to_string(key.obs);
  out += '/';
  out += key.subsidized ? "paid" : "free";
  return out;
}

double ClassAccum::e_t_se() const {
  if (count < 2) return 0.0;
  const double m = e_t();
  const double n = static_cast<double>(count);
  const double var = m * (1.0 - m) * n / (n - 1.0);
  return std::sqrt(var / n);
}

double ClassAccum::margin_se() const {
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double dbar = margin();
  double var = (d2_sum - n * dbar * dbar) / (n - 1.0);
  if (var < 0.0) var = 0.0;
  return std::sqrt(var / n);
}

double StateAgg::mean_reward_se() const {
  if (runs < 2) return 0.0;
  const double n = static_cast<double>(runs);
  const double mean = mean_reward();
  double var = (mean_reward_sq_sum - n * mean * mean) / (n - 1.0);
  if (var < 0.0) var = 0.0;
  return std::sqrt(var / n);
}

void StateAgg::merge(const StateAgg& o) {
  runs += o.runs;
  mean_reward_sum += o.mean_reward_sum;
  mean_reward_sq_sum += o.mean_reward_sq_sum;
  entered_switching += o.entered_switching;
  x_lt_k += o.x_lt_k;
  completed += o.completed;
  switch_violations += o.switch_violations;
  exploited += o.exploited;
  exploit_risky += o.exploit_risky;
  wrong_exploit += o.wrong_exploit;
  deviated += o.deviated;
  budget_violations += o.budget_violations;
  max_promised = std::max(max_promised, o.max_promised);
  max_paid = std::max(max_paid, o.max_paid);
  first_switch_runs += o.first_switch_runs;
  first_switch_t_sum += o.first_switch_t_sum;
  entry_r1_coin += o.entry_r1_coin;
  entry_r2 += o.entry_r2;
  entry_safe_break += o.entry_safe_break;
}

StateAgg AuditReport::pooled() const {
  StateAgg agg = high;
  agg.merge(low);
  return agg;
}

namespace {

struct Partial {
  StateAgg high;
  StateAgg low;
  std::array<ClassAccum, kClassSlots> classes{};
  ClassAccum comp_safe;
  ClassAccum comp_risky;
  std::vector<std::array<std::int64_t, 2>> buckets;
};

void merge_buckets(std::vector<std::array<std::int64_t, 2>>& into,
                   const std::vector<std::array<std::int64_t, 2>>& from) {
  if (from.size() > into.size()) into.resize(from.size(), {0, 0});
  for (std::size_t i = 0; i < from.size(); ++i) {
    into[i][0] += from[i][0];
    into[i][1] += from[i][1];
  }
}

// Folds runs [begin, end) of the corpus into `out`, ascending run order.
void fold_runs(const MonteCarloConfig& cfg, const PolicyTable& policy,
               std::int64_t begin, std::int64_t end, Partial& out) {
  const std::int64_t k = cfg.params.k;
  const double b = cfg.model.b;
  const int bucket_width = cfg.stage_bucket_width;

  std::array<ClassAccum, kClassSlots> local{};
  std::vector<std::array<std::int64_t, 2>> local_buckets;

  RunConfig rc;
  rc.model = cfg.model;
  rc.params = cfg.params;
  rc.profile = cfg.profile;
  rc.population = cfg.population;
  rc.forced_state = cfg.forced_state;
  rc.forced_coin = cfg.forced_coin;

  for (std::int64_t i = begin; i < end; ++i) {
    rc.run_id = i;
    rc.seed = derive_run_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    local.fill(ClassAccum{});
    if (bucket_width > 0)
      local_buckets.assign(
          static_cast<std::size_t>((cfg.population + bucket_width - 1) /
                                   bucket_width),
          {0, 0});

    Arm last_action = Arm::Risky;
    int last_draw = 0;
    int first_switch_draw = 0;

    const RunSummary s = run_fold(
        rc, &policy,
        [&](std::int64_t stage, const Message& msg, Arm action, int draw) {
          const ObsSymbol obs =
              stage == 1 ? ObsSymbol::Start
                         : (last_action == Arm::Safe
                                ? ObsSymbol::SafeReward
                                : (last_draw == 1 ? ObsSymbol::RewardOne
                                                  : ObsSymbol::RewardZero));
          const bool paid = msg.pay > 0.0;
          ClassAccum& c = local[static_cast<std::size_t>(
              class_index(msg.signal, msg.arm, obs, paid))];
          c.count++;
          c.t_sum += draw;
          // comply/deviate on the same realized draw (same math as
          // counterfactual_payoffs, inlined for the hot loop)
          const double comply =
              (msg.arm == Arm::Safe ? b : static_cast<double>(draw)) + msg.pay;
          const double deviate =
              msg.arm == Arm::Safe ? static_cast<double>(draw) : b;
          c.comply_sum += comply;
          c.deviate_sum += deviate;
          const double d = comply - deviate;
          c.d2_sum += d * d;
          if (stage == k + 1) first_switch_draw = draw;
          if (bucket_width > 0 && paid && msg.signal == PhaseSignal::Switching)
            local_buckets[static_cast<std::size_t>((stage - 1) / bucket_width)]
                         [msg.arm == Arm::Safe ? 0 : 1]++;
          last_action = action;
          last_draw = draw;
        });

    StateAgg& agg = s.state == WorldState::High ? out.high : out.low;
    agg.runs++;
    agg.mean_reward_sum += s.mean_reward;
    agg.mean_reward_sq_sum += s.mean_reward * s.mean_reward;

    const bool entered = s.entry == SwitchEntry::R1Coin ||
                         s.entry == SwitchEntry::R2 ||
                         s.entry == SwitchEntry::SafeBreak;
    if (entered) {
      agg.entered_switching++;
      if (s.x_count < k) agg.x_lt_k++;
      agg.first_switch_runs++;
      agg.first_switch_t_sum += first_switch_draw;
      if (s.entry == SwitchEntry::R1Coin) agg.entry_r1_coin++;
      else if (s.entry == SwitchEntry::R2) agg.entry_r2++;
      else agg.entry_safe_break++;
    }
    if (s.completed_switching) {
      agg.completed++;
      if (s.switch_to_safe != k || s.switch_to_risky != k)
        agg.switch_violations++;
    }
    if (s.exploit_entered) {
      agg.exploited++;
      const Arm v = *s.exploit_value;
      if (v == Arm::Risky) agg.exploit_risky++;
      if ((s.state == WorldState::High && v == Arm::Safe) ||
          (s.state == WorldState::Low && v == Arm::Risky))
        agg.wrong_exploit++;
    }
    if (s.deviation_stage) agg.deviated++;
    if (s.total_subsidy_promised > cfg.params.beta) agg.budget_violations++;
    agg.max_promised = std::max(agg.max_promised, s.total_subsidy_promised);
    agg.max_paid = std::max(agg.max_paid, s.total_subsidy_paid);

    const bool is_high = s.state == WorldState::High;
    for (int slot = 0; slot < kClassSlots; ++slot) {
      ClassAccum& lc = local[static_cast<std::size_t>(slot)];
      if (lc.count == 0) continue;
      if (is_high) lc.count_high = lc.count;
      out.classes[static_cast<std::size_t>(slot)].merge(lc);
    }
    if (s.completed_switching) {
      out.comp_safe.merge(local[static_cast<std::size_t>(class_index(
          PhaseSignal::Switching, Arm::Safe, ObsSymbol::RewardZero, true))]);
      out.comp_risky.merge(local[static_cast<std::size_t>(class_index(
          PhaseSignal::Switching, Arm::Risky, ObsSymbol::SafeReward, true))]);
      if (bucket_width > 0) merge_buckets(out.buckets, local_buckets);
    }
  }
}

}  // namespace

AuditReport monte_carlo(const MonteCarloConfig& config) {
  if (config.runs < 1)
    throw std::invalid_argument("monte_carlo: runs must be >= 1");
  if (config.population < 1)
    throw std::invalid_argument("monte_carlo: population must be >= 1");
  {
    RunConfig probe;
    probe.model = config.model;
    probe.params = config.params;
    probe.population = config.population;
    probe.forced_coin = config.forced_coin;
    detail::check_run_config(probe);  // fail fast, not on run #1
  }

  const PolicyTable policy =
      preintervention_policy(config.model, config.params.k);

  AuditReport report;
  report.config = config;

  const int workers =
      static_cast<int>(std::min<std::int64_t>(std::max(config.threads, 1),
                                              config.runs));
  if (workers <= 1) {
    Partial p;
    fold_runs(config, policy, 0, config.runs, p);
    report.high = p.high;
    report.low = p.low;
    report.classes = p.classes;
    report.completed_safe_switch = p.comp_safe;
    report.completed_risky_switch = p.comp_risky;
    report.bucket_counts = std::move(p.buckets);
    return report;
  }

  // Contiguous blocks per worker, merged in block order: the report is a
  // deterministic function of (config, threads).
  std::vector<Partial> partials(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  const std::int64_t block =
      (config.runs + workers - 1) / static_cast<std::int64_t>(workers);
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = block * w;
    const std::int64_t end = std::min<std::int64_t>(config.runs, begin + block);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      fold_runs(config, policy, begin, end,
                partials[static_cast<std::size_t>(w)]);
    });
  }
  for (auto& t : pool) t.join();

  for (const Partial& p : partials) {
    report.high.merge(p.high);
    report.low.merge(p.low);
    for (int slot = 0; slot < kClassSlots; ++slot)
      report.classes[static_cast<std::size_t>(slot)].merge(
          p.classes[static_cast<std::size_t>(slot)]);
    report.completed_safe_switch.merge(p.comp_safe);
    report.completed_risky_switch.merge(p.comp_risky);
    merge_buckets(report.bucket_counts, p.buckets);
  }
  return report;
}

// ---- checks ----

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

bool IcAuditResult::all_pass(bool strict) const {
  const auto ok = [strict](const CheckLine& line) {
    if (line.verdict == Verdict::Fail) return false;
    if (strict && line.verdict == Verdict::Inconclusive) return false;
    return true;
  };
  for (const auto& line : classes)
    if (!ok(line)) return false;
  return ok(continuation_mean) && ok(exploit_safe_mean);
}

IcAuditResult ic_audit(const AuditReport& report, const IcTolerances& tol) {
  IcAuditResult out;
  const MediatorParams& params = report.config.params;
  const double b = report.config.model.b;

  for (int slot = 0; slot < kClassSlots; ++slot) {
    const ClassAccum& c = report.classes[static_cast<std::size_t>(slot)];
    if (c.count == 0) continue;
    const InfoClassKey key = class_from_index(slot);

    CheckLine line;
    line.name = "ic " + class_label(key);
    // shortfall of complying; negative means complying strictly wins
    line.observed = c.deviate_mean() - c.comply_mean();
    line.bound = tol.z * c.margin_se();
    if (key.subsidized && key.signal == PhaseSignal::Switching)
      line.bound += params.subsidy;  // engineered to be indifferent within one subsidy
    std::ostringstream os;
    os << "count=" << c.count << " comply=" << c.comply_mean()
       << " deviate=" << c.deviate_mean() << " se=" << c.margin_se();
    line.detail = os.str();
    line.verdict = c.count < tol.min_count
                       ? Verdict::Inconclusive
                       : (line.observed <= line.bound ? Verdict::Pass
                                                      : Verdict::Fail);
    out.classes.push_back(std::move(line));
  }

  {
    const ClassAccum& c = report.cls(PhaseSignal::Switching, Arm::Risky,
                                     ObsSymbol::RewardOne, false);
    CheckLine line;
    line.name = "continuation_mean";
    if (c.count == 0) {
      line.verdict = Verdict::Inconclusive;
      line.detail = "no occurrences";
    } else {
      line.observed = b - c.e_t();  // needs e_t >= b up to noise
      line.bound = tol.z * c.e_t_se();
      std::ostringstream os;
      os << "count=" << c.count << " e_t=" << c.e_t();
      line.detail = os.str();
      line.verdict = c.count < tol.min_count
                         ? Verdict::Inconclusive
                         : (line.observed <= line.bound ? Verdict::Pass
                                                        : Verdict::Fail);
    }
    out.continuation_mean = std::move(line);
  }

  {
    ClassAccum pooled;
    for (int obs = 0; obs < 4; ++obs)
      for (int sub = 0; sub < 2; ++sub)
        pooled.merge(report.cls(PhaseSignal::Exploit, Arm::Safe,
                                static_cast<ObsSymbol>(obs), sub != 0));
    CheckLine line;
    line.name = "exploit_safe_mean";
    if (pooled.count == 0) {
      line.verdict = Verdict::Inconclusive;
      line.detail = "no occurrences";
    } else {
      line.observed = pooled.e_t() - b;  // needs e_t <= b up to noise
      line.bound = tol.z * pooled.e_t_se();
      std::ostringstream os;
      os << "count=" << pooled.count << " e_t=" << pooled.e_t();
      line.detail = os.str();
      line.verdict = pooled.count < tol.min_count
                         ? Verdict::Inconclusive
                         : (line.observed <= line.bound ? Verdict::Pass
                                                        : Verdict::Fail);
    }
    out.exploit_safe_mean = std::move(line);
  }

  return out;
}

namespace {

CheckLine misclassification_check(const ModelParams& model,
                                  const MediatorParams& params, WorldState w,
                                  std::int64_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const double p = model.success_prob(w);
  std::int64_t wrong = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    std::int64_t succ = 0;
    for (std::int64_t j = 0; j < params.k; ++j)
      succ += rng.next_bernoulli(p) ? 1 : 0;
    const bool meets = model.mean_meets_midpoint(succ, params.k);
    if (w == WorldState::High ? !meets : meets) wrong++;
  }
  CheckLine line;
  line.name = std::string("misclassification_") +
              (w == WorldState::High ? "high" : "low");
  line.observed = static_cast<double>(wrong) / static_cast<double>(samples);
  line.bound = params.eps / 4.0;
  std::ostringstream os;
  os << "wrong=" << wrong << "/" << samples;
  line.detail = os.str();
  line.verdict = line.observed <= line.bound ? Verdict::Pass : Verdict::Fail;
  return line;
}

CheckLine completion_check(const AuditReport& corpus, WorldState w,
                           double gamma, double z) {
  const StateAgg& agg = corpus.state(w);
  CheckLine line;
  line.name = std::string("switching_completion_") +
              (w == WorldState::High ? "high" : "low");
  line.bound = gamma;
  const std::int64_t required = static_cast<std::int64_t>(
      std::ceil(z * z * (1.0 - gamma) / gamma));
  std::ostringstream os;
  os << "short_runs=" << agg.x_lt_k << "/" << agg.entered_switching
     << " required_entries=" << required;
  line.detail = os.str();
  if (agg.entered_switching == 0) {
    line.verdict = Verdict::Inconclusive;
    return line;
  }
  line.observed = static_cast<double>(agg.x_lt_k) /
                  static_cast<double>(agg.entered_switching);
  if (agg.entered_switching < required)
    line.verdict = Verdict::Inconclusive;
  else
    line.verdict = line.observed <= line.bound ? Verdict::Pass : Verdict::Fail;
  return line;
}

}  // namespace

std::vector<CheckLine> lemma_checks_from(const AuditReport& unconditional,
                                         const AuditReport& forced_high,
                                         const AuditReport& forced_low,
                                         std::int64_t misclass_samples,
                                         std::uint64_t seed, double z) {
  const ModelParams& model = unconditional.config.model;
  const MediatorParams& params = unconditional.config.params;
  const double gamma =
      std::min(params.beta / (4.0 * static_cast<double>(params.k)),
               params.eps / 4.0);

  std::vector<CheckLine> lines;
  lines.push_back(misclassification_check(model, params, WorldState::High,
                                          misclass_samples, seed));
  lines.push_back(misclassification_check(model, params, WorldState::Low,
                                          misclass_samples, seed + 1));
  lines.push_back(completion_check(forced_high, WorldState::High, gamma, z));
  lines.push_back(completion_check(forced_low, WorldState::Low, gamma, z));

  {
    CheckLine line;
    line.name = "switch_balance";
    const std::int64_t violations = unconditional.pooled().switch_violations +
                                    forced_high.pooled().switch_violations +
                                    forced_low.pooled().switch_violations;
    const std::int64_t completed = unconditional.pooled().completed +
                                   forced_high.pooled().completed +
                                   forced_low.pooled().completed;
    line.observed = static_cast<double>(violations);
    line.bound = 0.0;
    std::ostringstream os;
    os << "violations=" << violations << " completed_runs=" << completed;
    line.detail = os.str();
    line.verdict = completed == 0 ? Verdict::Inconclusive
                                  : (violations == 0 ? Verdict::Pass
                                                     : Verdict::Fail);
    lines.push_back(std::move(line));
  }

  {
    CheckLine line;
    line.name = "switch_mean_gap";
    const ClassAccum& cs = unconditional.completed_safe_switch;
    const ClassAccum& cr = unconditional.completed_risky_switch;
    if (cs.count < 30 || cr.count < 30) {
      line.verdict = Verdict::Inconclusive;
      std::ostringstream os;
      os << "counts=" << cs.count << "," << cr.count;
      line.detail = os.str();
    } else {
      const double se_s = cs.e_t_se();
      const double se_r = cr.e_t_se();
      line.observed = std::abs(cs.e_t() - cr.e_t());
      line.bound = z * std::sqrt(se_s * se_s + se_r * se_r);
      std::ostringstream os;
      os << "safe_mean=" << cs.e_t() << " risky_mean=" << cr.e_t()
         << " counts=" << cs.count << "," << cr.count;
      line.detail = os.str();
      line.verdict =
          line.observed <= line.bound ? Verdict::Pass : Verdict::Fail;
    }
    lines.push_back(std::move(line));
  }

  return lines;
}

std::vector<CheckLine> lemma_checks(const ModelParams& model,
                                    const MediatorParams& params,
                                    std::int64_t population, std::int64_t runs,
                                    std::uint64_t master_seed) {
  MonteCarloConfig base;
  base.model = model;
  base.params = params;
  base.population = population;
  base.runs = runs;

  MonteCarloConfig uncond = base;
  uncond.master_seed = master_seed;
  MonteCarloConfig high = base;
  high.forced_state = WorldState::High;
  high.master_seed = master_seed + 1;
  MonteCarloConfig low = base;
  low.forced_state = WorldState::Low;
  low.master_seed = master_seed + 2;

  return lemma_checks_from(monte_carlo(uncond), monte_carlo(high),
                           monte_carlo(low), 100000, master_seed + 3, 3.0);
}

bool StandardAudit::all_pass(bool strict) const {
  for (const auto& line : lines) {
    if (line.verdict == Verdict::Fail) return false;
    if (strict && line.verdict == Verdict::Inconclusive) return false;
  }
  return ic.all_pass(strict);
}

StandardAudit standard_audit(const ModelParams& model,
                             const MediatorParams& params,
                             const AuditOptions& options) {
  StandardAudit audit;
  const std::int64_t population =
      options.population > 0 ? options.population : params.n_prime;

  MonteCarloConfig base;
  base.model = model;
  base.params = params;
  base.profile = options.profile;
  base.population = population;
  base.threads = options.threads;
  base.stage_bucket_width = options.stage_bucket_width;

  MonteCarloConfig uncond = base;
  uncond.runs = options.runs_unconditional;
  uncond.master_seed = options.master_seed;
  MonteCarloConfig high = base;
  high.runs = options.runs_per_state;
  high.forced_state = WorldState::High;
  high.master_seed = options.master_seed + 1;
  MonteCarloConfig low = base;
  low.runs = options.runs_per_state;
  low.forced_state = WorldState::Low;
  low.master_seed = options.master_seed + 2;

  audit.unconditional = monte_carlo(uncond);
  audit.forced_high = monte_carlo(high);
  audit.forced_low = monte_carlo(low);

  audit.ic = ic_audit(audit.unconditional,
                      IcTolerances{options.z, options.min_count});

  auto& lines = audit.lines;

  {
    CheckLine line;
    line.name = "budget_cap";
    const double max_promised =
        std::max({audit.unconditional.pooled().max_promised,
                  audit.forced_high.pooled().max_promised,
                  audit.forced_low.pooled().max_promised});
    const std::int64_t violations =
        audit.unconditional.pooled().budget_violations +
        audit.forced_high.pooled().budget_violations +
        audit.forced_low.pooled().budget_violations;
    line.observed = max_promised;
    line.bound = params.beta;
    std::ostringstream os;
    os << "violations=" << violations;
    line.detail = os.str();
    line.verdict = violations == 0 && max_promised <= params.beta
                       ? Verdict::Pass
                       : Verdict::Fail;
    lines.push_back(std::move(line));
  }

  const auto optimality_line = [&](const AuditReport& corpus, WorldState w) {
    const StateAgg& agg = corpus.state(w);
    CheckLine line;
    line.name = std::string("epsilon_optimality_") +
                (w == WorldState::High ? "high" : "low");
    const double target =
        (1.0 - params.eps) *
        (w == WorldState::High ? model.p_high : model.b);
    std::ostringstream os;
    if (agg.runs < 2) {
      line.verdict = Verdict::Inconclusive;
      os << "runs=" << agg.runs;
      line.detail = os.str();
      return line;
    }
    line.observed = target - agg.mean_reward();  // <= z se to pass
    line.bound = options.z * agg.mean_reward_se();
    os << "mean=" << agg.mean_reward() << " target=" << target
       << " runs=" << agg.runs;
    line.detail = os.str();
    line.verdict = line.observed <= line.bound ? Verdict::Pass : Verdict::Fail;
    return line;
  };
  lines.push_back(optimality_line(audit.forced_high, WorldState::High));
  lines.push_back(optimality_line(audit.forced_low, WorldState::Low));

  {
    CheckLine line;
    line.name = "ic_classes";
    std::int64_t pass = 0, fail = 0, inconclusive = 0;
    for (const auto& cl : audit.ic.classes) {
      if (cl.verdict == Verdict::Pass) pass++;
      else if (cl.verdict == Verdict::Fail) fail++;
      else inconclusive++;
    }
    std::ostringstream os;
    os << "pass=" << pass << " fail=" << fail
       << " inconclusive=" << inconclusive;
    line.detail = os.str();
    line.observed = static_cast<double>(fail);
    line.bound = 0.0;
    line.verdict = fail > 0 ? Verdict::Fail
                            : (inconclusive > 0 && pass == 0
                                   ? Verdict::Inconclusive
                                   : Verdict::Pass);
    lines.push_back(std::move(line));
  }
  lines.push_back(audit.ic.continuation_mean);
  lines.push_back(audit.ic.exploit_safe_mean);

  for (auto& line :
       lemma_checks_from(audit.unconditional, audit.forced_high,
                         audit.forced_low, options.misclass_samples,
                         options.master_seed + 3, options.z))
    lines.push_back(std::move(line));

  {
    // The blend statement only holds when delta is the interior solution of
    // the indifference equation; an overridden or clamped delta makes the
    // check meaningless rather than failed.
    CheckLine line;
    line.name = "delta_indifference";
    bool interior = false;
    try {
      const DeltaResult d = solve_delta(model, params.k);
      interior = !d.clamped &&
                 std::abs(d.delta - params.delta) <= 1e-9;
    } catch (const DegenerateDeltaError&) {
      interior = false;
    }
    const StateAgg agg = audit.unconditional.pooled();
    if (!interior) {
      line.verdict = Verdict::Inconclusive;
      line.detail = "delta is not the interior indifference solution";
    } else if (agg.first_switch_runs < 30) {
      line.verdict = Verdict::Inconclusive;
      std::ostringstream os;
      os << "entries=" << agg.first_switch_runs;
      line.detail = os.str();
    } else {
      const double n = static_cast<double>(agg.first_switch_runs);
      const double mean = static_cast<double>(agg.first_switch_t_sum) / n;
      const double var = mean * (1.0 - mean) * n / (n - 1.0);
      const double se = std::sqrt(var / n);
      line.observed = std::abs(mean - model.b);
      line.bound = options.z * se;
      std::ostringstream os;
      os << "first_switch_mean=" << mean << " entries="
         << agg.first_switch_runs;
      line.detail = os.str();
      line.verdict =
          line.observed <= line.bound ? Verdict::Pass : Verdict::Fail;
    }
    lines.push_back(std::move(line));
  }

  return audit;
}

}  // namespace innkeeper
