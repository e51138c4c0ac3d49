#include "innkeeper/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "innkeeper/version.hpp"

namespace innkeeper {

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json finite_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

json opt_or_null(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

StrategyKind strategy_from_string(const std::string& s) {
  if (s == "compliant") return StrategyKind::Compliant;
  if (s == "deviant") return StrategyKind::ScriptedDeviant;
  if (s == "myopic") return StrategyKind::MyopicPrior;
  throw std::invalid_argument("unknown strategy: " + s);
}

DeviationRule rule_from_string(const std::string& s) {
  if (s == "flip") return DeviationRule::Flip;
  if (s == "always_s") return DeviationRule::AlwaysSafe;
  if (s == "always_r") return DeviationRule::AlwaysRisky;
  throw std::invalid_argument("unknown deviation rule: " + s);
}

void write_header_block(std::ostream& os, const json& config) {
  os << "# " << kArtifactName << " " << kArtifactVersion << "\n";
  os << "# config: " << config.dump() << "\n";
}

}  // namespace

json model_to_json(const ModelParams& model) {
  return json{{"q", model.q},
              {"p_h", model.p_high},
              {"p_l", model.p_low},
              {"b", model.b}};
}

ModelParams model_from_json(const json& j) {
  ModelParams model;
  model.q = j.at("q").get<double>();
  model.p_high = j.at("p_h").get<double>();
  model.p_low = j.at("p_l").get<double>();
  model.b = j.at("b").get<double>();
  return model;
}

json params_to_json(const MediatorParams& params) {
  return json{{"k", params.k},         {"delta", params.delta},
              {"n_hat", params.n_hat}, {"n_prime", params.n_prime},
              {"beta", params.beta},   {"subsidy", params.subsidy},
              {"eps", params.eps}};
}

MediatorParams params_from_json(const json& j) {
  MediatorParams params;
  params.k = j.at("k").get<std::int64_t>();
  params.delta = j.at("delta").get<double>();
  params.n_hat = j.at("n_hat").get<std::int64_t>();
  params.n_prime = j.at("n_prime").get<std::int64_t>();
  params.beta = j.at("beta").get<double>();
  params.subsidy = j.at("subsidy").get<double>();
  params.eps = j.at("eps").get<double>();
  return params;
}

json profile_to_json(const StrategyProfile& profile) {
  return json{{"strategy", to_string(profile.kind)},
              {"deviation_stages", profile.deviation_stages},
              {"rule", to_string(profile.rule)}};
}

StrategyProfile profile_from_json(const json& j) {
  StrategyProfile profile;
  if (j.contains("strategy"))
    profile.kind = strategy_from_string(j.at("strategy").get<std::string>());
  if (j.contains("deviation_stages"))
    profile.deviation_stages =
        j.at("deviation_stages").get<std::vector<std::int64_t>>();
  if (j.contains("rule"))
    profile.rule = rule_from_string(j.at("rule").get<std::string>());
  normalize(profile);
  return profile;
}

json calibration_to_json(const CalibrationReport& report,
                         const ModelParams& model) {
  json j = params_to_json(report.params);
  j["artifact"] = kArtifactName;
  j["version"] = kArtifactVersion;
  j["model"] = model_to_json(model);
  j["diagnostics"] = json{
      {"e1", opt_or_null(report.expectations.e1)},
      {"e2", opt_or_null(report.expectations.e2)},
      {"e3", opt_or_null(report.expectations.e3)},
      {"p_r1", report.events.r1},
      {"p_r2", report.events.r2},
      {"p_s", report.events.s},
      {"p_r1_high", report.events.r1_high},
      {"p_r2_high", report.events.r2_high},
      {"p_s_high", report.events.s_high},
      {"p_r1_low", report.events.r1_low},
      {"p_r2_low", report.events.r2_low},
      {"p_s_low", report.events.s_low},
      {"delta_unclamped", report.delta_unclamped},
      {"delta_clamped", report.delta_clamped},
      {"gamma", report.gamma},
      {"epsilon_prime", report.epsilon_prime},
      {"mixture_residual", finite_or_null(report.mixture_residual)},
  };
  return j;
}

json run_config_to_json(const RunConfig& config) {
  return json{{"model", model_to_json(config.model)},
              {"params", params_to_json(config.params)},
              {"profile", profile_to_json(config.profile)},
              {"population", config.population},
              {"seed", config.seed},
              {"run_id", config.run_id},
              {"forced_state", config.forced_state
                                   ? json(to_string(*config.forced_state))
                                   : json(nullptr)},
              {"forced_coin",
               config.forced_coin ? json(*config.forced_coin) : json(nullptr)},
              {"forced_rewards", config.forced_rewards}};
}

json summary_to_json(const RunSummary& summary) {
  return json{
      {"state", to_string(summary.state)},
      {"coin", summary.coin ? json(*summary.coin) : json(nullptr)},
      {"mean_reward", summary.mean_reward},
      {"total_subsidy_promised", summary.total_subsidy_promised},
      {"total_subsidy_paid", summary.total_subsidy_paid},
      {"exploit_entered", summary.exploit_entered},
      {"exploit_stage",
       summary.exploit_stage ? json(*summary.exploit_stage) : json(nullptr)},
      {"exploit_value", summary.exploit_value
                            ? json(to_string(*summary.exploit_value))
                            : json(nullptr)},
      {"completed_switching", summary.completed_switching},
      {"entry", to_string(summary.entry)},
      {"x_count", summary.x_count},
      {"switch_to_safe", summary.switch_to_safe},
      {"switch_to_risky", summary.switch_to_risky},
      {"subsidized_messages", summary.subsidized_messages},
      {"deviation_stage", summary.deviation_stage
                              ? json(*summary.deviation_stage)
                              : json(nullptr)},
  };
}

json state_agg_to_json(const StateAgg& agg) {
  json j{{"runs", agg.runs},
         {"entered_switching", agg.entered_switching},
         {"x_lt_k", agg.x_lt_k},
         {"completed", agg.completed},
         {"switch_violations", agg.switch_violations},
         {"exploited", agg.exploited},
         {"exploit_risky", agg.exploit_risky},
         {"wrong_exploit", agg.wrong_exploit},
         {"deviated", agg.deviated},
         {"budget_violations", agg.budget_violations},
         {"max_promised", agg.max_promised},
         {"max_paid", agg.max_paid},
         {"first_switch_runs", agg.first_switch_runs},
         {"entry_r1_coin", agg.entry_r1_coin},
         {"entry_r2", agg.entry_r2},
         {"entry_safe_break", agg.entry_safe_break}};
  j["mean_reward"] = agg.runs > 0 ? json(agg.mean_reward()) : json(nullptr);
  j["mean_reward_se"] =
      agg.runs > 1 ? json(agg.mean_reward_se()) : json(nullptr);
  j["first_switch_mean"] =
      agg.first_switch_runs > 0
          ? json(static_cast<double>(agg.first_switch_t_sum) /
                 static_cast<double>(agg.first_switch_runs))
          : json(nullptr);
  return j;
}

json class_row_to_json(const InfoClassKey& key, const ClassAccum& accum,
                       double subsidy) {
  return json{{"class_phase", to_string(key.signal)},
              {"class_rec", to_string(key.rec)},
              {"class_obs", to_string(key.obs)},
              {"class_subsidy", key.subsidized ? subsidy : 0.0},
              {"count", accum.count},
              {"p_h_hat", accum.p_high_hat()},
              {"e_t_hat", accum.e_t()},
              {"se", accum.e_t_se()},
              {"comply_mean", accum.comply_mean()},
              {"deviate_mean", accum.deviate_mean()},
              {"margin", accum.margin()},
              {"margin_se", accum.margin_se()}};
}

json mc_config_to_json(const MonteCarloConfig& config) {
  return json{{"model", model_to_json(config.model)},
              {"params", params_to_json(config.params)},
              {"profile", profile_to_json(config.profile)},
              {"population", config.population},
              {"runs", config.runs},
              {"master_seed", config.master_seed},
              {"forced_state", config.forced_state
                                   ? json(to_string(*config.forced_state))
                                   : json(nullptr)},
              {"forced_coin", config.forced_coin ? json(*config.forced_coin)
                                                 : json(nullptr)},
              {"threads", config.threads},
              {"stage_bucket_width", config.stage_bucket_width}};
}

json audit_report_to_json(const AuditReport& report) {
  json classes = json::array();
  for (int slot = 0; slot < kClassSlots; ++slot) {
    const ClassAccum& c = report.classes[static_cast<std::size_t>(slot)];
    if (c.count == 0) continue;
    classes.push_back(class_row_to_json(class_from_index(slot), c,
                                        report.config.params.subsidy));
  }
  const auto completed_accum = [](const ClassAccum& c) {
    json j{{"count", c.count}};
    j["e_t_hat"] = c.count > 0 ? json(c.e_t()) : json(nullptr);
    j["se"] = c.count > 1 ? json(c.e_t_se()) : json(nullptr);
    return j;
  };
  json j{{"artifact", kArtifactName},
         {"version", kArtifactVersion},
         {"config", mc_config_to_json(report.config)},
         {"high", state_agg_to_json(report.high)},
         {"low", state_agg_to_json(report.low)},
         {"classes", std::move(classes)},
         {"completed_safe_switch", completed_accum(report.completed_safe_switch)},
         {"completed_risky_switch",
          completed_accum(report.completed_risky_switch)}};
  if (!report.bucket_counts.empty()) {
    json buckets = json::array();
    for (const auto& pair : report.bucket_counts)
      buckets.push_back(json::array({pair[0], pair[1]}));
    j["bucket_counts"] = std::move(buckets);
  }
  return j;
}

json check_line_to_json(const CheckLine& line) {
  return json{{"name", line.name},
              {"verdict", to_string(line.verdict)},
              {"observed", finite_or_null(line.observed)},
              {"bound", finite_or_null(line.bound)},
              {"detail", line.detail}};
}

json standard_audit_to_json(const StandardAudit& audit) {
  json lines = json::array();
  for (const auto& line : audit.lines) lines.push_back(check_line_to_json(line));
  json ic_classes = json::array();
  for (const auto& line : audit.ic.classes)
    ic_classes.push_back(check_line_to_json(line));
  return json{{"artifact", kArtifactName},
              {"version", kArtifactVersion},
              {"all_pass", audit.all_pass(false)},
              {"all_pass_strict", audit.all_pass(true)},
              {"lines", std::move(lines)},
              {"ic_classes", std::move(ic_classes)},
              {"unconditional", audit_report_to_json(audit.unconditional)},
              {"forced_high", audit_report_to_json(audit.forced_high)},
              {"forced_low", audit_report_to_json(audit.forced_low)}};
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  write_header_block(os, run_config_to_json(trace.config));
  os << "run_id,state,stage,phase_signal,rec_arm,subsidy_offered,action,"
        "reward,risky_draw,subsidy_paid\n";
  for (const StageRecord& rec : trace.records) {
    os << trace.config.run_id << ',' << to_string(trace.summary.state) << ','
       << rec.stage << ',' << to_string(rec.message.signal) << ','
       << to_string(rec.message.arm) << ',' << fmt_double(rec.message.pay)
       << ',' << to_string(rec.action) << ',' << fmt_double(rec.reward) << ','
       << rec.risky_draw << ',' << fmt_double(rec.subsidy_paid) << '\n';
  }
}

void write_classes_csv(std::ostream& os, const AuditReport& report) {
  write_header_block(os, mc_config_to_json(report.config));
  os << "class_phase,class_rec,class_obs,class_subsidy,count,p_h_hat,e_t_hat,"
        "se,comply_mean,deviate_mean,margin\n";
  const double subsidy = report.config.params.subsidy;
  for (int slot = 0; slot < kClassSlots; ++slot) {
    const ClassAccum& c = report.classes[static_cast<std::size_t>(slot)];
    if (c.count == 0) continue;
    const InfoClassKey key = class_from_index(slot);
    os << to_string(key.signal) << ',' << to_string(key.rec) << ','
       << to_string(key.obs) << ','
       << fmt_double(key.subsidized ? subsidy : 0.0) << ',' << c.count << ','
       << fmt_double(c.p_high_hat()) << ',' << fmt_double(c.e_t()) << ','
       << fmt_double(c.e_t_se()) << ',' << fmt_double(c.comply_mean()) << ','
       << fmt_double(c.deviate_mean()) << ',' << fmt_double(c.margin())
       << '\n';
  }
}

}  // namespace innkeeper
