#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "innkeeper/harness.hpp"

namespace innkeeper {

using nlohmann::json;

// Doubles in CSV output go through %.17g so files round-trip exactly and
// rerunning a command reproduces them byte for byte. JSON relies on the
// library's shortest-round-trip printing, which is equally stable.
std::string fmt_double(double v);

json model_to_json(const ModelParams& model);
ModelParams model_from_json(const json& j);

json params_to_json(const MediatorParams& params);
MediatorParams params_from_json(const json& j);

json profile_to_json(const StrategyProfile& profile);
StrategyProfile profile_from_json(const json& j);

// Calibration output: params keys at the top level, the model echoed, and
// diagnostics nested.
json calibration_to_json(const CalibrationReport& report,
                         const ModelParams& model);

json run_config_to_json(const RunConfig& config);
json summary_to_json(const RunSummary& summary);
json state_agg_to_json(const StateAgg& agg);
json class_row_to_json(const InfoClassKey& key, const ClassAccum& accum,
                       double subsidy);
json mc_config_to_json(const MonteCarloConfig& config);
json audit_report_to_json(const AuditReport& report);
json check_line_to_json(const CheckLine& line);
json standard_audit_to_json(const StandardAudit& audit);

// "#"-prefixed header block: artifact name/version plus the exact config the
// file was produced from. No timestamps — outputs must be reproducible.
void write_trace_csv(std::ostream& os, const RunTrace& trace);
void write_classes_csv(std::ostream& os, const AuditReport& report);

}  // namespace innkeeper
