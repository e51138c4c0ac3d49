#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "innkeeper/serialize.hpp"
#include "innkeeper/version.hpp"

namespace fs = std::filesystem;
using namespace innkeeper;

namespace {

// Exit codes: 0 pass, 1 usage/validation, 2 degenerate calibration, 3 I/O.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every flag has a config-file twin: the JSON key is the flag name with
// dashes turned into underscores. Inline flags win over the file.
struct Opts {
  double q = 0.5, p_h = 0.8, p_l = 0.3, b = 0.5;
  double eps = 0.1, beta = 1.0;
  std::int64_t runs = 2000;
  std::int64_t runs_per_state = 0;  // 0: same as runs
  std::uint64_t seed = 20240901;
  std::int64_t n = 0;  // population override; 0: calibrated n_prime
  std::int64_t k = 0;  // sample-size override; 0: calibrated
  std::int64_t run_id = 0;
  std::string out;  // output dir; falls back to $INNKEEPER_OUT, then "."
  std::string format = "json";
  std::string config_path;
  std::string strategy = "compliant";
  std::string rule = "flip";
  std::vector<std::int64_t> deviation_stages;
  int forced_coin = -1;      // -1: draw it
  std::string forced_state;  // "", "H", "L"
  std::vector<int> forced_rewards;
  int threads = 1;
  bool strict = false;
  double z = 3.0;
  std::int64_t min_count = 30;
  std::int64_t misclass_samples = 100000;
  int bucket_width = 0;
  std::vector<double> eps_grid;
  std::vector<double> beta_grid;
};

json load_and_merge(const CLI::App& cmd, Opts& o) {
  json j = json::object();
  if (o.config_path.empty()) return j;
  std::ifstream in(o.config_path);
  if (!in) throw IoError("cannot open config file: " + o.config_path);
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config file: ") + e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config file: top-level JSON object expected");

  const auto take = [&](const char* flag, const char* key, auto& field) {
    const CLI::Option* opt = cmd.get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;  // flag wins
    if (!j.contains(key)) return;
    field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  take("--q", "q", o.q);
  take("--p-h", "p_h", o.p_h);
  take("--p-l", "p_l", o.p_l);
  take("--b", "b", o.b);
  take("--eps", "eps", o.eps);
  take("--beta", "beta", o.beta);
  take("--runs", "runs", o.runs);
  take("--runs-per-state", "runs_per_state", o.runs_per_state);
  take("--seed", "seed", o.seed);
  take("--n", "n", o.n);
  take("--k", "k", o.k);
  take("--run-id", "run_id", o.run_id);
  take("--out", "out", o.out);
  take("--format", "format", o.format);
  take("--strategy", "strategy", o.strategy);
  take("--rule", "rule", o.rule);
  take("--deviation-stages", "deviation_stages", o.deviation_stages);
  take("--forced-coin", "forced_coin", o.forced_coin);
  take("--forced-state", "forced_state", o.forced_state);
  take("--forced-rewards", "forced_rewards", o.forced_rewards);
  take("--threads", "threads", o.threads);
  take("--strict", "strict", o.strict);
  take("--z", "z", o.z);
  take("--min-count", "min_count", o.min_count);
  take("--misclass-samples", "misclass_samples", o.misclass_samples);
  take("--bucket-width", "bucket_width", o.bucket_width);
  take("--eps-grid", "eps_grid", o.eps_grid);
  take("--beta-grid", "beta_grid", o.beta_grid);
  return j;
}

ModelParams model_from(const Opts& o) {
  ModelParams m;
  m.q = o.q;
  m.p_high = o.p_h;
  m.p_low = o.p_l;
  m.b = o.b;
  return m;
}

// Parameter precedence: a full "params" object in the config file, otherwise
// a fresh calibration at (eps, beta); --k then re-derives the k-dependent
// constants on top of either.
MediatorParams resolve_params(const Opts& o, const ModelParams& model,
                              const json& cfg) {
  MediatorParams p;
  if (cfg.contains("params"))
    p = params_from_json(cfg.at("params"));
  else
    p = calibrate(model, o.eps, o.beta).params;
  if (o.k > 0 && o.k != p.k) {
    p.k = o.k;
    p.delta = solve_delta(model, o.k).delta;
    p.n_hat = switching_horizon(model, o.k, p.beta, p.eps);
    p.n_prime = population_bound(o.k, p.n_hat, p.eps);
    p.subsidy = per_switch_subsidy(p.beta, o.k);
  }
  return p;
}

StrategyProfile resolve_profile(const Opts& o) {
  return profile_from_json(json{{"strategy", o.strategy},
                                {"rule", o.rule},
                                {"deviation_stages", o.deviation_stages}});
}

std::optional<WorldState> resolve_forced_state(const Opts& o) {
  if (o.forced_state.empty()) return std::nullopt;
  if (o.forced_state == "H") return WorldState::High;
  if (o.forced_state == "L") return WorldState::Low;
  throw std::invalid_argument("--forced-state must be H or L");
}

std::optional<int> resolve_forced_coin(const Opts& o) {
  if (o.forced_coin < 0) return std::nullopt;
  if (o.forced_coin > 1)
    throw std::invalid_argument("--forced-coin must be 0 or 1");
  return o.forced_coin;
}

std::int64_t resolve_population(const Opts& o, const MediatorParams& params) {
  const std::int64_t population = o.n > 0 ? o.n : params.n_prime;
  if (population < params.k) {
    std::ostringstream os;
    os << "N < K: population " << population
       << " is smaller than the sample size k=" << params.k;
    throw std::invalid_argument(os.str());
  }
  return population;
}

fs::path ensure_out_dir(const Opts& o) {
  std::string dir = o.out;
  if (dir.empty()) {
    if (const char* env = std::getenv("INNKEEPER_OUT"); env && *env)
      dir = env;
    else
      dir = ".";
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir + ": " +
                  ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  f << text;
  f.flush();
  if (!f) throw IoError("write failed: " + path.string());
}

// ---- commands ----

int cmd_calibrate(const Opts& o) {
  const ModelParams model = model_from(o);
  const CalibrationReport report = calibrate(model, o.eps, o.beta);
  const std::string text = calibration_to_json(report, model).dump(2) + "\n";
  std::cout << text;
  write_text(ensure_out_dir(o) / "calibration.json", text);
  return kExitOk;
}

int cmd_simulate(const Opts& o, const json& cfg) {
  const ModelParams model = model_from(o);

  RunConfig rc;
  rc.model = model;
  rc.params = resolve_params(o, model, cfg);
  rc.population = resolve_population(o, rc.params);
  rc.profile = resolve_profile(o);
  rc.run_id = o.run_id;
  rc.seed = derive_run_seed(o.seed, static_cast<std::uint64_t>(o.run_id));
  rc.forced_state = resolve_forced_state(o);
  rc.forced_coin = resolve_forced_coin(o);
  rc.forced_rewards = o.forced_rewards;

  const RunTrace trace = run(rc);

  const fs::path dir = ensure_out_dir(o);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  write_text(dir / "trace.csv", csv.str());

  const json summary{{"artifact", kArtifactName},
                     {"version", kArtifactVersion},
                     {"config", run_config_to_json(rc)},
                     {"summary", summary_to_json(trace.summary)}};
  const std::string text = summary.dump(2) + "\n";
  write_text(dir / "summary.json", text);
  std::cout << text;
  return kExitOk;
}

void print_check_lines(const StandardAudit& audit) {
  for (const CheckLine& line : audit.lines) {
    std::cout << to_string(line.verdict) << " " << line.name
              << " observed=" << fmt_double(line.observed)
              << " bound=" << fmt_double(line.bound);
    if (!line.detail.empty()) std::cout << "  [" << line.detail << "]";
    std::cout << "\n";
  }
}

AuditOptions audit_options_from(const Opts& o) {
  AuditOptions ao;
  ao.runs_unconditional = o.runs;
  ao.runs_per_state = o.runs_per_state > 0 ? o.runs_per_state : o.runs;
  ao.population = o.n;
  ao.master_seed = o.seed;
  ao.z = o.z;
  ao.min_count = o.min_count;
  ao.misclass_samples = o.misclass_samples;
  ao.threads = o.threads;
  ao.stage_bucket_width = o.bucket_width;
  ao.profile = resolve_profile(o);
  return ao;
}

int cmd_audit(const Opts& o, const json& cfg) {
  if (o.runs < 1) throw std::invalid_argument("audit: runs must be >= 1");
  const ModelParams model = model_from(o);
  const MediatorParams params = resolve_params(o, model, cfg);
  resolve_population(o, params);  // reject N < K before the long part

  const StandardAudit audit = standard_audit(model, params, audit_options_from(o));

  const fs::path dir = ensure_out_dir(o);
  if (o.format == "json") {
    write_text(dir / "audit.json", standard_audit_to_json(audit).dump(2) + "\n");
  } else {
    std::ostringstream csv;
    write_classes_csv(csv, audit.unconditional);
    write_text(dir / "classes.csv", csv.str());
  }

  print_check_lines(audit);
  return audit.all_pass(o.strict) ? kExitOk : kExitUsage;
}

std::string line_verdict(const std::vector<CheckLine>& lines,
                         const std::string& name) {
  for (const auto& line : lines)
    if (line.name == name) return to_string(line.verdict);
  return "";
}

int cmd_sweep(const Opts& o, const json&) {
  if (o.runs < 1) throw std::invalid_argument("sweep: runs must be >= 1");
  const ModelParams model = model_from(o);
  const std::vector<double> eps_grid =
      o.eps_grid.empty() ? std::vector<double>{o.eps} : o.eps_grid;
  const std::vector<double> beta_grid =
      o.beta_grid.empty() ? std::vector<double>{o.beta} : o.beta_grid;

  std::ostringstream csv;
  csv << "# " << kArtifactName << " " << kArtifactVersion << "\n";
  csv << "# config: "
      << json{{"model", model_to_json(model)},
              {"eps_grid", eps_grid},
              {"beta_grid", beta_grid},
              {"runs", o.runs},
              {"runs_per_state", o.runs_per_state > 0 ? o.runs_per_state : o.runs},
              {"n", o.n},
              {"seed", o.seed},
              {"z", o.z},
              {"threads", o.threads}}
             .dump()
      << "\n";
  csv << "eps,beta,status,k,delta,n_hat,n_prime,subsidy,budget,"
         "optimality_high,optimality_low,ic_classes,completion_high,"
         "completion_low,switch_balance,all_pass\n";

  int rows = 0;
  for (const double eps : eps_grid) {
    for (const double beta : beta_grid) {
      csv << fmt_double(eps) << ',' << fmt_double(beta) << ',';
      Opts point = o;
      point.eps = eps;
      point.beta = beta;
      point.k = 0;  // grid points always use their own calibration
      try {
        const MediatorParams params = calibrate(model, eps, beta).params;
        resolve_population(point, params);
        const StandardAudit audit =
            standard_audit(model, params, audit_options_from(point));
        csv << "ok," << params.k << ',' << fmt_double(params.delta) << ','
            << params.n_hat << ',' << params.n_prime << ','
            << fmt_double(params.subsidy) << ','
            << line_verdict(audit.lines, "budget_cap") << ','
            << line_verdict(audit.lines, "epsilon_optimality_high") << ','
            << line_verdict(audit.lines, "epsilon_optimality_low") << ','
            << line_verdict(audit.lines, "ic_classes") << ','
            << line_verdict(audit.lines, "switching_completion_high") << ','
            << line_verdict(audit.lines, "switching_completion_low") << ','
            << line_verdict(audit.lines, "switch_balance") << ','
            << (audit.all_pass(o.strict) ? "PASS" : "FAIL") << "\n";
      } catch (const DegenerateDeltaError&) {
        csv << "degenerate,,,,,,,,,,,,,\n";
      } catch (const std::invalid_argument&) {
        csv << "invalid,,,,,,,,,,,,,\n";
      }
      rows++;
    }
  }

  const fs::path path = ensure_out_dir(o) / "sweep.csv";
  write_text(path, csv.str());
  std::cout << "wrote " << path.string() << " (" << rows << " grid points)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "innkeeper: calibrate, simulate, and audit a subsidized recommendation "
      "mediator for a two-armed bandit with social observation"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string(kArtifactName) + " " + kArtifactVersion);

  Opts o;

  const auto add_common = [&](CLI::App* c) {
    c->add_option("--config", o.config_path,
                  "JSON config file (keys = flag names with underscores); "
                  "inline flags win");
    c->add_option("--q", o.q, "prior probability of the high state");
    c->add_option("--p-h", o.p_h, "risky success probability, high state");
    c->add_option("--p-l", o.p_l, "risky success probability, low state");
    c->add_option("--b", o.b, "safe arm reward");
    c->add_option("--eps", o.eps, "optimality slack the constants are sized for");
    c->add_option("--beta", o.beta, "total subsidy budget per run");
    c->add_option("--out", o.out,
                  "output directory (default: $INNKEEPER_OUT, else .)");
  };
  const auto add_overrides = [&](CLI::App* c) {
    c->add_option("--k", o.k,
                  "override the calibrated sample size; delta, horizon, "
                  "population and subsidy are re-derived for it");
    c->add_option("--n", o.n, "population override (default: calibrated n_prime)");
    c->add_option("--seed", o.seed, "master seed; per-run streams derive from it");
  };
  const auto add_profile = [&](CLI::App* c) {
    c->add_option("--strategy", o.strategy, "compliant|deviant|myopic")
        ->check(CLI::IsMember({"compliant", "deviant", "myopic"}));
    c->add_option("--rule", o.rule, "deviant rule: flip|always_s|always_r")
        ->check(CLI::IsMember({"flip", "always_s", "always_r"}));
    c->add_option("--deviation-stages", o.deviation_stages,
                  "stages where a deviant applies its rule")
        ->delimiter(',');
  };
  const auto add_audit_knobs = [&](CLI::App* c) {
    c->add_option("--runs", o.runs, "unconditional Monte Carlo runs");
    c->add_option("--runs-per-state", o.runs_per_state,
                  "forced-state runs (default: same as --runs)");
    c->add_option("--threads", o.threads, "worker threads for run folding");
    c->add_option("--z", o.z, "confidence multiplier on standard errors");
  };

  CLI::App* cal = app.add_subcommand(
      "calibrate", "derive the mediator constants from the model");
  add_common(cal);

  CLI::App* sim = app.add_subcommand(
      "simulate", "run one trace; writes trace.csv and summary.json");
  add_common(sim);
  add_overrides(sim);
  add_profile(sim);
  sim->add_option("--run-id", o.run_id,
                  "run index; selects the derived per-run stream");
  sim->add_option("--forced-coin", o.forced_coin,
                  "force the switching coin (0 or 1)");
  sim->add_option("--forced-state", o.forced_state,
                  "force the hidden state (H or L)");
  sim->add_option("--forced-rewards", o.forced_rewards,
                  "scripted risky draws for the first stages, e.g. 1,0")
      ->delimiter(',');

  CLI::App* aud = app.add_subcommand(
      "audit", "Monte Carlo verification battery; one PASS/FAIL line per check");
  add_common(aud);
  add_overrides(aud);
  add_profile(aud);
  add_audit_knobs(aud);
  aud->add_option("--format", o.format,
                  "json: audit.json; csv: per-class classes.csv")
      ->check(CLI::IsMember({"json", "csv"}));
  aud->add_flag("--strict", o.strict,
                "inconclusive checks fail the exit code too");
  aud->add_option("--min-count", o.min_count,
                  "class occurrences below this are inconclusive");
  aud->add_option("--misclass-samples", o.misclass_samples,
                  "direct samples for the misclassification checks");
  aud->add_option("--bucket-width", o.bucket_width,
                  "emit switch placement counts per stage bucket of this width");

  CLI::App* swp = app.add_subcommand(
      "sweep", "calibrate + audit over an (eps, beta) grid; writes sweep.csv");
  add_common(swp);
  add_overrides(swp);
  add_audit_knobs(swp);
  swp->add_flag("--strict", o.strict,
                "inconclusive checks fail a grid point's all_pass flag");
  swp->add_option("--eps-grid", o.eps_grid, "eps grid values, e.g. 0.1,0.2")
      ->delimiter(',');
  swp->add_option("--beta-grid", o.beta_grid, "beta grid values, e.g. 0.5,1")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const json cfg = load_and_merge(*cmd, o);
    if (cmd == cal) return cmd_calibrate(o);
    if (cmd == sim) return cmd_simulate(o, cfg);
    if (cmd == aud) return cmd_audit(o, cfg);
    return cmd_sweep(o, cfg);
  } catch (const DegenerateDeltaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
