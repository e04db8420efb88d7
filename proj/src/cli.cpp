#include "frogsim/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "frogsim/chain.hpp"
#include "frogsim/config.hpp"
#include "frogsim/dynamics.hpp"
#include "frogsim/harness.hpp"
#include "frogsim/report.hpp"

namespace frog {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FROGSIM_SEED"); env != nullptr && *env != '\0') {
    try {
      return parse_seed(env);
    } catch (const std::invalid_argument&) {
      throw UsageError(std::string("FROGSIM_SEED is not a valid seed: ") + env);
    }
  }
  return 1;
}

void emit(const Report& report, const CommonOptions& opts, std::ostream& out) {
  const OutputFormat format = parse_output_format(opts.format);
  if (opts.out.empty()) {
    write_report(out, report, format);
    return;
  }
  std::ofstream file(opts.out, std::ios::binary);
  if (!file) throw IoError("cannot open '" + opts.out + "' for writing");
  write_report(file, report, format);
  file.flush();
  if (!file) throw IoError("failed writing '" + opts.out + "'");
}

ModelParams model_params(const std::string& model, std::int64_t n, const std::optional<double>& p) {
  ModelParams params;
  params.kind = parse_model_kind(model);
  params.n = n;
  if (params.kind == ModelKind::geometric) {
    if (!p) throw UsageError("--p is required for the geometric model");
    params.p = *p;
  } else {
    params.p = p.value_or(0.0);
  }
  try {
    params.validate();
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
  return params;
}

std::string p_text(const ModelParams& params) {
  return params.kind == ModelKind::geometric ? format_real(params.p) : "";
}

int cmd_simulate(const std::string& model, std::int64_t n, const std::optional<double>& p,
                 std::int64_t t_max, const CommonOptions& opts, std::ostream& out) {
  const ModelParams params = model_params(model, n, p);
  if (t_max < 0) throw UsageError("--tmax must be nonnegative");
  const std::uint64_t seed = resolve_seed(opts.seed);
  Rng rng = make_stream(seed, 0);
  const auto path = simulate_trajectory(params, t_max, rng);

  Report report;
  report.config = {{"command", "simulate"}, {"model", std::string(to_string(params.kind))},
                   {"n", std::to_string(n)}, {"p", p_text(params)},
                   {"tmax", std::to_string(t_max)}, {"seed", std::to_string(seed)}};
  report.table.columns = {"t", "I", "A", "D"};
  for (const auto& s : path) report.table.add_row({s.t, s.unvisited, s.active, s.dead});
  report.metadata = {{"version", version_string()},
                     {"seed", std::to_string(seed)},
                     {"absorbed", path.back().absorbed() ? "true" : "false"}};
  emit(report, opts, out);
  return kExitOk;
}

int cmd_det(const std::string& model, std::int64_t n, const std::optional<double>& p,
            std::int64_t t_max, const std::optional<double>& until_alpha, std::int64_t max_steps,
            const CommonOptions& opts, std::ostream& out) {
  const ModelParams params = model_params(model, n, p);
  const Dynamics dyn = params.kind == ModelKind::geometric ? Dynamics{GeometricDynamics{params.p}}
                                                           : Dynamics{NongeometricDynamics{}};
  if (t_max < 0) throw UsageError("--tmax must be nonnegative");
  if (until_alpha && !(*until_alpha > 0.0)) throw UsageError("--until-alpha must be positive");
  if (max_steps < 1) throw UsageError("--max-steps must be positive");

  Report report;
  report.config = {{"command", "det"}, {"model", std::string(to_string(params.kind))},
                   {"n", std::to_string(n)}, {"p", p_text(params)}};
  report.table.columns = {"t", "iota", "alpha", "delta"};
  report.metadata = {{"version", version_string()}};

  std::vector<DetState> orbit;
  std::optional<LimitResult> limit;
  if (until_alpha) {
    report.config.emplace_back("until_alpha", format_real(*until_alpha));
    report.config.emplace_back("max_steps", std::to_string(max_steps));
    DetState s = det_initial(n);
    orbit.push_back(s);
    while (s.alpha >= *until_alpha && s.t < max_steps) {
      s = det_step(s, dyn);
      orbit.push_back(s);
    }
    limit = LimitResult{s.iota, s.delta, s.t, s.alpha < *until_alpha};
    report.metadata.emplace_back("iota_inf", format_real(limit->iota_inf));
    report.metadata.emplace_back("delta_inf", format_real(limit->delta_inf));
    report.metadata.emplace_back("steps_used", std::to_string(limit->steps_used));
    report.metadata.emplace_back("converged", limit->converged ? "true" : "false");
  } else {
    report.config.emplace_back("tmax", std::to_string(t_max));
    orbit = det_orbit(n, dyn, t_max);
  }
  for (const auto& s : orbit) report.table.add_row({s.t, s.iota, s.alpha, s.delta});

  if (!limit) {
    emit(report, opts, out);
    return kExitOk;
  }
  // With --until-alpha the orbit is written only to --out; stdout gets the limit.
  if (!opts.out.empty()) emit(report, opts, out);
  out << "iota_inf=" << format_real(limit->iota_inf) << '\n'
      << "delta_inf=" << format_real(limit->delta_inf) << '\n'
      << "steps_used=" << limit->steps_used << '\n'
      << "converged=" << (limit->converged ? "true" : "false") << '\n';
  return kExitOk;
}

int cmd_limits(double p, const std::optional<std::int64_t>& n, bool closed_form, std::ostream& out) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("--p must lie in (0, 1)");
  if (n && *n < 3) throw UsageError("--n must be at least 3");
  out << "p=" << format_real(p) << '\n';
  if (n) {
    const FixedPoint fp = fixed_point_tauN(p, *n);
    out << "iota_inf_N=" << format_real(fp.x) << '\n'
        << "fixed_point_converged=" << (fp.converged ? "true" : "false") << '\n';
  }
  if (closed_form || !n) {
    out << "iota_inf=" << format_real(iota_infinity(p)) << '\n';
    std::string points;
    for (double x : fixed_points_tau(p)) {
      if (!points.empty()) points += ',';
      points += format_real(x);
    }
    out << "fixed_points_tau=" << points << '\n';
  }
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const KeyValues& flags, bool serial, int jobs,
                   bool quiet, const CommonOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  bool has_kind = false;
  try {
    // Precedence: flag, then config file, then FROGSIM_SEED, then 1.
    cfg.seed = resolve_seed(std::nullopt);
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw IoError("cannot open config file '" + config_path + "'");
      for (const auto& [key, value] : parse_key_values(file)) {
        apply_setting(cfg, key, value);
        has_kind = has_kind || key == "kind";
      }
    }
    for (const auto& [key, value] : flags) {
      apply_setting(cfg, key, value);
      has_kind = has_kind || key == "kind";
    }
    if (!has_kind) throw UsageError("experiment needs --kind (or kind= in --config)");
    cfg = resolve_defaults(cfg);
    cfg.validate();
  } catch (const IoError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto start = std::chrono::steady_clock::now();
  ExecPolicy exec;
  exec.parallel = !serial;
  exec.jobs = jobs;
  const Report report = run_experiment(cfg, exec);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
  emit(report, opts, out);
  if (!quiet) err << "experiment " << to_string(cfg.kind) << " finished in " << elapsed.count() << " s\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frog-model simulator on the complete graph", "frogsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  const auto add_common = [](CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--out", opts.out, "Output file (default: standard output)");
    cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  // simulate
  CommonOptions sim_opts;
  std::string sim_model;
  std::int64_t sim_n = 0;
  std::optional<double> sim_p;
  std::int64_t sim_tmax = 0;
  auto* sim = app.add_subcommand("simulate", "Simulate one trajectory of the chain");
  sim->add_option("--model", sim_model, "geom | nongeom")->required()->check(
      CLI::IsMember({"geom", "nongeom", "geometric", "nongeometric"}));
  sim->add_option("--n", sim_n, "Graph size N (N + 1 vertices)")->required();
  sim->add_option("--p", sim_p, "Survival probability (geometric model)");
  sim->add_option("--tmax", sim_tmax, "Number of steps")->required();
  sim->add_option("--seed", sim_opts.seed, "Master seed (default: $FROGSIM_SEED, else 1)");
  add_common(sim, sim_opts);

  // det
  CommonOptions det_opts;
  std::string det_model;
  std::int64_t det_n = 0;
  std::optional<double> det_p;
  std::int64_t det_tmax = 0;
  std::optional<double> det_until;
  std::int64_t det_max_steps = kDefaultMaxSteps;
  auto* det = app.add_subcommand("det", "Iterate the deterministic limit system");
  det->add_option("--model", det_model, "geom | nongeom")->required()->check(
      CLI::IsMember({"geom", "nongeom", "geometric", "nongeometric"}));
  det->add_option("--n", det_n, "Graph size N")->required();
  det->add_option("--p", det_p, "Survival probability (geometric model)");
  auto* tmax_opt = det->add_option("--tmax", det_tmax, "Number of steps");
  auto* until_opt = det->add_option("--until-alpha", det_until, "Iterate until alpha < TOL");
  tmax_opt->excludes(until_opt);
  det->add_option("--max-steps", det_max_steps, "Step limit for --until-alpha");
  add_common(det, det_opts);

  // limits
  double lim_p = 0.0;
  std::optional<std::int64_t> lim_n;
  bool lim_closed = false;
  auto* lim = app.add_subcommand("limits", "Final-size limits of the geometric model");
  lim->add_option("--p", lim_p, "Survival probability in (0, 1)")->required();
  lim->add_option("--n", lim_n, "Graph size N for the finite-N fixed point");
  lim->add_flag("--closed-form", lim_closed, "Print the N -> infinity closed form");

  // experiment
  CommonOptions exp_opts;
  std::string exp_config;
  bool exp_serial = false;
  bool exp_quiet = false;
  int exp_jobs = 0;
  std::map<std::string, std::string> exp_values;
  auto* exp = app.add_subcommand("experiment", "Run a harness experiment");
  exp->add_option("--config", exp_config, "key=value file; flags override it");
  const std::vector<std::pair<std::string, std::string>> exp_keys = {
      {"kind", "lln | final | phase | moments | fig1 | fig3 | peak"},
      {"model", "geom | nongeom"},
      {"p", "p value or comma-separated grid"},
      {"n", "N value or comma-separated grid"},
      {"tmax", "Steps compared in lln"},
      {"replications", "Replications per cell"},
      {"seed", "Master seed (default: $FROGSIM_SEED, else 1)"},
      {"cap", "Absorption step cap (0 = 10 N)"},
      {"draws", "moments: draws per state"},
      {"random_states", "moments: random states at large N"},
      {"large_n", "moments: N of the random states"},
      {"alpha_tol", "fig3: alpha tolerance"},
      {"max_steps", "fig3/peak: step limit"},
  };
  std::vector<std::pair<std::string, CLI::Option*>> exp_opts_list;
  for (const auto& [key, help] : exp_keys) {
    std::string flag = "--" + key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    exp_opts_list.emplace_back(key, exp->add_option(flag, exp_values[key], help));
  }
  exp->add_flag("--serial", exp_serial, "Run replications on one thread without OpenMP");
  exp->add_flag("-q,--quiet", exp_quiet, "No progress or timing on the diagnostic stream");
  exp->add_option("--jobs", exp_jobs, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
  add_common(exp, exp_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << version_string() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "frogsim: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_model, sim_n, sim_p, sim_tmax, sim_opts, out);
    if (det->parsed()) {
      return cmd_det(det_model, det_n, det_p, det_tmax, det_until, det_max_steps, det_opts, out);
    }
    if (lim->parsed()) return cmd_limits(lim_p, lim_n, lim_closed, out);
    KeyValues flags;
    for (const auto& [key, opt] : exp_opts_list) {
      if (opt->count() > 0) flags.emplace_back(key, exp_values[key]);
    }
    return cmd_experiment(exp_config, flags, exp_serial, exp_jobs, exp_quiet, exp_opts, out, err);
  } catch (const UsageError& e) {
    err << "frogsim: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const IoError& e) {
    err << "frogsim: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "frogsim: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace frog
