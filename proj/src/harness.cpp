#include "frogsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <type_traits>

#ifndef FROGSIM_VERSION
#define FROGSIM_VERSION "0.0.0"
#endif

namespace frog {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::lln: return "lln";
    case ExperimentKind::final_fraction: return "final";
    case ExperimentKind::phase: return "phase";
    case ExperimentKind::moments: return "moments";
    case ExperimentKind::fig1: return "fig1";
    case ExperimentKind::fig3: return "fig3";
    case ExperimentKind::peak: return "peak";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  for (auto kind : {ExperimentKind::lln, ExperimentKind::final_fraction, ExperimentKind::phase,
                    ExperimentKind::moments, ExperimentKind::fig1, ExperimentKind::fig3,
                    ExperimentKind::peak}) {
    if (to_string(kind) == text) return kind;
  }
  throw std::invalid_argument("unknown experiment kind '" + text + "'");
}

void ExperimentConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (t_max < 0) throw std::invalid_argument("t_max must be nonnegative");
  if (cap < 0) throw std::invalid_argument("cap must be nonnegative");
  if (draws < 3) throw std::invalid_argument("draws must be at least 3");
  if (random_states < 0) throw std::invalid_argument("random_states must be nonnegative");
  if (large_n < 3) throw std::invalid_argument("large_n must be at least 3");
  if (!(alpha_tol > 0.0)) throw std::invalid_argument("alpha_tol must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be positive");
  for (auto n : n_list) {
    if (n < 3) throw std::invalid_argument("every N must be at least 3");
  }
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("every p must lie in [0, 1]");
  }
  if (kind == ExperimentKind::fig1) {
    for (double p : p_grid) {
      if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("fig1 needs p in (0, 1)");
    }
  }
}

namespace {

std::vector<double> linear_grid(double lo, double hi, double step) {
  std::vector<double> grid;
  const auto count = static_cast<std::int64_t>(std::llround((hi - lo) / step));
  for (std::int64_t k = 0; k <= count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  return grid;
}

}  // namespace

ExperimentConfig resolve_defaults(const ExperimentConfig& cfg) {
  ExperimentConfig out = cfg;
  using K = ExperimentKind;
  if (out.p_grid.empty()) {
    switch (out.kind) {
      case K::fig1: out.p_grid = linear_grid(0.01, 0.99, 0.01); break;
      case K::phase: out.p_grid = linear_grid(0.05, 0.95, 0.05); break;
      case K::moments: out.p_grid = {0.3, 0.7}; break;
      default: out.p_grid = {0.6}; break;
    }
  }
  if (out.n_list.empty()) {
    switch (out.kind) {
      case K::lln: out.n_list = {100, 1000, 10000}; break;
      case K::fig3: out.n_list = {100, 1000, 10000, 100000, 1000000}; break;
      case K::peak: out.n_list = {3, 10, 100, 1000, 10000}; break;
      default: out.n_list = {10000}; break;
    }
  }
  return out;
}

Stats summarize(const std::vector<double>& values) {
  Stats s;
  s.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double h = (n - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  s.q05 = quantile(0.05);
  s.q50 = quantile(0.5);
  s.q95 = quantile(0.95);
  return s;
}

double sup_deviation(const std::vector<ChainState>& path, const std::vector<DetState>& orbit,
                     std::int64_t n) {
  if (path.empty()) throw std::invalid_argument("sup_deviation: empty trajectory");
  double worst = 0.0;
  for (std::size_t t = 0; t < orbit.size(); ++t) {
    const ChainState& s = path[std::min(t, path.size() - 1)];
    const ScaledState eta = scale(s, n);
    const DetState& xi = orbit[t];
    worst = std::max({worst, std::fabs(eta.i - xi.iota), std::fabs(eta.a - xi.alpha),
                      std::fabs(eta.d - xi.delta)});
  }
  return worst;
}

namespace {

Dynamics dynamics_for(const ModelParams& params) {
  if (params.kind == ModelKind::geometric) return GeometricDynamics{params.p};
  return NongeometricDynamics{};
}

ModelParams params_for(const ExperimentConfig& cfg, std::int64_t n, double p) {
  ModelParams params{n, cfg.model, p};
  params.validate();
  return params;
}

}  // namespace

std::vector<LlnCell> lln_experiment(const ExperimentConfig& raw, const ExecPolicy& exec) {
  const ExperimentConfig cfg = resolve_defaults(raw);
  cfg.validate();
  std::vector<LlnCell> cells;
  for (auto n : cfg.n_list) {
    const ModelParams params = params_for(cfg, n, cfg.p_grid.front());
    const std::vector<DetState> orbit = det_orbit(n, dynamics_for(params), cfg.t_max);
    LlnCell cell;
    cell.n = n;
    cell.deviations.assign(static_cast<std::size_t>(cfg.replications), 0.0);
    for_each_index(cfg.replications, exec, [&](std::int64_t r) {
      Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(r));
      const auto path = simulate_trajectory(params, cfg.t_max, rng);
      cell.deviations[static_cast<std::size_t>(r)] = sup_deviation(path, orbit, n);
    });
    cell.stats = summarize(cell.deviations);
    cells.push_back(std::move(cell));
  }
  return cells;
}

namespace {

double final_reference(const ModelParams& params) {
  if (params.kind == ModelKind::nongeometric) {
    return iterate_limit(params.n, NongeometricDynamics{}).iota_inf;
  }
  if (params.p <= 0.0) return static_cast<double>(params.n) / static_cast<double>(params.n + 1);
  if (params.p >= 1.0) return 0.0;
  return fixed_point_tauN(params.p, params.n).x;
}

FinalCell final_cell(const ExperimentConfig& cfg, const ModelParams& params,
                     const ExecPolicy& exec) {
  FinalCell cell;
  cell.p = params.p;
  cell.n = params.n;
  cell.records.resize(static_cast<std::size_t>(cfg.replications));
  const std::int64_t cap = cfg.cap > 0 ? cfg.cap : default_absorption_cap(params.n);
  const double total = static_cast<double>(params.n + 1);
  for_each_index(cfg.replications, exec, [&](std::int64_t r) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(r));
    const AbsorptionResult res = run_to_absorption(params, cap, rng);
    cell.records[static_cast<std::size_t>(r)] =
        FinalRecord{static_cast<double>(res.final_state.unvisited) / total, res.final_state.t,
                    res.absorbed};
  });

  cell.reference = final_reference(params);
  std::vector<double> unvisited;
  double visited_sum = 0.0;
  double outbreak_visited_sum = 0.0;
  for (const auto& rec : cell.records) {
    unvisited.push_back(rec.unvisited_fraction);
    visited_sum += 1.0 - rec.unvisited_fraction;
    if (!rec.absorbed) ++cell.capped;
    if (rec.unvisited_fraction < kOutbreakThreshold) {
      ++cell.outbreaks;
      outbreak_visited_sum += 1.0 - rec.unvisited_fraction;
    }
    const double gap = std::min(std::fabs(rec.unvisited_fraction - 1.0),
                                std::fabs(rec.unvisited_fraction - cell.reference));
    cell.max_cluster_gap = std::max(cell.max_cluster_gap, gap);
  }
  cell.unvisited = summarize(unvisited);
  cell.mean_visited = visited_sum / static_cast<double>(cell.records.size());
  if (cell.outbreaks > 0) {
    cell.mean_visited_given_outbreak = outbreak_visited_sum / static_cast<double>(cell.outbreaks);
  }
  return cell;
}

}  // namespace

std::vector<FinalCell> final_fraction_experiment(const ExperimentConfig& raw,
                                                 const ExecPolicy& exec) {
  const ExperimentConfig cfg = resolve_defaults(raw);
  cfg.validate();
  std::vector<FinalCell> cells;
  const std::vector<double> ps =
      cfg.model == ModelKind::geometric ? cfg.p_grid : std::vector<double>{cfg.p_grid.front()};
  for (double p : ps) {
    for (auto n : cfg.n_list) cells.push_back(final_cell(cfg, params_for(cfg, n, p), exec));
  }
  return cells;
}

std::vector<FinalCell> phase_sweep(const ExperimentConfig& raw, const ExecPolicy& exec) {
  ExperimentConfig cfg = resolve_defaults(raw);
  cfg.model = ModelKind::geometric;
  cfg.validate();
  std::vector<FinalCell> cells;
  for (double p : cfg.p_grid) {
    cells.push_back(final_cell(cfg, params_for(cfg, cfg.n_list.front(), p), exec));
  }
  return cells;
}

std::vector<ChainState> all_states(std::int64_t n) {
  std::vector<ChainState> states;
  for (std::int64_t i = 0; i <= n; ++i) {
    for (std::int64_t a = 0; a <= n + 1 - i; ++a) states.push_back(ChainState{i, a, n + 1 - i - a, 0});
  }
  return states;
}

namespace {

double sample_mean(const std::vector<double>& x) {
  long double s = 0.0L;
  for (double v : x) s += v;
  return static_cast<double>(s / static_cast<long double>(x.size()));
}

struct SpreadEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Unbiased sample covariance with its leave-one-out jackknife standard error.
// With x == y this is the sample variance.
SpreadEstimate jackknife_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const long double nn = static_cast<long double>(n);
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  long double sx = 0.0L, sy = 0.0L, sxy = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const long double dx = x[k] - mx;
    const long double dy = y[k] - my;
    sx += dx;
    sy += dy;
    sxy += dx * dy;
  }
  const long double full = (sxy - sx * sy / nn) / (nn - 1.0L);
  std::vector<long double> loo(n);
  long double loo_sum = 0.0L;
  for (std::size_t k = 0; k < n; ++k) {
    const long double dx = x[k] - mx;
    const long double dy = y[k] - my;
    const long double ax = sx - dx;
    const long double ay = sy - dy;
    loo[k] = (sxy - dx * dy - ax * ay / (nn - 1.0L)) / (nn - 2.0L);
    loo_sum += loo[k];
  }
  const long double loo_mean = loo_sum / nn;
  long double spread = 0.0L;
  for (long double v : loo) spread += (v - loo_mean) * (v - loo_mean);
  const long double jk_var = (nn - 1.0L) / nn * spread;
  return SpreadEstimate{static_cast<double>(full), static_cast<double>(std::sqrt(jk_var))};
}

double z_score(double monte_carlo, double analytic, double std_error) {
  const double diff = monte_carlo - analytic;
  if (std_error > 0.0) return diff / std_error;
  // Degenerate component: Monte Carlo must match exactly up to rounding.
  if (std::fabs(diff) <= 1e-9 * std::max(1.0, std::fabs(analytic))) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<MomentCheck> audit_state(const ChainState& state, const ModelParams& params,
                                     std::int64_t draws, Rng& rng) {
  if (draws < 3) throw std::invalid_argument("audit_state: need at least 3 draws");
  const OneStepMoments exact = one_step_moments(state, params);
  const auto count = static_cast<std::size_t>(draws);
  std::vector<double> iv(count), av(count), dv(count), aux(count);
  EmptyBoxSampler boxes;
  for (std::size_t k = 0; k < count; ++k) {
    ChainState next;
    double aux_draw = 0.0;
    if (params.kind == ModelKind::geometric) {
      const GeometricStep s = step_geometric(state, params, rng, boxes);
      next = s.next;
      aux_draw = static_cast<double>(s.survivors);
    } else {
      const NongeometricStep s = step_nongeometric(state, params, rng, boxes);
      next = s.next;
      aux_draw = static_cast<double>(s.to_unvisited);
    }
    iv[k] = static_cast<double>(next.unvisited);
    av[k] = static_cast<double>(next.active);
    dv[k] = static_cast<double>(next.dead);
    aux[k] = aux_draw;
  }

  std::vector<MomentCheck> checks;
  const auto push = [&](const char* name, double analytic, double mc, double se) {
    checks.push_back(MomentCheck{params, state, name, analytic, mc, se, z_score(mc, analytic, se)});
  };
  const double root_n = std::sqrt(static_cast<double>(draws));
  const SpreadEstimate vi = jackknife_covariance(iv, iv);
  const SpreadEstimate va = jackknife_covariance(av, av);
  const SpreadEstimate vd = jackknife_covariance(dv, dv);
  const SpreadEstimate ci = jackknife_covariance(iv, aux);
  push("mean_I", exact.mean_unvisited, sample_mean(iv), std::sqrt(vi.value) / root_n);
  push("mean_A", exact.mean_active, sample_mean(av), std::sqrt(va.value) / root_n);
  push("mean_D", exact.mean_dead, sample_mean(dv), std::sqrt(vd.value) / root_n);
  push("var_I", exact.var_unvisited, vi.value, vi.std_error);
  push("var_A", exact.var_active, va.value, va.std_error);
  push("var_D", exact.var_dead, vd.value, vd.std_error);
  push("cov_I_aux", exact.cov_unvisited_aux, ci.value, ci.std_error);
  return checks;
}

std::vector<MomentCheck> moment_audit(const ExperimentConfig& raw, const ExecPolicy& exec) {
  const ExperimentConfig cfg = resolve_defaults(raw);
  cfg.validate();

  std::vector<ChainState> states;
  for (std::int64_t n : {3, 4}) {
    for (const auto& s : all_states(n)) states.push_back(s);
  }
  const std::size_t small_count = states.size();
  Rng picker = make_stream(cfg.seed, std::numeric_limits<std::uint64_t>::max());
  for (std::int64_t k = 0; k < cfg.random_states; ++k) {
    const std::int64_t n = cfg.large_n;
    const std::int64_t i = std::uniform_int_distribution<std::int64_t>(0, n)(picker);
    const std::int64_t a = std::uniform_int_distribution<std::int64_t>(0, n + 1 - i)(picker);
    states.push_back(ChainState{i, a, n + 1 - i - a, 0});
  }

  struct Job {
    ChainState state;
    ModelParams params;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const std::int64_t n = k < small_count ? states[k].unvisited + states[k].active + states[k].dead - 1
                                           : cfg.large_n;
    jobs.push_back(Job{states[k], ModelParams{n, ModelKind::nongeometric, 0.0}});
    for (double p : cfg.p_grid) jobs.push_back(Job{states[k], ModelParams{n, ModelKind::geometric, p}});
  }

  std::vector<std::vector<MomentCheck>> results(jobs.size());
  for_each_index(static_cast<std::int64_t>(jobs.size()), exec, [&](std::int64_t j) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(j));
    const Job& job = jobs[static_cast<std::size_t>(j)];
    results[static_cast<std::size_t>(j)] = audit_state(job.state, job.params, cfg.draws, rng);
  });
  std::vector<MomentCheck> flat;
  for (auto& block : results) {
    for (auto& check : block) flat.push_back(std::move(check));
  }
  return flat;
}

std::vector<CurvePoint> fig1_data(const std::vector<double>& p_grid) {
  std::vector<CurvePoint> curve;
  for (double p : p_grid) curve.push_back(CurvePoint{p, iota_infinity(p)});
  return curve;
}

std::vector<Fig3Point> fig3_data(const std::vector<std::int64_t>& n_grid, double alpha_tol,
                                 std::int64_t max_steps) {
  std::vector<Fig3Point> points;
  for (auto n : n_grid) {
    Fig3Point pt{n, iterate_limit(n, NongeometricDynamics{}, alpha_tol, max_steps), true};
    if (!points.empty()) pt.nondecreasing = pt.limit.iota_inf >= points.back().limit.iota_inf;
    points.push_back(pt);
  }
  return points;
}

std::vector<PeakPoint> peak_data(const std::vector<std::int64_t>& n_grid, std::int64_t max_steps) {
  std::vector<PeakPoint> points;
  for (auto n : n_grid) points.push_back(PeakPoint{n, alpha_peak_index(n, max_steps)});
  return points;
}

std::string version_string() { return std::string("frogsim ") + FROGSIM_VERSION; }

namespace {

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k != 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_real(values[k]);
    } else {
      out += std::to_string(values[k]);
    }
  }
  return out;
}

void add_stats(std::vector<Cell>& row, const Stats& s) {
  row.insert(row.end(), {Cell{s.mean}, Cell{s.sd}, Cell{s.q05}, Cell{s.q50}, Cell{s.q95}});
}

Table final_table(const std::vector<FinalCell>& cells, ModelKind model, std::uint64_t seed) {
  Table table;
  table.columns = {"model", "p", "N", "R", "seed", "mean_unvisited", "sd_unvisited",
                   "q05_unvisited", "q50_unvisited", "q95_unvisited", "mean_visited",
                   "mean_absorption_time", "capped", "outbreaks", "mean_visited_given_outbreak",
                   "reference_unvisited", "max_cluster_gap"};
  for (const auto& c : cells) {
    double time_sum = 0.0;
    for (const auto& r : c.records) time_sum += static_cast<double>(r.absorption_time);
    std::vector<Cell> row{std::string(to_string(model)), c.p, c.n, c.unvisited.count,
                          std::to_string(seed)};
    add_stats(row, c.unvisited);
    row.insert(row.end(), {Cell{c.mean_visited}, Cell{time_sum / static_cast<double>(c.records.size())},
                           Cell{c.capped}, Cell{c.outbreaks}, Cell{c.mean_visited_given_outbreak},
                           Cell{c.reference}, Cell{c.max_cluster_gap}});
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace

KeyValues echo_config(const ExperimentConfig& cfg) {
  return KeyValues{
      {"kind", to_string(cfg.kind)},
      {"model", std::string(to_string(cfg.model))},
      {"p", join(cfg.p_grid)},
      {"n", join(cfg.n_list)},
      {"tmax", std::to_string(cfg.t_max)},
      {"replications", std::to_string(cfg.replications)},
      {"seed", std::to_string(cfg.seed)},
      {"cap", std::to_string(cfg.cap)},
      {"draws", std::to_string(cfg.draws)},
      {"random_states", std::to_string(cfg.random_states)},
      {"large_n", std::to_string(cfg.large_n)},
      {"alpha_tol", format_real(cfg.alpha_tol)},
      {"max_steps", std::to_string(cfg.max_steps)},
  };
}

Report run_experiment(const ExperimentConfig& raw, const ExecPolicy& exec) {
  const ExperimentConfig cfg = resolve_defaults(raw);
  cfg.validate();
  Report report;
  report.config = echo_config(cfg);
  report.metadata = {{"version", version_string()}, {"seed", std::to_string(cfg.seed)}};
  Table& table = report.table;
  const std::string seed_text = std::to_string(cfg.seed);

  switch (cfg.kind) {
    case ExperimentKind::lln: {
      table.columns = {"model", "p", "N", "R", "seed", "tmax", "mean_sup_dev", "sd_sup_dev",
                       "q05_sup_dev", "q50_sup_dev", "q95_sup_dev"};
      for (const auto& c : lln_experiment(cfg, exec)) {
        std::vector<Cell> row{std::string(to_string(cfg.model)), cfg.p_grid.front(), c.n,
                              c.stats.count, seed_text, cfg.t_max};
        add_stats(row, c.stats);
        table.add_row(std::move(row));
      }
      break;
    }
    case ExperimentKind::final_fraction: {
      const auto cells = final_fraction_experiment(cfg, exec);
      table = final_table(cells, cfg.model, cfg.seed);
      std::int64_t capped = 0;
      for (const auto& c : cells) capped += c.capped;
      report.metadata.emplace_back("capped_replications", std::to_string(capped));
      break;
    }
    case ExperimentKind::phase: {
      const auto cells = phase_sweep(cfg, exec);
      table = final_table(cells, ModelKind::geometric, cfg.seed);
      std::int64_t capped = 0;
      for (const auto& c : cells) capped += c.capped;
      report.metadata.emplace_back("capped_replications", std::to_string(capped));
      break;
    }
    case ExperimentKind::moments: {
      table.columns = {"model", "p", "N", "I", "A", "D", "component", "analytic",
                       "monte_carlo", "std_error", "z", "draws"};
      double worst = 0.0;
      for (const auto& m : moment_audit(cfg, exec)) {
        worst = std::max(worst, std::fabs(m.z));
        table.add_row({std::string(to_string(m.params.kind)), m.params.p, m.params.n,
                       m.state.unvisited, m.state.active, m.state.dead, m.component, m.analytic,
                       m.monte_carlo, m.std_error, m.z, cfg.draws});
      }
      report.metadata.emplace_back("max_abs_z", format_real(worst));
      break;
    }
    case ExperimentKind::fig1: {
      table.columns = {"p", "iota_inf"};
      for (const auto& pt : fig1_data(cfg.p_grid)) table.add_row({pt.p, pt.iota_inf});
      break;
    }
    case ExperimentKind::fig3: {
      table.columns = {"N", "iota_inf", "delta_inf", "steps", "converged", "nondecreasing"};
      const auto points = fig3_data(cfg.n_list, cfg.alpha_tol, cfg.max_steps);
      bool monotone = true;
      std::int64_t unconverged = 0;
      for (const auto& pt : points) {
        monotone = monotone && pt.nondecreasing;
        if (!pt.limit.converged) ++unconverged;
        table.add_row({pt.n, pt.limit.iota_inf, pt.limit.delta_inf, pt.limit.steps_used,
                       pt.limit.converged, pt.nondecreasing});
      }
      report.metadata.emplace_back("nondecreasing", monotone ? "true" : "false");
      report.metadata.emplace_back("unconverged", std::to_string(unconverged));
      if (!points.empty()) {
        report.metadata.emplace_back(
            "gap_to_limit_constant",
            format_real(std::fabs(points.back().limit.iota_inf - kNongeometricLimit)));
      }
      break;
    }
    case ExperimentKind::peak: {
      table.columns = {"N", "M", "pattern_ok", "determined"};
      for (const auto& pt : peak_data(cfg.n_list, cfg.max_steps)) {
        table.add_row({pt.n, pt.result.peak, pt.result.pattern_ok, pt.result.determined});
      }
      break;
    }
  }
  return report;
}

}  // namespace frog
