#pragma once

// Monte Carlo and numerical experiments that compare the chains with their
// deterministic limits.

#include <cstdint>
#include <string>
#include <vector>

#include "frogsim/chain.hpp"
#include "frogsim/dynamics.hpp"
#include "frogsim/parallel.hpp"
#include "frogsim/report.hpp"

namespace frog {

enum class ExperimentKind { lln, final_fraction, phase, moments, fig1, fig3, peak };

std::string to_string(ExperimentKind kind);
/// Accepts lln, final, phase, moments, fig1, fig3, peak.
ExperimentKind parse_experiment_kind(const std::string& text);

/// Inputs of one experiment. Empty grids fall back to per-kind defaults,
/// see resolve_defaults().
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::lln;
  ModelKind model = ModelKind::nongeometric;
  std::vector<double> p_grid;
  std::vector<std::int64_t> n_list;
  std::int64_t t_max = 20;
  std::int64_t replications = 200;
  std::uint64_t seed = 1;
  std::int64_t cap = 0;  // absorption step cap; 0 means 10 N
  std::int64_t draws = 200'000;        // moments: one-step draws per state
  std::int64_t random_states = 20;     // moments: random states at large N
  std::int64_t large_n = 1000;         // moments: N of the random states
  double alpha_tol = kDefaultAlphaTol;
  std::int64_t max_steps = kDefaultMaxSteps;

  void validate() const;
};

/// Copy of cfg with every empty grid replaced by the kind's default grid.
ExperimentConfig resolve_defaults(const ExperimentConfig& cfg);

struct Stats {
  std::int64_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 when count < 2
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

/// Linear-interpolation quantiles (R type 7).
Stats summarize(const std::vector<double>& values);

/// max over t <= t_max of the max-norm gap between the scaled chain and the
/// deterministic orbit. The chain stays frozen after absorption.
double sup_deviation(const std::vector<ChainState>& path, const std::vector<DetState>& orbit,
                     std::int64_t n);

struct LlnCell {
  std::int64_t n = 0;
  std::vector<double> deviations;  // indexed by replication
  Stats stats;
};

std::vector<LlnCell> lln_experiment(const ExperimentConfig& cfg, const ExecPolicy& exec = {});

struct FinalRecord {
  double unvisited_fraction = 0.0;
  std::int64_t absorption_time = 0;
  bool absorbed = false;
};

/// Unvisited fraction below which a run counts as a major outbreak.
inline constexpr double kOutbreakThreshold = 0.5;

struct FinalCell {
  double p = 0.0;
  std::int64_t n = 0;
  std::vector<FinalRecord> records;  // indexed by replication
  Stats unvisited;
  double mean_visited = 0.0;
  std::int64_t capped = 0;
  std::int64_t outbreaks = 0;
  double mean_visited_given_outbreak = 0.0;  // 0 when there is no outbreak
  double reference = 0.0;     // deterministic final unvisited fraction at this N
  double max_cluster_gap = 0.0;  // max over runs of min(|u - 1|, |u - reference|)
};

std::vector<FinalCell> final_fraction_experiment(const ExperimentConfig& cfg,
                                                 const ExecPolicy& exec = {});

/// Geometric model at N = n_list.front() over the p grid.
std::vector<FinalCell> phase_sweep(const ExperimentConfig& cfg, const ExecPolicy& exec = {});

struct MomentCheck {
  ModelParams params;
  ChainState state;
  std::string component;  // mean_I, mean_A, mean_D, var_I, var_A, var_D, cov_I_aux
  double analytic = 0.0;
  double monte_carlo = 0.0;
  double std_error = 0.0;
  double z = 0.0;
};

/// Every valid state of a graph of size n (unvisited <= n, counts sum to n+1).
std::vector<ChainState> all_states(std::int64_t n);

/// Monte Carlo one-step moments of `state` against the closed forms. Standard
/// errors are s/sqrt(R) for means and leave-one-out jackknife for the
/// variance and covariance components.
std::vector<MomentCheck> audit_state(const ChainState& state, const ModelParams& params,
                                     std::int64_t draws, Rng& rng);

/// Exhaustive states at N = 3 and 4 plus random states at cfg.large_n, for
/// the nongeometric model and the geometric model at each p in the grid.
std::vector<MomentCheck> moment_audit(const ExperimentConfig& cfg, const ExecPolicy& exec = {});

struct CurvePoint {
  double p = 0.0;
  double iota_inf = 0.0;
};
std::vector<CurvePoint> fig1_data(const std::vector<double>& p_grid);

struct Fig3Point {
  std::int64_t n = 0;
  LimitResult limit;
  bool nondecreasing = true;  // relative to the previous grid point
};
std::vector<Fig3Point> fig3_data(const std::vector<std::int64_t>& n_grid,
                                 double alpha_tol = kDefaultAlphaTol,
                                 std::int64_t max_steps = kDefaultMaxSteps);

/// Nongeometric limit constant the fig3 values approach.
inline constexpr double kNongeometricLimit = 0.174545;

struct PeakPoint {
  std::int64_t n = 0;
  PeakResult result;
};
std::vector<PeakPoint> peak_data(const std::vector<std::int64_t>& n_grid,
                                 std::int64_t max_steps = kDefaultMaxSteps);

/// Runs the configured experiment and packages it with config and metadata.
Report run_experiment(const ExperimentConfig& cfg, const ExecPolicy& exec = {});

/// Config echo shared by every report.
KeyValues echo_config(const ExperimentConfig& cfg);

std::string version_string();

}  // namespace frog
