#pragma once

// Exact simulation of the frog model on the complete graph with N + 1
// vertices, reduced to the counts (unvisited, active, dead). The symmetry of
// the complete graph makes the reduced process a Markov chain, so individual
// particle positions are never tracked.

#include <cstdint>
#include <string_view>
#include <vector>

#include "frogsim/occupancy.hpp"
#include "frogsim/random.hpp"

namespace frog {

enum class ModelKind {
  geometric,     // each active particle survives a jump with probability p
  nongeometric,  // an active particle dies on reaching an already visited vertex
};

std::string_view to_string(ModelKind kind);
/// Accepts "geometric"/"geom" and "nongeometric"/"nongeom".
ModelKind parse_model_kind(std::string_view text);

struct ModelParams {
  std::int64_t n = 3;  // graph has n + 1 vertices
  ModelKind kind = ModelKind::geometric;
  double p = 0.5;      // survival probability; ignored by the nongeometric model

  void validate() const;
};

struct ChainState {
  std::int64_t unvisited = 0;
  std::int64_t active = 0;
  std::int64_t dead = 0;
  std::int64_t t = 0;

  bool absorbed() const { return active == 0; }
  friend bool operator==(const ChainState&, const ChainState&) = default;
};

/// Throws std::domain_error unless the counts are nonnegative, sum to n + 1,
/// and unvisited <= n.
void validate_state(const ChainState& state, std::int64_t n);

/// Fractions of the n + 1 vertices.
struct ScaledState {
  double i = 0.0;
  double a = 0.0;
  double d = 0.0;
};

ChainState initial_state(const ModelParams& params);
ScaledState scale(const ChainState& state, std::int64_t n);

struct GeometricStep {
  ChainState next;
  std::int64_t survivors = 0;   // X: particles whose survival coin succeeded
  std::int64_t to_unvisited = 0;  // Z: survivors that picked an unvisited vertex
};

struct NongeometricStep {
  ChainState next;
  std::int64_t to_unvisited = 0;  // Z: particles that reached an unvisited vertex
};

GeometricStep step_geometric(const ChainState& state, const ModelParams& params, Rng& rng,
                             EmptyBoxSampler& boxes);
GeometricStep step_geometric(const ChainState& state, const ModelParams& params, Rng& rng);

NongeometricStep step_nongeometric(const ChainState& state, const ModelParams& params, Rng& rng,
                                   EmptyBoxSampler& boxes);
NongeometricStep step_nongeometric(const ChainState& state, const ModelParams& params, Rng& rng);

/// Dispatches on params.kind and drops the auxiliary draws.
ChainState step(const ChainState& state, const ModelParams& params, Rng& rng,
                EmptyBoxSampler& boxes);

/// Initial state followed by up to t_max steps; stops early on absorption.
std::vector<ChainState> simulate_trajectory(const ModelParams& params, std::int64_t t_max,
                                            Rng& rng);

struct AbsorptionResult {
  ChainState final_state;
  bool absorbed = false;
};

inline std::int64_t default_absorption_cap(std::int64_t n) { return 10 * n; }

/// Steps until no particle is active or `cap` steps have been taken.
AbsorptionResult run_to_absorption(const ModelParams& params, std::int64_t cap, Rng& rng);

/// Closed-form conditional moments of the next state given the current one.
/// `cov_unvisited_aux` is Cov(I', X) for the geometric model and Cov(I', Z)
/// for the nongeometric one.
struct OneStepMoments {
  double mean_unvisited = 0.0;
  double mean_active = 0.0;
  double mean_dead = 0.0;
  double var_unvisited = 0.0;
  double var_active = 0.0;
  double var_dead = 0.0;
  double cov_unvisited_aux = 0.0;
};

OneStepMoments moments_geometric(const ChainState& state, const ModelParams& params);
OneStepMoments moments_nongeometric(const ChainState& state, const ModelParams& params);
OneStepMoments one_step_moments(const ChainState& state, const ModelParams& params);

}  // namespace frog
