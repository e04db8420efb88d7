#include "frogsim/chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frog {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::geometric ? "geometric" : "nongeometric";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "geometric" || text == "geom") return ModelKind::geometric;
  if (text == "nongeometric" || text == "nongeom") return ModelKind::nongeometric;
  throw std::invalid_argument("unknown model kind '" + std::string(text) + "'");
}

void ModelParams::validate() const {
  if (n < 3) throw std::domain_error("model: graph size N must be at least 3");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("model: p must lie in [0, 1]");
}

void validate_state(const ChainState& s, std::int64_t n) {
  if (s.unvisited < 0 || s.active < 0 || s.dead < 0) {
    throw std::domain_error("chain state has a negative count");
  }
  if (s.unvisited > n) throw std::domain_error("chain state has more than N unvisited vertices");
  if (s.unvisited + s.active + s.dead != n + 1) {
    throw std::domain_error("chain state counts do not sum to N + 1");
  }
}

ChainState initial_state(const ModelParams& params) {
  params.validate();
  return ChainState{params.n, 1, 0, 0};
}

ScaledState scale(const ChainState& state, std::int64_t n) {
  validate_state(state, n);
  const double total = static_cast<double>(n + 1);
  return ScaledState{static_cast<double>(state.unvisited) / total,
                     static_cast<double>(state.active) / total,
                     static_cast<double>(state.dead) / total};
}

namespace {

void check_step_inputs(const ChainState& state, const ModelParams& params, ModelKind expected) {
  params.validate();
  if (params.kind != expected) {
    throw std::domain_error("step called with parameters of the other model");
  }
  validate_state(state, params.n);
}

// EmpBox(z, unvisited), with the zero-ball case resolved without a draw.
std::int64_t next_unvisited(std::int64_t z, std::int64_t unvisited, Rng& rng,
                            EmptyBoxSampler& boxes) {
  if (z == 0) return unvisited;
  if (unvisited == 0) {
    // Z ~ Binomial(., I/N) is identically zero when I = 0.
    throw std::logic_error("particles reached unvisited vertices but none remain");
  }
  return boxes(OccupancySpec{z, unvisited}, rng);
}

ChainState close_state(const ChainState& s, std::int64_t n, std::int64_t unvisited,
                       std::int64_t carried) {
  ChainState next;
  next.unvisited = unvisited;
  next.active = carried + s.unvisited - unvisited;
  next.dead = n + 1 - next.unvisited - next.active;
  next.t = s.t + 1;
  return next;
}

double one_minus_pow(double frac, std::int64_t exponent) {
  // (1 - frac)^exponent
  if (exponent == 0) return 1.0;
  return std::exp(static_cast<double>(exponent) * std::log1p(-frac));
}

}  // namespace

GeometricStep step_geometric(const ChainState& state, const ModelParams& params, Rng& rng,
                             EmptyBoxSampler& boxes) {
  check_step_inputs(state, params, ModelKind::geometric);
  GeometricStep out;
  if (state.absorbed()) {
    out.next = state;
    ++out.next.t;
    return out;
  }
  const double reach = static_cast<double>(state.unvisited) / static_cast<double>(params.n);
  out.survivors = sample_binomial(state.active, params.p, rng);
  out.to_unvisited = sample_binomial(out.survivors, reach, rng);
  const std::int64_t unvisited = next_unvisited(out.to_unvisited, state.unvisited, rng, boxes);
  out.next = close_state(state, params.n, unvisited, out.survivors);
  return out;
}

GeometricStep step_geometric(const ChainState& state, const ModelParams& params, Rng& rng) {
  EmptyBoxSampler boxes;
  return step_geometric(state, params, rng, boxes);
}

NongeometricStep step_nongeometric(const ChainState& state, const ModelParams& params, Rng& rng,
                                   EmptyBoxSampler& boxes) {
  check_step_inputs(state, params, ModelKind::nongeometric);
  NongeometricStep out;
  if (state.absorbed()) {
    out.next = state;
    ++out.next.t;
    return out;
  }
  const double reach = static_cast<double>(state.unvisited) / static_cast<double>(params.n);
  out.to_unvisited = sample_binomial(state.active, reach, rng);
  const std::int64_t unvisited = next_unvisited(out.to_unvisited, state.unvisited, rng, boxes);
  out.next = close_state(state, params.n, unvisited, out.to_unvisited);
  return out;
}

NongeometricStep step_nongeometric(const ChainState& state, const ModelParams& params, Rng& rng) {
  EmptyBoxSampler boxes;
  return step_nongeometric(state, params, rng, boxes);
}

ChainState step(const ChainState& state, const ModelParams& params, Rng& rng,
                EmptyBoxSampler& boxes) {
  if (params.kind == ModelKind::geometric) {
    return step_geometric(state, params, rng, boxes).next;
  }
  return step_nongeometric(state, params, rng, boxes).next;
}

std::vector<ChainState> simulate_trajectory(const ModelParams& params, std::int64_t t_max,
                                            Rng& rng) {
  if (t_max < 0) throw std::domain_error("simulate_trajectory: t_max must be nonnegative");
  std::vector<ChainState> path{initial_state(params)};
  EmptyBoxSampler boxes;
  while (path.back().t < t_max && !path.back().absorbed()) {
    path.push_back(step(path.back(), params, rng, boxes));
  }
  return path;
}

AbsorptionResult run_to_absorption(const ModelParams& params, std::int64_t cap, Rng& rng) {
  if (cap < 1) throw std::domain_error("run_to_absorption: cap must be at least 1");
  ChainState state = initial_state(params);
  EmptyBoxSampler boxes;
  while (!state.absorbed() && state.t < cap) {
    state = step(state, params, rng, boxes);
  }
  return AbsorptionResult{state, state.absorbed()};
}

OneStepMoments moments_geometric(const ChainState& state, const ModelParams& params) {
  params.validate();
  validate_state(state, params.n);
  const double n = static_cast<double>(params.n);
  const double p = params.p;
  const double i = static_cast<double>(state.unvisited);
  const double a = static_cast<double>(state.active);
  const double d = static_cast<double>(state.dead);
  const double r1 = one_minus_pow(p / n, state.active);
  const double r2 = one_minus_pow(2.0 * p / n, state.active);

  OneStepMoments m;
  m.mean_unvisited = i * r1;
  m.mean_active = p * a + i * (1.0 - r1);
  m.mean_dead = d + (1.0 - p) * a;
  m.var_unvisited = std::max(i * ((i - 1.0) * r2 - i * r1 * r1 + r1), 0.0);
  m.var_dead = a * p * (1.0 - p);
  m.cov_unvisited_aux = -p * a * i * r1 * (1.0 - p) / (n - p);
  m.var_active = m.var_unvisited + m.var_dead - 2.0 * m.cov_unvisited_aux;
  return m;
}

OneStepMoments moments_nongeometric(const ChainState& state, const ModelParams& params) {
  params.validate();
  validate_state(state, params.n);
  const double n = static_cast<double>(params.n);
  const double i = static_cast<double>(state.unvisited);
  const double a = static_cast<double>(state.active);
  const double d = static_cast<double>(state.dead);
  const double s1 = one_minus_pow(1.0 / n, state.active);
  const double s2 = one_minus_pow(2.0 / n, state.active);
  const double reach = i / n;

  OneStepMoments m;
  m.mean_unvisited = i * s1;
  m.mean_active = i * (a / n + 1.0 - s1);
  m.mean_dead = d + (1.0 - reach) * a;
  m.var_unvisited = std::max(i * ((i - 1.0) * s2 - i * s1 * s1 + s1), 0.0);
  m.var_dead = a * reach * (1.0 - reach);
  m.cov_unvisited_aux = (a * i / n) * s1 * (i - n) / (n - 1.0);
  m.var_active = m.var_unvisited + m.var_dead - 2.0 * m.cov_unvisited_aux;
  return m;
}

OneStepMoments one_step_moments(const ChainState& state, const ModelParams& params) {
  return params.kind == ModelKind::geometric ? moments_geometric(state, params)
                                             : moments_nongeometric(state, params);
}

}  // namespace frog
