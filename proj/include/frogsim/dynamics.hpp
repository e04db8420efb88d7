#pragma once

// Deterministic limits of the scaled frog-model chains and the final-size
// quantities derived from them.

#include <cstdint>
#include <variant>
#include <vector>

namespace frog {

/// (iota, alpha, delta): unvisited, active and dead fractions.
struct DetState {
  double iota = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  std::int64_t t = 0;
};

/// Geometric-lifetime system with survival probability p.
struct GeometricDynamics {
  double p = 0.5;
};
/// Nongeometric-lifetime (mean-field) system.
struct NongeometricDynamics {};

using Dynamics = std::variant<GeometricDynamics, NongeometricDynamics>;

DetState det_initial(std::int64_t n);

/// iota' = iota e^{-p alpha}, alpha' = p alpha + iota (1 - e^{-p alpha}),
/// delta' = delta + (1 - p) alpha.
DetState det_step_geometric(const DetState& s, double p);

/// iota' = iota e^{-alpha}, alpha' = iota (alpha + 1 - e^{-alpha}),
/// delta' = delta + alpha (1 - iota).
DetState det_step_nongeometric(const DetState& s);

DetState det_step(const DetState& s, const Dynamics& dyn);

/// Orbit from det_initial(n), t_max + 1 states.
std::vector<DetState> det_orbit(std::int64_t n, const Dynamics& dyn, std::int64_t t_max);

struct LimitResult {
  double iota_inf = 0.0;
  double delta_inf = 0.0;
  std::int64_t steps_used = 0;
  bool converged = false;
};

inline constexpr double kDefaultAlphaTol = 1e-12;
inline constexpr std::int64_t kDefaultMaxSteps = 10'000'000;

/// Iterates from det_initial(n) until alpha < alpha_tol or max_steps.
LimitResult iterate_limit(std::int64_t n, const Dynamics& dyn, double alpha_tol = kDefaultAlphaTol,
                          std::int64_t max_steps = kDefaultMaxSteps);

/// p / (1 - p) on (0, 1).
double phi(double p);

/// Principal branch of the Lambert W function on [-1/e, inf).
double lambert_w0(double x);

/// Limit over N of the final unvisited fraction of the geometric system:
/// 1 for p <= 1/2, -W0(-phi e^{-phi}) / phi above.
double iota_infinity(double p);

struct FixedPoint {
  double x = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

/// Least fixed point of x -> (N/(N+1)) exp(-phi(p)(1 - x)) on [0, 1], found
/// by monotone iteration from 0 with guarded Aitken extrapolation. It is the
/// limit of iota_t for the geometric system at graph size N.
FixedPoint fixed_point_tauN(double p, std::int64_t n, double tol = 1e-13,
                            std::int64_t max_iterations = 1'000'000);

/// Fixed points of x -> exp(-phi(p)(1 - x)) in [0, 1], increasing order.
std::vector<double> fixed_points_tau(double p);

struct PeakResult {
  std::int64_t peak = 0;     // M
  bool pattern_ok = false;   // strict rise to M, strict fall afterwards
  bool determined = false;   // alpha dropped below the threshold within max_steps
};

/// Checks the rise-then-fall shape of alpha_t for the nongeometric system.
PeakResult alpha_peak_index(std::int64_t n, std::int64_t max_steps = kDefaultMaxSteps);

}  // namespace frog
