#include "frogsim/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace frog {

DetState det_initial(std::int64_t n) {
  if (n < 3) throw std::domain_error("det_initial: graph size N must be at least 3");
  const double total = static_cast<double>(n) + 1.0;
  return DetState{static_cast<double>(n) / total, 1.0 / total, 0.0, 0};
}

DetState det_step_geometric(const DetState& s, double p) {
  const double decay = std::exp(-p * s.alpha);
  return DetState{s.iota * decay, p * s.alpha - s.iota * std::expm1(-p * s.alpha),
                  s.delta + (1.0 - p) * s.alpha, s.t + 1};
}

DetState det_step_nongeometric(const DetState& s) {
  return DetState{s.iota * std::exp(-s.alpha), s.iota * (s.alpha - std::expm1(-s.alpha)),
                  s.delta + s.alpha * (1.0 - s.iota), s.t + 1};
}

DetState det_step(const DetState& s, const Dynamics& dyn) {
  if (const auto* g = std::get_if<GeometricDynamics>(&dyn)) return det_step_geometric(s, g->p);
  return det_step_nongeometric(s);
}

std::vector<DetState> det_orbit(std::int64_t n, const Dynamics& dyn, std::int64_t t_max) {
  if (t_max < 0) throw std::domain_error("det_orbit: t_max must be nonnegative");
  std::vector<DetState> orbit;
  orbit.reserve(static_cast<std::size_t>(t_max) + 1);
  orbit.push_back(det_initial(n));
  for (std::int64_t t = 0; t < t_max; ++t) orbit.push_back(det_step(orbit.back(), dyn));
  return orbit;
}

LimitResult iterate_limit(std::int64_t n, const Dynamics& dyn, double alpha_tol,
                          std::int64_t max_steps) {
  if (!(alpha_tol > 0.0)) throw std::domain_error("iterate_limit: alpha_tol must be positive");
  DetState s = det_initial(n);
  while (s.alpha >= alpha_tol && s.t < max_steps) s = det_step(s, dyn);
  return LimitResult{s.iota, s.delta, s.t, s.alpha < alpha_tol};
}

double phi(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("phi: p must lie in (0, 1)");
  return p / (1.0 - p);
}

double lambert_w0(double x) {
  constexpr double kInvE = 1.0 / std::numbers::e;
  if (std::isnan(x)) throw std::domain_error("lambert_w0: NaN argument");
  if (x < -kInvE) {
    // -phi e^{-phi} at phi = 1 may round a few ulps below -1/e.
    if (x < -kInvE - 8.0 * std::numeric_limits<double>::epsilon()) {
      throw std::domain_error("lambert_w0: argument below -1/e");
    }
    return -1.0;
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return x;

  double w = 0.0;
  if (x < -0.32) {
    // Branch-point series in q = sqrt(2(ex + 1)).
    const double q = std::sqrt(2.0 * std::fma(std::numbers::e, x, 1.0));
    w = -1.0 + q - q * q / 3.0 + 11.0 / 72.0 * q * q * q;
  } else if (x < 3.0) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 100; ++it) {
    if (w <= -1.0) return -1.0;
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::fabs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::fabs(w))) {
      break;
    }
  }
  return w;
}

double iota_infinity(double p) {
  const double f = phi(p);
  if (p <= 0.5) return 1.0;
  return -lambert_w0(-f * std::exp(-f)) / f;
}

FixedPoint fixed_point_tauN(double p, std::int64_t n, double tol, std::int64_t max_iterations) {
  if (n < 3) throw std::domain_error("fixed_point_tauN: graph size N must be at least 3");
  const double f = phi(p);
  const double lead = static_cast<double>(n) / (static_cast<double>(n) + 1.0);
  const auto tau = [&](double x) { return lead * std::exp(-f * (1.0 - x)); };

  double x = 0.0;
  std::int64_t it = 0;
  while (it < max_iterations) {
    const double x1 = tau(x);
    ++it;
    if (std::fabs(x1 - x) <= tol) return FixedPoint{x1, it, true};
    const double x2 = tau(x1);
    ++it;
    if (std::fabs(x2 - x1) <= tol) return FixedPoint{x2, it, true};
    // tau is increasing and convex with a single crossing in [0, 1], so an
    // extrapolated point on either side of the root is safe to iterate from.
    const double denom = x2 - 2.0 * x1 + x;
    if (denom != 0.0) {
      const double xa = x - (x1 - x) * (x1 - x) / denom;
      if (xa >= 0.0 && xa < 1.0) {
        ++it;
        if (std::fabs(tau(xa) - xa) < std::fabs(x2 - x1)) {
          x = xa;
          continue;
        }
      }
    }
    x = x2;
  }
  return FixedPoint{x, it, false};
}

std::vector<double> fixed_points_tau(double p) {
  phi(p);  // domain check
  if (p <= 0.5) return {1.0};
  return {iota_infinity(p), 1.0};
}

PeakResult alpha_peak_index(std::int64_t n, std::int64_t max_steps) {
  constexpr double kFloor = 1e-12;
  constexpr double kTie = 1e-15;
  std::vector<double> alpha;
  DetState s = det_initial(n);
  alpha.push_back(s.alpha);
  while (s.alpha >= kFloor && s.t < max_steps) {
    s = det_step_nongeometric(s);
    alpha.push_back(s.alpha);
  }

  PeakResult out;
  out.determined = s.alpha < kFloor;
  const std::size_t last = alpha.size() - 1;
  std::size_t m = 0;
  while (m < last && alpha[m + 1] > alpha[m] + kTie) ++m;
  // A near-tie at the top places the peak at the later index.
  if (m < last && std::fabs(alpha[m + 1] - alpha[m]) <= kTie) ++m;
  out.peak = static_cast<std::int64_t>(m);

  bool falling = m < last;
  for (std::size_t t = m; t < last && falling; ++t) falling = alpha[t + 1] < alpha[t];
  out.pattern_ok = out.determined && falling;
  return out;
}

}  // namespace frog
