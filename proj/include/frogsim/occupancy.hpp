#pragma once

// Empty-boxes (classical occupancy) law and the binomial draws that feed it.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "frogsim/random.hpp"

namespace frog {

/// Thrown when an exact pmf is requested past the configured box cap.
class PmfUnavailable : public std::domain_error {
 public:
  explicit PmfUnavailable(const std::string& what) : std::domain_error(what) {}
};

/// b balls thrown independently and uniformly into c boxes.
struct OccupancySpec {
  std::int64_t balls = 0;
  std::int64_t boxes = 1;

  /// Throws std::domain_error unless balls >= 0 and boxes >= 1.
  void validate() const;
};

inline constexpr std::int64_t kDefaultPmfBoxCap = 64;

/// P(X = x) for x = 0..c, where X counts empty boxes.
///
/// Evaluates the alternating inclusion-exclusion sum with log-gamma
/// magnitudes and compensated signed accumulation in extended precision.
/// When the largest term is big enough that cancellation would cost more
/// than ~1e-15 absolute accuracy, the same law is instead obtained from the
/// ball-by-ball occupancy recursion.
std::vector<double> empbox_pmf(const OccupancySpec& spec,
                               std::int64_t box_cap = kDefaultPmfBoxCap);

/// c((c-1)/c)^b.
double empbox_mean(const OccupancySpec& spec);

/// c(c-1)((c-2)/c)^b + c((c-1)/c)^b - c^2((c-1)/c)^{2b}, clamped at zero.
double empbox_variance(const OccupancySpec& spec);

/// Draws from EmpBox(b, c) by direct simulation. Owns a stamp array that is
/// reused across draws, so one draw costs O(b) after the array has grown to c.
class EmptyBoxSampler {
 public:
  std::int64_t operator()(const OccupancySpec& spec, Rng& rng);

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

/// One-shot convenience wrapper around EmptyBoxSampler.
std::int64_t sample_empbox(const OccupancySpec& spec, Rng& rng);

/// Exact Binomial(n, q) draw. Sequential inversion when the smaller tail
/// mean is below a threshold, std::binomial_distribution otherwise.
std::int64_t sample_binomial(std::int64_t n, double q, Rng& rng);

}  // namespace frog
