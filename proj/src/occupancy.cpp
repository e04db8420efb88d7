#include "frogsim/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace frog {

namespace {

// ((c - k) / c)^b for 0 <= k <= c, b >= 0.
double ratio_pow(std::int64_t k, std::int64_t c, std::int64_t b) {
  if (b == 0) return 1.0;
  if (k >= c) return 0.0;
  return std::exp(static_cast<double>(b) * std::log1p(-static_cast<double>(k) / c));
}

// Neumaier-compensated sum over signed long double terms.
class CompensatedSum {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// log of c! / (x! i! (c - x - i)!) * ((c - x - i) / c)^b; requires x + i < c.
long double log_ie_term(std::int64_t b, std::int64_t c, std::int64_t x, std::int64_t i) {
  const auto lc = std::lgamma(static_cast<long double>(c) + 1);
  const auto lx = std::lgamma(static_cast<long double>(x) + 1);
  const auto li = std::lgamma(static_cast<long double>(i) + 1);
  const auto lr = std::lgamma(static_cast<long double>(c - x - i) + 1);
  const long double frac = static_cast<long double>(c - x - i) / c;
  return lc - lx - li - lr + static_cast<long double>(b) * std::log(frac);
}

std::vector<double> pmf_inclusion_exclusion(std::int64_t b, std::int64_t c) {
  std::vector<double> pmf(static_cast<std::size_t>(c + 1), 0.0);
  for (std::int64_t x = 0; x <= c; ++x) {
    CompensatedSum acc;
    for (std::int64_t i = 0; i <= c - x; ++i) {
      // (1 - c/c)^b vanishes since b > 0.
      const long double term = (x + i == c) ? 0.0L : std::exp(log_ie_term(b, c, x, i));
      acc.add((i % 2 == 0) ? term : -term);
    }
    pmf[static_cast<std::size_t>(x)] = static_cast<double>(acc.value());
  }
  return pmf;
}

long double max_ie_magnitude(std::int64_t b, std::int64_t c) {
  long double best = 1.0L;
  for (std::int64_t x = 0; x < c; ++x) {
    for (std::int64_t i = 0; x + i < c; ++i) {
      best = std::max(best, std::exp(log_ie_term(b, c, x, i)));
    }
  }
  return best;
}

// Distribution of occupied boxes after each ball, folded into empty counts.
std::vector<double> pmf_ball_recursion(std::int64_t b, std::int64_t c) {
  std::vector<long double> occ(static_cast<std::size_t>(c + 1), 0.0L);
  std::vector<long double> next(occ.size(), 0.0L);
  occ[0] = 1.0L;
  const long double cc = static_cast<long double>(c);
  for (std::int64_t ball = 0; ball < b; ++ball) {
    const std::int64_t top = std::min(ball + 1, c);
    std::fill(next.begin(), next.end(), 0.0L);
    for (std::int64_t k = 0; k <= top; ++k) {
      long double v = occ[static_cast<std::size_t>(k)] * (static_cast<long double>(k) / cc);
      if (k > 0) {
        v += occ[static_cast<std::size_t>(k - 1)] * (static_cast<long double>(c - k + 1) / cc);
      }
      next[static_cast<std::size_t>(k)] = v;
    }
    std::swap(occ, next);
  }
  std::vector<double> pmf(static_cast<std::size_t>(c + 1), 0.0);
  for (std::int64_t k = 0; k <= c; ++k) {
    pmf[static_cast<std::size_t>(c - k)] = static_cast<double>(occ[static_cast<std::size_t>(k)]);
  }
  return pmf;
}

}  // namespace

void OccupancySpec::validate() const {
  if (balls < 0) throw std::domain_error("occupancy: ball count must be nonnegative");
  if (boxes < 1) throw std::domain_error("occupancy: box count must be positive");
}

std::vector<double> empbox_pmf(const OccupancySpec& spec, std::int64_t box_cap) {
  spec.validate();
  const std::int64_t b = spec.balls;
  const std::int64_t c = spec.boxes;
  if (c > box_cap) {
    throw PmfUnavailable("empbox_pmf: " + std::to_string(c) + " boxes exceeds the exact-pmf cap of " +
                         std::to_string(box_cap) + "; use the sampler instead");
  }
  if (b == 0) {
    std::vector<double> pmf(static_cast<std::size_t>(c + 1), 0.0);
    pmf.back() = 1.0;
    return pmf;
  }
  constexpr long double kCancellationBudget = 1e-15L;
  const long double worst = max_ie_magnitude(b, c) * static_cast<long double>(c + 1) *
                            std::numeric_limits<long double>::epsilon();
  std::vector<double> pmf =
      worst <= kCancellationBudget ? pmf_inclusion_exclusion(b, c) : pmf_ball_recursion(b, c);
  // Residual cancellation noise can leave entries at -1e-17.
  for (double& v : pmf) v = std::max(v, 0.0);
  return pmf;
}

double empbox_mean(const OccupancySpec& spec) {
  spec.validate();
  return static_cast<double>(spec.boxes) * ratio_pow(1, spec.boxes, spec.balls);
}

double empbox_variance(const OccupancySpec& spec) {
  spec.validate();
  const std::int64_t b = spec.balls;
  const std::int64_t c = spec.boxes;
  if (b == 0 || c == 1) return 0.0;
  // Regrouped as c^2 r1^{2b} ((r2/r1^2)^b - 1) + c r1^b (1 - (r2/r1)^b), with
  // r1 = (c-1)/c and r2 = (c-2)/c, so the O(c^2) parts cancel analytically.
  const double cd = static_cast<double>(c);
  const double bd = static_cast<double>(b);
  const double r1b = ratio_pow(1, c, b);
  const double cm1 = cd - 1.0;
  const double first = cd * cd * r1b * r1b * std::expm1(bd * std::log1p(-1.0 / (cm1 * cm1)));
  const double second = cd * r1b * -std::expm1(bd * std::log1p(-1.0 / cm1));
  return std::max(first + second, 0.0);
}

std::int64_t EmptyBoxSampler::operator()(const OccupancySpec& spec, Rng& rng) {
  spec.validate();
  const std::int64_t b = spec.balls;
  const std::int64_t c = spec.boxes;
  if (b == 0) return c;
  if (b == 1) return c - 1;
  if (static_cast<std::int64_t>(stamp_.size()) < c) stamp_.resize(static_cast<std::size_t>(c), 0);
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::uniform_int_distribution<std::int64_t> pick(0, c - 1);
  std::int64_t occupied = 0;
  for (std::int64_t ball = 0; ball < b && occupied < c; ++ball) {
    auto& slot = stamp_[static_cast<std::size_t>(pick(rng))];
    if (slot != epoch_) {
      slot = epoch_;
      ++occupied;
    }
  }
  return c - occupied;
}

std::int64_t sample_empbox(const OccupancySpec& spec, Rng& rng) {
  EmptyBoxSampler sampler;
  return sampler(spec, rng);
}

std::int64_t sample_binomial(std::int64_t n, double q, Rng& rng) {
  if (n < 0) throw std::domain_error("sample_binomial: n must be nonnegative");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("sample_binomial: q must lie in [0, 1]");
  if (n == 0 || q == 0.0) return 0;
  if (q == 1.0) return n;

  const bool flip = q > 0.5;
  const double small = flip ? 1.0 - q : q;
  std::int64_t k = 0;
  constexpr double kInversionMeanLimit = 14.0;
  if (static_cast<double>(n) * small < kInversionMeanLimit) {
    const double odds = small / (1.0 - small);
    double prob = std::exp(static_cast<double>(n) * std::log1p(-small));
    double cdf = prob;
    const double u = std::generate_canonical<double, 53>(rng);
    while (u > cdf && k < n && prob > 0.0) {
      prob *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
      cdf += prob;
      ++k;
    }
  } else {
    std::binomial_distribution<std::int64_t> dist(n, small);
    k = dist(rng);
  }
  return flip ? n - k : k;
}

}  // namespace frog
