#pragma once

// Test-only reference computations. Nothing here calls into the library's
// distribution code, so agreement with it is an independent check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace frog::oracle {

/// Empty-box pmf by enumerating all c^b equally likely placements.
inline std::vector<double> enumerate_empbox(int balls, int boxes) {
  std::vector<double> pmf(static_cast<std::size_t>(boxes + 1), 0.0);
  std::int64_t total = 1;
  for (int k = 0; k < balls; ++k) total *= boxes;
  std::vector<int> seen(static_cast<std::size_t>(boxes));
  for (std::int64_t code = 0; code < total; ++code) {
    std::fill(seen.begin(), seen.end(), 0);
    std::int64_t rest = code;
    for (int k = 0; k < balls; ++k) {
      seen[static_cast<std::size_t>(rest % boxes)] = 1;
      rest /= boxes;
    }
    const auto empty = std::count(seen.begin(), seen.end(), 0);
    pmf[static_cast<std::size_t>(empty)] += 1.0;
  }
  for (double& v : pmf) v /= static_cast<double>(total);
  return pmf;
}

inline std::pair<double, double> pmf_moments(const std::vector<double>& pmf) {
  double m = 0.0, m2 = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    m += static_cast<double>(x) * pmf[x];
    m2 += static_cast<double>(x) * static_cast<double>(x) * pmf[x];
  }
  return {m, m2 - m * m};
}

/// Outcome of one chain step: (I', A', D', aux) with aux = X (geometric) or Z.
using Outcome = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t>;

/// Exact one-step law by enumerating every particle's fate individually:
/// die (geometric only), jump to a specific unvisited vertex, or jump to a
/// visited one. Independent of the binomial/empty-box reduction.
inline std::map<Outcome, double> enumerate_step(std::int64_t unvisited, std::int64_t active,
                                                std::int64_t n, double p, bool geometric) {
  struct Fate {
    int kind;  // 0 die, 1 unvisited target, 2 visited target
    int target;
    double prob;
  };
  std::vector<Fate> fates;
  const double survive = geometric ? p : 1.0;
  if (geometric) fates.push_back({0, -1, 1.0 - p});
  for (int k = 0; k < unvisited; ++k) fates.push_back({1, k, survive / static_cast<double>(n)});
  fates.push_back({2, -1, survive * static_cast<double>(n - unvisited) / static_cast<double>(n)});

  std::map<Outcome, double> law;
  std::vector<std::size_t> pick(static_cast<std::size_t>(active), 0);
  while (true) {
    double w = 1.0;
    std::int64_t survivors = 0, reached = 0;
    std::vector<int> hit(static_cast<std::size_t>(unvisited), 0);
    for (auto idx : pick) {
      const Fate& f = fates[idx];
      w *= f.prob;
      if (f.kind == 0) continue;
      ++survivors;
      if (f.kind == 1) {
        ++reached;
        hit[static_cast<std::size_t>(f.target)] = 1;
      }
    }
    if (w > 0.0) {
      const std::int64_t distinct = std::count(hit.begin(), hit.end(), 1);
      const std::int64_t i_next = unvisited - distinct;
      const std::int64_t carried = geometric ? survivors : reached;
      const std::int64_t a_next = carried + distinct;
      const std::int64_t d_next = n + 1 - i_next - a_next;
      law[{i_next, a_next, d_next, geometric ? survivors : reached}] += w;
    }
    std::size_t pos = 0;
    while (pos < pick.size() && ++pick[pos] == fates.size()) pick[pos++] = 0;
    if (pos == pick.size()) break;
  }
  return law;
}

struct ExactMoments {
  double mean[3]{};
  double var[3]{};
  double cov_aux = 0.0;
};

inline ExactMoments moments_of(const std::map<Outcome, double>& law) {
  ExactMoments m;
  double mean_aux = 0.0;
  for (const auto& [o, w] : law) {
    m.mean[0] += w * static_cast<double>(std::get<0>(o));
    m.mean[1] += w * static_cast<double>(std::get<1>(o));
    m.mean[2] += w * static_cast<double>(std::get<2>(o));
    mean_aux += w * static_cast<double>(std::get<3>(o));
  }
  for (const auto& [o, w] : law) {
    const double v[3] = {static_cast<double>(std::get<0>(o)), static_cast<double>(std::get<1>(o)),
                         static_cast<double>(std::get<2>(o))};
    for (int k = 0; k < 3; ++k) m.var[k] += w * (v[k] - m.mean[k]) * (v[k] - m.mean[k]);
    m.cov_aux += w * (v[0] - m.mean[0]) * (static_cast<double>(std::get<3>(o)) - mean_aux);
  }
  return m;
}

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double critical = 0.0;
  bool pass = false;
};

/// Pearson goodness of fit; adjacent cells are pooled until each pooled
/// expected count reaches 5.
inline ChiSquare chi_square(const std::vector<double>& observed, const std::vector<double>& probs,
                            double total, double significance) {
  std::vector<double> obs_pooled, exp_pooled;
  double o = 0.0, e = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    o += observed[k];
    e += probs[k] * total;
    if (e >= 5.0) {
      obs_pooled.push_back(o);
      exp_pooled.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_pooled.empty()) {
      obs_pooled.push_back(o);
      exp_pooled.push_back(e);
    } else {
      obs_pooled.back() += o;
      exp_pooled.back() += e;
    }
  }
  ChiSquare res;
  for (std::size_t k = 0; k < obs_pooled.size(); ++k) {
    const double d = obs_pooled[k] - exp_pooled[k];
    res.statistic += d * d / exp_pooled[k];
  }
  res.dof = static_cast<int>(obs_pooled.size()) - 1;
  if (res.dof < 1) {
    // A single pooled cell: the law is degenerate and must match exactly.
    res.pass = std::fabs(obs_pooled.front() - exp_pooled.front()) < 1e-9 * total;
    return res;
  }
  boost::math::chi_squared dist(res.dof);
  res.critical = boost::math::quantile(boost::math::complement(dist, significance));
  res.pass = res.statistic <= res.critical;
  return res;
}

}  // namespace frog::oracle
