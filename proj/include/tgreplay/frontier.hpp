#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tgreplay/error.hpp"
#include "tgreplay/trunc_geom.hpp"

namespace tgreplay {

struct FrontierPoint {
  double mu = 0.5;
  double max_entropy_nats = 0.0;
  /// Truncated geometric alpha (with n_max = n) attaining the point; negative
  /// values denote the mirrored, oldest-biased member.
  double alpha = 0.0;
};

struct FrontierCurve {
  std::size_t n = 0;
  std::vector<FrontierPoint> points;
};

inline constexpr double kFrontierTolerance = 1e-9;

/// Maximum-entropy distribution over {0..n-1} with E[i/(n-1)] = mu. The
/// maximizer is p(i) ∝ e^{theta i}; theta is found by bisection on the
/// closed-form mean, which is increasing in theta.
inline FrontierPoint max_entropy_point(std::size_t n, double mu) {
  if (n < 2) throw ParameterError("frontier needs n >= 2");
  if (!(mu > 0.0 && mu < 1.0)) throw ParameterError("frontier mu must lie in (0, 1)");
  const double last = static_cast<double>(n - 1);
  const double target = mu >= 0.5 ? mu : 1.0 - mu;
  auto recency = [&](double theta) { return geometric_family_stats(n, theta).mean_index / last; };

  double lo = 0.0;
  double hi = 1.0 / static_cast<double>(n);
  int guard = 0;
  while (recency(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw NumericError("frontier: could not bracket mu");
  }
  for (int it = 0; it < 300 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (recency(mid) < target) lo = mid; else hi = mid;
  }
  double theta = (std::abs(recency(lo) - target) < std::abs(recency(hi) - target)) ? lo : hi;
  auto stats = geometric_family_stats(n, theta);
  if (std::abs(stats.mean_index / last - target) >= kFrontierTolerance) {
    throw NumericError("frontier: bisection did not reach tolerance at mu = " + std::to_string(mu));
  }
  double alpha = theta * last / std::numbers::ln2;
  return {mu, stats.entropy_nats, mu >= 0.5 ? alpha : -alpha};
}

inline FrontierCurve frontier(std::size_t n, std::span<const double> mu_grid) {
  FrontierCurve curve{n, {}};
  curve.points.reserve(mu_grid.size());
  for (double mu : mu_grid) curve.points.push_back(max_entropy_point(n, mu));
  return curve;
}

/// Evenly spaced grid strictly inside (0, 1): step, 2 step, ..., 1 - step.
inline std::vector<double> default_mu_grid(std::size_t intervals = 100) {
  std::vector<double> grid;
  for (std::size_t i = 1; i < intervals; ++i) {
    grid.push_back(static_cast<double>(i) / static_cast<double>(intervals));
  }
  return grid;
}

inline void write_frontier_csv(std::ostream& os, const FrontierCurve& curve) {
  os << "mu,entropy_nats\n";
  os.precision(12);
  for (const auto& p : curve.points) os << p.mu << ',' << p.max_entropy_nats << '\n';
}

}  // namespace tgreplay
