#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tgreplay/error.hpp"
#include "tgreplay/random.hpp"

namespace tgreplay::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InputError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InputError("variance needs at least two values");
  const double m = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return acc / static_cast<double>(xs.size() - 1);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap CI of the mean.
inline Interval bootstrap_ci(std::span<const double> values, double confidence, std::size_t resamples,
                             Rng& rng) {
  if (values.size() < 2) throw InputError("bootstrap_ci needs at least two values");
  if (!(confidence > 0.0 && confidence < 1.0)) throw InputError("confidence must lie in (0, 1)");
  if (resamples == 0) throw InputError("resamples must be positive");
  const std::size_t n = values.size();
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
      acc += values[std::min(j, n - 1)];
    }
    m = acc / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = (1.0 - confidence) / 2.0;
  auto at = [&](double q) {
    // Linear interpolation between order statistics.
    const double pos = q * static_cast<double>(resamples - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    if (k + 1 >= resamples) return means.back();
    return means[k] + frac * (means[k + 1] - means[k]);
  };
  return {at(tail), at(1.0 - tail)};
}

struct TTestResult {
  double t = 0.0;
  double dof = 0.0;
  double p_greater = 1.0;  // one-sided: mean(differences) > 0
};

/// One-sided paired t-test of H1: mean(a - b) > 0.
inline TTestResult paired_t_test_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InputError("paired t-test needs equal sizes >= 2");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double m = mean(d);
  const double v = variance(d);
  const double dof = static_cast<double>(d.size() - 1);
  if (v == 0.0) return {m > 0.0 ? INFINITY : (m < 0.0 ? -INFINITY : 0.0), dof, m > 0.0 ? 0.0 : 1.0};
  const double t = m / std::sqrt(v / static_cast<double>(d.size()));
  boost::math::students_t dist(dof);
  return {t, dof, boost::math::cdf(boost::math::complement(dist, t))};
}

/// Average ranks (1-based), ties share their mean rank.
inline std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return xs[i] < xs[j]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

/// Spearman rank correlation (Pearson on average ranks).
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("spearman needs equal sizes >= 2");
  auto rx = ranks(x);
  auto ry = ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson goodness-of-fit of observed counts against expected probabilities.
/// Outcomes with zero expected probability are skipped (an observation there
/// makes the statistic infinite).
inline ChiSquareResult chi_square_gof(std::span<const std::size_t> observed, std::span<const double> probs) {
  if (observed.size() != probs.size()) throw InputError("chi-square: size mismatch");
  double total = 0.0;
  for (auto c : observed) total += static_cast<double>(c);
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expected = probs[i] * total;
    if (expected <= 0.0) {
      if (observed[i] > 0) return {INFINITY, 0.0, 0.0};
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected;
    stat += d * d / expected;
    ++cells;
  }
  if (cells < 2) return {0.0, 0.0, 1.0};
  const double dof = static_cast<double>(cells - 1);
  boost::math::chi_squared dist(dof);
  return {stat, dof, boost::math::cdf(boost::math::complement(dist, stat))};
}

}  // namespace tgreplay::stats
