#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tgreplay/error.hpp"

namespace tgreplay {

/// Neumaier-compensated sum; plain accumulation drifts past 1e-12 at n ~ 1e6.
inline double compensated_sum(std::span<const double> xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

/// Explicit probability vector over logical buffer indices 0..n-1.
class Pmf {
 public:
  static constexpr double kSumTolerance = 1e-12;

  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw InputError("pmf must have at least one outcome");
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0) throw InputError("pmf entries must be finite and >= 0");
    }
    double total = compensated_sum(probs_);
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw InputError("pmf does not sum to 1 (sum = " + std::to_string(total) + ")");
    }
  }

  /// Normalizes non-negative weights into a pmf.
  static Pmf from_weights(std::vector<double> weights) {
    if (weights.empty()) throw InputError("pmf must have at least one outcome");
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) throw InputError("weights must be finite and >= 0");
    }
    double total = compensated_sum(weights);
    if (!(total > 0.0)) throw InputError("weights have zero total mass");
    for (double& w : weights) w /= total;
    return Pmf(std::move(weights));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  Pmf reversed() const {
    std::vector<double> r(probs_.rbegin(), probs_.rend());
    return Pmf(std::move(r));
  }

  double max() const { return *std::max_element(probs_.begin(), probs_.end()); }
  double min() const { return *std::min_element(probs_.begin(), probs_.end()); }

 private:
  std::vector<double> probs_;
};

/// Total-variation distance between two distributions on the same support.
inline double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InputError("total_variation: support size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

/// Empirical frequencies from integer counts.
inline std::vector<double> frequencies(std::span<const std::size_t> counts) {
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c);
  std::vector<double> f(counts.size(), 0.0);
  if (total == 0.0) return f;
  for (std::size_t i = 0; i < counts.size(); ++i) f[i] = static_cast<double>(counts[i]) / total;
  return f;
}

}  // namespace tgreplay
