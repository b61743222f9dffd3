#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "tgreplay/error.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/vector_log.hpp"

namespace tgreplay {

namespace detail {

inline void check_trunc_geom_params(std::size_t n_current, std::size_t n_max, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("alpha must be a finite positive real");
  }
  if (n_max < 2) throw ParameterError("n_max must be at least 2");
  if (n_current < 1 || n_current > n_max) {
    throw ParameterError("n_current must lie in [1, n_max], got " + std::to_string(n_current));
  }
}

inline void check_unit_draw(double u) {
  if (!std::isfinite(u) || u < 0.0 || u >= 1.0) throw InputError("u must lie in [0, 1)");
}

}  // namespace detail

/// Closed-form inverse CDF of p(i) ∝ 2^{k i}, i in [0, n_current), with
/// k = alpha / (n_max - 1). Constants depend only on (n_current, n_max, alpha),
/// so one instance serves a whole batch at O(1) per draw.
///
/// The continuous variable x = log2(1 + u (2^{k n} - 1)) / k lies in [0, n) and
/// x in [j, j+1) exactly when u lies in [F(j-1), F(j)), so floor(x) has the
/// truncated geometric law. Once k n exceeds kLogSpaceThreshold, 2^{k n} is no
/// longer formed; x = n + log2(u + (1-u) 2^{-k n}) / k is used instead.
///
/// Rounding 1 + u (2^{k n} - 1) perturbs x by about eps / (k ln 2) index
/// units, so plain log2 is used unless k is below kLog1pThreshold, where
/// the slower log1p keeps near-uniform parameters exact.
class TruncGeomInverse {
 public:
  static constexpr double kLogSpaceThreshold = 50.0;
  static constexpr double kLog1pThreshold = 1e-6;

  TruncGeomInverse(std::size_t n_current, std::size_t n_max, double alpha) {
    detail::check_trunc_geom_params(n_current, n_max, alpha);
    n_ = n_current;
    last_ = static_cast<double>(n_current - 1);
    k_ = alpha / static_cast<double>(n_max - 1);
    double kn = k_ * static_cast<double>(n_current);
    log_space_ = kn > kLogSpaceThreshold;
    if (log_space_) {
      tail_ = std::exp2(-kn);
      scale_ = 1.0 / k_;
    } else if (k_ < kLog1pThreshold) {
      use_log1p_ = true;
      span_ = std::expm1(kn * std::numbers::ln2);  // 2^{k n} - 1
      scale_ = 1.0 / (k_ * std::numbers::ln2);
    } else {
      span_ = std::expm1(kn * std::numbers::ln2);
      scale_ = 1.0 / k_;
    }
  }

  /// Continuous preimage coordinate; floor() of it is the sampled index.
  double position(double u) const {
    if (log_space_) {
      return static_cast<double>(n_) + std::log2(u + (1.0 - u) * tail_) * scale_;
    }
    if (use_log1p_) return std::log1p(u * span_) * scale_;
    return std::log2(1.0 + u * span_) * scale_;
  }

  /// u must lie in [0, 1); callers on the hot path validate once upstream.
  std::size_t operator()(double u) const {
    double x = std::floor(position(u));
    if (!(x >= 0.0)) return 0;  // also catches -inf / NaN from log2(0)
    if (x >= last_) return n_ - 1;
    return static_cast<std::size_t>(x);
  }

  /// Batch form over draws u in [0, 1). The common path runs through a
  /// vectorized log when the CPU supports it.
  void operator()(std::span<const double> u, std::span<std::size_t> out) const {
    if (u.size() != out.size()) throw InputError("batch spans differ in length");
    if (log_space_ || use_log1p_) {
      for (std::size_t b = 0; b < u.size(); ++b) out[b] = (*this)(u[b]);
      return;
    }
    detail::log_affine_floor(u.data(), out.data(), u.size(), span_, scale_ / std::numbers::ln2, last_);
  }

  std::size_t n_current() const { return n_; }
  double k() const { return k_; }
  bool log_space() const { return log_space_; }

 private:
  std::size_t n_ = 1;
  double last_ = 0.0;
  double k_ = 0.0;
  double span_ = 0.0;
  double tail_ = 0.0;
  double scale_ = 0.0;
  bool log_space_ = false;
  bool use_log1p_ = false;
};

/// Single validated draw of the truncated geometric sampler.
inline std::size_t trunc_geom_sample(double u, std::size_t n_current, std::size_t n_max,
                                     double alpha) {
  detail::check_unit_draw(u);
  return TruncGeomInverse(n_current, n_max, alpha)(u);
}

/// p(i) ∝ 2^{k i} over i = 0..n_current-1, k = alpha/(n_max-1). Weights are
/// taken relative to the newest index so large alpha cannot overflow.
inline Pmf trunc_geom_pmf(std::size_t n_current, std::size_t n_max, double alpha) {
  detail::check_trunc_geom_params(n_current, n_max, alpha);
  const double k = alpha / static_cast<double>(n_max - 1);
  const double last = static_cast<double>(n_current - 1);
  std::vector<double> w(n_current);
  for (std::size_t i = 0; i < n_current; ++i) w[i] = std::exp2(k * (static_cast<double>(i) - last));
  return Pmf::from_weights(std::move(w));
}

/// Mean index and entropy (nats) of p(i) ∝ e^{theta i}, i = 0..n-1, any sign
/// of theta. Closed form, O(1); this is the whole truncated geometric family
/// with theta = alpha ln2 / (n_max - 1).
struct GeometricStats {
  double mean_index = 0.0;
  double entropy_nats = 0.0;
};

inline GeometricStats geometric_family_stats(std::size_t n, double theta) {
  if (n == 0) throw ParameterError("geometric_family_stats: n must be positive");
  const double nd = static_cast<double>(n);
  if (n == 1) return {0.0, 0.0};
  if (theta < 0.0) {
    GeometricStats s = geometric_family_stats(n, -theta);
    return {(nd - 1.0) - s.mean_index, s.entropy_nats};
  }
  const double n2 = nd * nd;
  const double var = (n2 - 1.0) / 12.0;
  if (theta * nd < 1e-3) {
    // Cumulant expansion around the uniform distribution.
    const double k4 = -(n2 * n2 - 1.0) / 120.0;
    const double t2 = theta * theta;
    double mean = (nd - 1.0) / 2.0 + theta * var + theta * t2 * k4 / 6.0;
    double entropy = std::log(nd) - t2 * var / 2.0 - t2 * t2 * k4 / 8.0;
    return {mean, entropy};
  }
  const double a = -std::expm1(-theta * nd);  // 1 - e^{-theta n}
  const double b = -std::expm1(-theta);       // 1 - e^{-theta}
  double mean = nd / a - 1.0 / b;
  double log_z = theta * (nd - 1.0) + std::log(a) - std::log(b);
  return {mean, log_z - theta * mean};
}

/// Theta of the exponential family for a truncated geometric sampler.
inline double trunc_geom_theta(std::size_t n_max, double alpha) {
  return alpha * std::numbers::ln2 / static_cast<double>(n_max - 1);
}

}  // namespace tgreplay
