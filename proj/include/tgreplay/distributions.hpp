#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgreplay/error.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/trunc_geom.hpp"

namespace tgreplay {

// ---------------------------------------------------------------------------
// Uniform and Uniform FIFO

inline std::size_t uniform_sample(double u, std::size_t n_current) {
  detail::check_unit_draw(u);
  if (n_current == 0) throw ParameterError("n_current must be positive");
  auto i = static_cast<std::size_t>(u * static_cast<double>(n_current));
  return std::min(i, n_current - 1);
}

/// First logical index eligible under a FIFO window of the given size.
inline std::size_t fifo_window_start(std::size_t n_current, std::size_t fifo_window) {
  return n_current > fifo_window ? n_current - fifo_window : 0;
}

/// Uniform over the most recent min(fifo_window, n_current) indices.
inline std::size_t uniform_fifo_sample(double u, std::size_t n_current, std::size_t fifo_window) {
  if (fifo_window == 0) throw ParameterError("fifo_window must be positive");
  std::size_t start = fifo_window_start(n_current, fifo_window);
  return start + uniform_sample(u, n_current - start);
}

inline Pmf uniform_pmf(std::size_t n) {
  if (n == 0) throw ParameterError("n must be positive");
  return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

inline Pmf uniform_fifo_pmf(std::size_t n, std::size_t fifo_window) {
  if (n == 0) throw ParameterError("n must be positive");
  if (fifo_window == 0) throw ParameterError("fifo_window must be positive");
  std::size_t start = fifo_window_start(n, fifo_window);
  std::vector<double> p(n, 0.0);
  const double mass = 1.0 / static_cast<double>(n - start);
  std::fill(p.begin() + static_cast<std::ptrdiff_t>(start), p.end(), mass);
  return Pmf(std::move(p));
}

// ---------------------------------------------------------------------------
// ERE

/// Window size c_k for cycle position k in [1, K]:
/// clamp(round(n * eta^{1000 k / K}), min(c_min, n), n).
inline std::size_t ere_window(std::size_t k, std::size_t n_current, double eta, std::size_t c_min,
                              std::size_t cycle_len) {
  if (cycle_len == 0) throw ParameterError("ERE cycle length K must be positive");
  if (k < 1 || k > cycle_len) throw ParameterError("ERE cycle position must lie in [1, K]");
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("ERE eta must lie in (0, 1)");
  if (c_min == 0) throw ParameterError("ERE c_min must be positive");
  if (n_current == 0) throw ParameterError("n_current must be positive");
  const double exponent = 1000.0 * static_cast<double>(k) / static_cast<double>(cycle_len);
  const double raw = std::round(static_cast<double>(n_current) * std::pow(eta, exponent));
  const double lo = static_cast<double>(std::min(c_min, n_current));
  const double hi = static_cast<double>(n_current);
  return static_cast<std::size_t>(std::clamp(raw, lo, hi));
}

inline std::vector<std::size_t> ere_windows(std::size_t n_current, double eta, std::size_t c_min,
                                            std::size_t cycle_len) {
  std::vector<std::size_t> c(cycle_len);
  for (std::size_t k = 1; k <= cycle_len; ++k) c[k - 1] = ere_window(k, n_current, eta, c_min, cycle_len);
  return c;
}

/// Marginal pmf of one ERE draw at a uniformly random cycle position: the
/// average of the K suffix-uniform distributions.
inline Pmf ere_cycle_pmf(std::size_t n_current, double eta, std::size_t c_min, std::size_t cycle_len) {
  auto windows = ere_windows(n_current, eta, c_min, cycle_len);
  // Accumulate 1/c at each window start, then prefix-sum: O(n + K).
  std::vector<double> diff(n_current + 1, 0.0);
  for (auto c : windows) diff[n_current - c] += 1.0 / static_cast<double>(c);
  std::vector<double> p(n_current);
  double run = 0.0;
  for (std::size_t i = 0; i < n_current; ++i) {
    run += diff[i];
    p[i] = run;
  }
  return Pmf::from_weights(std::move(p));
}

// ---------------------------------------------------------------------------
// PER importance sampling

/// (n * prob)^{-beta}; callers normalize by the batch maximum.
inline double per_is_weight(double prob, std::size_t n_current, double beta) {
  if (!(prob > 0.0) || prob > 1.0 || !std::isfinite(prob)) throw InputError("prob must lie in (0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ParameterError("beta must lie in [0, 1]");
  return std::pow(static_cast<double>(n_current) * prob, -beta);
}

/// In-place division by the largest weight so the batch maximum is 1.
inline void normalize_by_max(std::span<double> weights) {
  if (weights.empty()) return;
  double m = *std::max_element(weights.begin(), weights.end());
  for (double& w : weights) w /= m;
}

/// Linear annealing of the importance-sampling exponent; progress in [0, 1].
inline double annealed_beta(double beta_start, double beta_end, double progress) {
  progress = std::clamp(progress, 0.0, 1.0);
  return beta_start + (beta_end - beta_start) * progress;
}

// ---------------------------------------------------------------------------
// Ablation family: four shapes sharing a fixed max/min probability ratio.

enum class AblationShape { Linear, ReverseLinear, Gaussian, ReverseTruncGeom };

inline std::string_view to_string(AblationShape s) {
  switch (s) {
    case AblationShape::Linear: return "linear";
    case AblationShape::ReverseLinear: return "reverse_linear";
    case AblationShape::Gaussian: return "gaussian";
    case AblationShape::ReverseTruncGeom: return "reverse_truncgeom";
  }
  return "?";
}

/// Unnormalized weight function with max weight 1 and min weight 2^{-ratio_exponent}.
/// Evaluated pointwise so the runtime sampler can use rejection instead of
/// materializing a CDF.
class AblationWeights {
 public:
  AblationWeights(AblationShape shape, std::size_t n, double ratio_exponent)
      : shape_(shape), n_(n), ratio_exponent_(ratio_exponent) {
    if (n < 2) throw ParameterError("ablation distributions need n >= 2");
    if (!(ratio_exponent >= 0.0) || !std::isfinite(ratio_exponent)) {
      throw ParameterError("ratio_exponent must be finite and >= 0");
    }
    last_ = static_cast<double>(n - 1);
    min_weight_ = std::exp2(-ratio_exponent);
    if (shape == AblationShape::Gaussian) {
      // The integer index closest to the centre carries the maximum weight;
      // for even n it sits half a step away, so the offset is subtracted
      // before solving for sigma.
      center_ = last_ / 2.0;
      const double near = (n % 2 == 1) ? 0.0 : 0.5;
      const double spread = center_ * center_ - near * near;
      if (spread <= 0.0 && ratio_exponent > 0.0) {
        throw ParameterError("gaussian ablation needs n >= 3 to realise a max/min ratio");
      }
      const double scaled = ratio_exponent * std::numbers::ln2;
      inv_two_sigma2_ = scaled > 0.0 ? scaled / spread : 0.0;
      peak_log_ = -near * near * inv_two_sigma2_;
    }
  }

  double operator()(std::size_t i) const {
    const double x = static_cast<double>(i);
    switch (shape_) {
      case AblationShape::Linear: return min_weight_ + (1.0 - min_weight_) * x / last_;
      case AblationShape::ReverseLinear: return min_weight_ + (1.0 - min_weight_) * (last_ - x) / last_;
      case AblationShape::Gaussian: {
        const double d = x - center_;
        return std::exp(-d * d * inv_two_sigma2_ - peak_log_);
      }
      case AblationShape::ReverseTruncGeom: return std::exp2(-ratio_exponent_ * x / last_);
    }
    return 0.0;
  }

  /// Gaussian sigma (in index units); infinite when ratio_exponent is 0.
  double gaussian_sigma() const {
    return inv_two_sigma2_ > 0.0 ? std::sqrt(1.0 / (2.0 * inv_two_sigma2_)) : INFINITY;
  }

  std::size_t size() const { return n_; }
  AblationShape shape() const { return shape_; }

 private:
  AblationShape shape_;
  std::size_t n_;
  double ratio_exponent_;
  double last_ = 1.0;
  double min_weight_ = 1.0;
  double center_ = 0.0;
  double inv_two_sigma2_ = 0.0;
  double peak_log_ = 0.0;
};

inline Pmf ablation_pmf(AblationShape shape, std::size_t n_current, double ratio_exponent = 10.0) {
  if (shape == AblationShape::ReverseTruncGeom) {
    if (n_current < 2) throw ParameterError("ablation distributions need n >= 2");
    if (ratio_exponent == 0.0) return uniform_pmf(n_current);
    return trunc_geom_pmf(n_current, n_current, ratio_exponent).reversed();
  }
  AblationWeights weights(shape, n_current, ratio_exponent);
  std::vector<double> w(n_current);
  for (std::size_t i = 0; i < n_current; ++i) w[i] = weights(i);
  return Pmf::from_weights(std::move(w));
}

}  // namespace tgreplay
