#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tgreplay/distributions.hpp"
#include "tgreplay/error.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/sampler.hpp"
#include "tgreplay/trunc_geom.hpp"

namespace tgreplay {

/// i / (n - 1); the single element of a size-1 buffer counts as newest.
inline double normalized_recency(std::size_t i, std::size_t n) {
  if (n == 0 || i >= n) throw InputError("normalized_recency: index out of range");
  if (n == 1) return 1.0;
  return static_cast<double>(i) / static_cast<double>(n - 1);
}

/// E_{i~p}[i / (n-1)]. Mirrored pairs are combined first, so any pmf that is
/// bitwise symmetric under index reversal yields exactly 0.5.
inline double expected_recency(const Pmf& p) {
  const std::size_t n = p.size();
  if (n == 1) return 1.0;
  const double center = static_cast<double>(n - 1) / 2.0;
  std::vector<double> terms;
  terms.reserve(n / 2);
  for (std::size_t i = 0; i < n / 2; ++i) {
    terms.push_back((p[n - 1 - i] - p[i]) * (static_cast<double>(n - 1 - i) - center));
  }
  return 0.5 + compensated_sum(terms) / static_cast<double>(n - 1);
}

/// Shannon entropy in nats with 0 ln 0 = 0.
inline double sampling_entropy(const Pmf& p) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (double x : p.probs()) {
    if (x > 0.0) terms.push_back(-x * std::log(x));
  }
  return compensated_sum(terms);
}

/// Replayed transitions per environment step: UTD x batch size.
inline double replay_volume(double utd, std::size_t batch_size) {
  if (!(utd > 0.0) || !std::isfinite(utd)) throw ParameterError("utd must be positive");
  if (batch_size == 0) throw ParameterError("batch_size must be positive");
  return utd * static_cast<double>(batch_size);
}

/// Index distance over which truncated geometric probability doubles.
inline double doubling_distance(double alpha, std::size_t n_max) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (n_max < 2) throw ParameterError("n_max must be at least 2");
  return static_cast<double>(n_max - 1) / alpha;
}

/// Effective buffer-size factor of an entropy difference in nats.
inline double entropy_buffer_equivalence(double delta_entropy_nats) { return std::exp(delta_entropy_nats); }

/// Perplexity e^H of a pmf.
inline double perplexity(const Pmf& p) { return std::exp(sampling_entropy(p)); }

/// Mean of returns at equally spaced checkpoints.
inline double normalized_auc(std::span<const double> returns_at_checkpoints) {
  if (returns_at_checkpoints.empty()) throw InputError("normalized_auc: no checkpoints");
  return compensated_sum(returns_at_checkpoints) / static_cast<double>(returns_at_checkpoints.size());
}

/// (r - r_random) / (r_expert - r_random), not clipped.
inline double normalize_score(double r, double r_random, double r_expert) {
  if (!std::isfinite(r_random) || !std::isfinite(r_expert) || r_expert == r_random) {
    throw ParameterError("normalize_score: r_expert must differ from r_random");
  }
  return (r - r_random) / (r_expert - r_random);
}

struct MetricsRecord {
  std::size_t step = 0;
  double mu = 0.0;
  double entropy_nats = 0.0;
  double replay_volume = 0.0;
};

struct RecencyEntropy {
  double mu = 0.0;
  double entropy_nats = 0.0;
};

/// mu and instantaneous entropy of a sampler at the given buffer state.
/// Closed forms for Uniform, UniformFIFO, TruncGeom and ERE; PER and the
/// ablation shapes materialize their pmf. ERE reports the cycle average of
/// the per-update values, since each update draws from a single window.
inline RecencyEntropy sampling_summary(const Sampler& sampler, const BufferState& state) {
  const std::size_t n = state.size;
  if (n == 0) throw SamplingError("empty buffer has no sampling distribution");
  if (n == 1) return {1.0, 0.0};
  const double last = static_cast<double>(n - 1);
  const auto& spec = sampler.spec();
  auto window_stats = [&](std::size_t w) {
    const double start = static_cast<double>(n - w);
    return RecencyEntropy{(start + static_cast<double>(w - 1) / 2.0) / last,
                          std::log(static_cast<double>(w))};
  };
  switch (spec.kind) {
    case SamplerKind::Uniform: return {0.5, std::log(static_cast<double>(n))};
    case SamplerKind::UniformFIFO: return window_stats(std::min(spec.fifo_window, n));
    case SamplerKind::TruncGeom: {
      auto s = geometric_family_stats(n, trunc_geom_theta(sampler.capacity(), spec.alpha));
      return {s.mean_index / last, s.entropy_nats};
    }
    case SamplerKind::ERE: {
      RecencyEntropy acc;
      for (auto c : ere_windows(n, spec.eta, spec.c_min, spec.ere_updates_per_cycle)) {
        auto s = window_stats(c);
        acc.mu += s.mu;
        acc.entropy_nats += s.entropy_nats;
      }
      const auto k = static_cast<double>(spec.ere_updates_per_cycle);
      return {acc.mu / k, acc.entropy_nats / k};
    }
    default: {
      Pmf p = sampler.pmf(state);
      return {expected_recency(p), sampling_entropy(p)};
    }
  }
}

inline void write_metrics_csv(std::ostream& os, std::span<const MetricsRecord> records) {
  os << "step,mu,entropy_nats,replay_volume\n";
  os.precision(12);
  for (const auto& r : records) {
    os << r.step << ',' << r.mu << ',' << r.entropy_nats << ',' << r.replay_volume << '\n';
  }
}

}  // namespace tgreplay
