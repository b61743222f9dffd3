#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tgreplay/distributions.hpp"
#include "tgreplay/error.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/ring_buffer.hpp"
#include "tgreplay/sum_tree.hpp"
#include "tgreplay/trunc_geom.hpp"

namespace tgreplay {

enum class SamplerKind {
  Uniform,
  TruncGeom,
  ERE,
  PER,
  UniformFIFO,
  Linear,
  ReverseLinear,
  Gaussian,
  ReverseTruncGeom,
};

inline std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::TruncGeom: return "truncgeom";
    case SamplerKind::ERE: return "ere";
    case SamplerKind::PER: return "per";
    case SamplerKind::UniformFIFO: return "uniform_fifo";
    case SamplerKind::Linear: return "linear";
    case SamplerKind::ReverseLinear: return "reverse_linear";
    case SamplerKind::Gaussian: return "gaussian";
    case SamplerKind::ReverseTruncGeom: return "reverse_truncgeom";
  }
  return "?";
}

inline SamplerKind parse_sampler_kind(std::string_view name) {
  for (auto k : {SamplerKind::Uniform, SamplerKind::TruncGeom, SamplerKind::ERE, SamplerKind::PER,
                 SamplerKind::UniformFIFO, SamplerKind::Linear, SamplerKind::ReverseLinear,
                 SamplerKind::Gaussian, SamplerKind::ReverseTruncGeom}) {
    if (name == to_string(k)) return k;
  }
  if (name == "fifo") return SamplerKind::UniformFIFO;
  if (name == "tg") return SamplerKind::TruncGeom;
  throw ParameterError("unknown sampler '" + std::string(name) + "'");
}

inline std::optional<AblationShape> ablation_shape(SamplerKind k) {
  switch (k) {
    case SamplerKind::Linear: return AblationShape::Linear;
    case SamplerKind::ReverseLinear: return AblationShape::ReverseLinear;
    case SamplerKind::Gaussian: return AblationShape::Gaussian;
    case SamplerKind::ReverseTruncGeom: return AblationShape::ReverseTruncGeom;
    default: return std::nullopt;
  }
}

/// Tagged sampler configuration. Only the fields of the selected kind are read.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::Uniform;
  double alpha = 10.0;
  double eta = 0.996;
  std::size_t ere_updates_per_cycle = 1000;
  std::size_t c_min = 5000;
  std::size_t fifo_window = 288000;
  double per_exponent = 0.6;
  double per_beta_start = 0.4;
  double per_beta_end = 1.0;
  double per_epsilon = 1e-6;
  double ratio_exponent = 10.0;

  void validate() const {
    switch (kind) {
      case SamplerKind::TruncGeom:
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be > 0");
        break;
      case SamplerKind::ERE:
        if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("eta must lie in (0, 1)");
        if (ere_updates_per_cycle == 0) throw ParameterError("ere_updates_per_cycle must be > 0");
        if (c_min == 0) throw ParameterError("c_min must be > 0");
        break;
      case SamplerKind::PER:
        if (!(per_exponent >= 0.0)) throw ParameterError("per_exponent must be >= 0");
        if (!(per_beta_start > 0.0 && per_beta_start <= 1.0) ||
            !(per_beta_end > 0.0 && per_beta_end <= 1.0)) {
          throw ParameterError("PER beta schedule must lie in (0, 1]");
        }
        if (!(per_epsilon > 0.0)) throw ParameterError("per_epsilon must be > 0");
        break;
      case SamplerKind::UniformFIFO:
        if (fifo_window == 0) throw ParameterError("fifo_window must be > 0");
        break;
      case SamplerKind::Linear:
      case SamplerKind::ReverseLinear:
      case SamplerKind::Gaussian:
      case SamplerKind::ReverseTruncGeom:
        if (!(ratio_exponent >= 0.0) || !std::isfinite(ratio_exponent)) {
          throw ParameterError("ratio_exponent must be >= 0");
        }
        break;
      case SamplerKind::Uniform:
        break;
    }
  }
};

/// Logical indices plus importance weights (all 1 outside PER).
struct SampleBatch {
  std::vector<std::size_t> indices;
  std::vector<double> is_weights;

  std::size_t size() const { return indices.size(); }
};

/// Per-update context: ERE cycle position (1-based) and training progress
/// in [0, 1] for the PER beta schedule.
struct StepContext {
  std::size_t cycle_position = 1;
  double progress = 1.0;
};

/// One sampling strategy bound to a buffer of fixed capacity. Stateless
/// strategies only read the BufferState; PER owns a sum tree keyed by
/// physical slot and ERE keeps its cycle counter here.
class Sampler {
 public:
  Sampler(SamplerSpec spec, std::size_t capacity) : spec_(spec), capacity_(capacity) {
    spec_.validate();
    if (capacity == 0) throw ParameterError("sampler capacity must be positive");
    if (spec_.kind == SamplerKind::TruncGeom && capacity < 2) {
      throw ParameterError("truncated geometric sampling needs capacity >= 2");
    }
    if (spec_.kind == SamplerKind::PER) tree_.emplace(capacity);
  }

  const SamplerSpec& spec() const { return spec_; }
  std::size_t capacity() const { return capacity_; }
  const SumTree* tree() const { return tree_ ? &*tree_ : nullptr; }

  /// Call after every RingBuffer::push with the post-push state. New PER
  /// entries take the current maximum priority (1.0 for an empty tree).
  void on_push(const BufferState& after) {
    if (!tree_) return;
    const std::size_t slot = after.physical_slot(after.size - 1);
    tree_->set(slot, 0.0);
    const double p = tree_->max_priority();
    tree_->set(slot, p > 0.0 ? p : 1.0);
  }

  /// Context for the next gradient update; advances the ERE cycle, which
  /// wraps after ere_updates_per_cycle updates.
  StepContext next_context(double progress = 1.0) {
    StepContext ctx{cycle_pos_, progress};
    cycle_pos_ = cycle_pos_ % spec_.ere_updates_per_cycle + 1;
    return ctx;
  }

  SampleBatch sample(const BufferState& state, std::size_t batch_size, Rng& rng,
                     const StepContext& ctx = {}) const {
    SampleBatch out;
    sample_into(state, batch_size, rng, ctx, out);
    return out;
  }

  /// Reuses out's storage; no allocation once out has reached batch_size.
  void sample_into(const BufferState& state, std::size_t batch_size, Rng& rng, const StepContext& ctx,
                   SampleBatch& out) const {
    if (state.size == 0) throw SamplingError("cannot sample from an empty buffer");
    if (state.capacity != capacity_) throw ParameterError("buffer capacity does not match sampler");
    out.indices.resize(batch_size);
    out.is_weights.assign(batch_size, 1.0);
    const std::size_t n = state.size;
    switch (spec_.kind) {
      case SamplerKind::Uniform:
        for (auto& i : out.indices) i = draw_uniform(rng, 0, n);
        break;
      case SamplerKind::TruncGeom: {
        TruncGeomInverse inverse(n, capacity_, spec_.alpha);
        // is_weights doubles as scratch for the uniforms.
        for (auto& u : out.is_weights) u = uniform01(rng);
        inverse(out.is_weights, out.indices);
        std::fill(out.is_weights.begin(), out.is_weights.end(), 1.0);
        break;
      }
      case SamplerKind::UniformFIFO: {
        const std::size_t start = fifo_window_start(n, spec_.fifo_window);
        for (auto& i : out.indices) i = draw_uniform(rng, start, n);
        break;
      }
      case SamplerKind::ERE: {
        const std::size_t c = ere_window(ctx.cycle_position, n, spec_.eta, spec_.c_min,
                                         spec_.ere_updates_per_cycle);
        for (auto& i : out.indices) i = draw_uniform(rng, n - c, n);
        break;
      }
      case SamplerKind::PER: {
        const double beta = annealed_beta(spec_.per_beta_start, spec_.per_beta_end, ctx.progress);
        for (std::size_t b = 0; b < batch_size; ++b) {
          PerDraw d = per_sample(*tree_, uniform01(rng));
          out.indices[b] = state.logical_index(d.index);
          out.is_weights[b] = per_is_weight(d.probability, n, beta);
        }
        normalize_by_max(out.is_weights);
        break;
      }
      case SamplerKind::ReverseTruncGeom: {
        if (n == 1 || spec_.ratio_exponent == 0.0) {
          for (auto& i : out.indices) i = draw_uniform(rng, 0, n);
          break;
        }
        TruncGeomInverse inverse(n, n, spec_.ratio_exponent);
        for (auto& i : out.indices) i = n - 1 - inverse(uniform01(rng));
        break;
      }
      case SamplerKind::Linear:
      case SamplerKind::ReverseLinear:
      case SamplerKind::Gaussian: {
        // n <= 2 Gaussian is symmetric over both indices, i.e. uniform.
        if (n == 1 || (spec_.kind == SamplerKind::Gaussian && n == 2)) {
          for (auto& i : out.indices) i = draw_uniform(rng, 0, n);
          break;
        }
        AblationWeights weights(*ablation_shape(spec_.kind), n, spec_.ratio_exponent);
        // Rejection against the flat envelope max(w) = 1; exact, O(1) expected.
        for (auto& i : out.indices) {
          std::size_t cand;
          do {
            cand = draw_uniform(rng, 0, n);
          } while (uniform01(rng) >= weights(cand));
          i = cand;
        }
        break;
      }
    }
  }

  /// Feed back TD errors for the sampled logical indices. No-op unless PER.
  void update_priorities(const BufferState& state, std::span<const std::size_t> logical,
                         std::span<const double> td_errors) {
    if (!tree_) return;
    if (logical.size() != td_errors.size()) throw InputError("indices/td_errors length mismatch");
    for (std::size_t b = 0; b < logical.size(); ++b) {
      if (logical[b] >= state.size) throw IndexError("priority update for invalid logical index");
      per_update(*tree_, state.physical_slot(logical[b]), td_errors[b], spec_.per_exponent,
                 spec_.per_epsilon);
    }
  }

  /// Exact per-draw distribution over logical indices. For ERE this is the
  /// single-window distribution when ctx is given, otherwise the average
  /// over a full cycle.
  Pmf pmf(const BufferState& state, std::optional<StepContext> ctx = std::nullopt) const {
    const std::size_t n = state.size;
    if (n == 0) throw SamplingError("empty buffer has no sampling distribution");
    switch (spec_.kind) {
      case SamplerKind::Uniform: return uniform_pmf(n);
      case SamplerKind::TruncGeom: return trunc_geom_pmf(n, capacity_, spec_.alpha);
      case SamplerKind::UniformFIFO: return uniform_fifo_pmf(n, spec_.fifo_window);
      case SamplerKind::ERE:
        if (ctx) {
          auto c = ere_window(ctx->cycle_position, n, spec_.eta, spec_.c_min, spec_.ere_updates_per_cycle);
          return uniform_fifo_pmf(n, c);
        }
        return ere_cycle_pmf(n, spec_.eta, spec_.c_min, spec_.ere_updates_per_cycle);
      case SamplerKind::PER: {
        std::vector<double> w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = tree_->get(state.physical_slot(i));
        return Pmf::from_weights(std::move(w));
      }
      case SamplerKind::Gaussian:
        if (n <= 2) return uniform_pmf(n);
        return ablation_pmf(AblationShape::Gaussian, n, spec_.ratio_exponent);
      case SamplerKind::Linear:
      case SamplerKind::ReverseLinear:
      case SamplerKind::ReverseTruncGeom:
        if (n == 1) return uniform_pmf(1);
        return ablation_pmf(*ablation_shape(spec_.kind), n, spec_.ratio_exponent);
    }
    throw ParameterError("unhandled sampler kind");
  }

 private:
  static std::size_t draw_uniform(Rng& rng, std::size_t lo, std::size_t hi) {
    const auto span = static_cast<double>(hi - lo);
    auto i = lo + static_cast<std::size_t>(uniform01(rng) * span);
    return i < hi ? i : hi - 1;
  }

  SamplerSpec spec_;
  std::size_t capacity_;
  std::optional<SumTree> tree_;
  std::size_t cycle_pos_ = 1;
};

/// Free-function form: one batch from the SamplerSpec's distribution.
inline SampleBatch sample_batch(const Sampler& sampler, const BufferState& state, std::size_t batch_size,
                                Rng& rng, const StepContext& ctx = {}) {
  return sampler.sample(state, batch_size, rng, ctx);
}

/// SamplerSpec-only form for strategies that keep no per-entry state. PER needs
/// its sum tree and therefore a long-lived Sampler.
inline SampleBatch sample_batch(const SamplerSpec& spec, const BufferState& state, std::size_t batch_size, Rng& rng,
                                const StepContext& ctx = {}) {
  if (spec.kind == SamplerKind::PER) throw ParameterError("PER sampling needs a Sampler that owns its sum tree");
  return Sampler(spec, state.capacity).sample(state, batch_size, rng, ctx);
}

}  // namespace tgreplay
