#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tgreplay/error.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/ring_buffer.hpp"
#include "tgreplay/sampler.hpp"

namespace tgreplay {

/// One FIFO buffer and one sampler per task, all with the same capacity.
/// Each draw picks a task uniformly, then an index inside that task's buffer;
/// truncated geometric draws use the task's own fill level against the shared
/// capacity. PER mode therefore keeps one sum tree per task.
template <typename Payload>
class MultiTaskBuffer {
 public:
  MultiTaskBuffer(std::size_t task_count, std::size_t capacity, SamplerSpec spec) {
    if (task_count == 0) throw ParameterError("MultiTaskBuffer needs at least one task");
    buffers_.reserve(task_count);
    samplers_.reserve(task_count);
    for (std::size_t j = 0; j < task_count; ++j) {
      buffers_.emplace_back(capacity);
      samplers_.emplace_back(spec, capacity);
    }
  }

  void push(std::size_t task, Payload payload) {
    check_task(task);
    buffers_[task].push(std::move(payload));
    samplers_[task].on_push(buffers_[task].state());
  }

  struct Draw {
    std::size_t task = 0;
    std::size_t index = 0;
  };

  /// Task and logical index for each of batch_size i.i.d. draws.
  std::vector<Draw> sample_indices(std::size_t batch_size, Rng& rng, const StepContext& ctx = {}) const {
    require_ready();
    std::vector<Draw> out(batch_size);
    SampleBatch one;
    for (auto& d : out) {
      d.task = uniform_task(rng);
      samplers_[d.task].sample_into(buffers_[d.task].state(), 1, rng, ctx, one);
      d.index = one.indices[0];
    }
    return out;
  }

  /// Single draw returning the task and the transition itself.
  std::pair<std::size_t, Transition<Payload>> sample(Rng& rng, const StepContext& ctx = {}) const {
    auto d = sample_indices(1, rng, ctx).front();
    return {d.task, buffers_[d.task].get(d.index)};
  }

  bool ready() const {
    for (const auto& b : buffers_) {
      if (b.empty()) return false;
    }
    return true;
  }

  std::size_t task_count() const { return buffers_.size(); }
  const RingBuffer<Payload>& buffer(std::size_t task) const {
    check_task(task);
    return buffers_[task];
  }
  Sampler& sampler(std::size_t task) {
    check_task(task);
    return samplers_[task];
  }

 private:
  void check_task(std::size_t task) const {
    if (task >= buffers_.size()) {
      throw InputError("task index " + std::to_string(task) + " out of range");
    }
  }
  void require_ready() const {
    for (std::size_t j = 0; j < buffers_.size(); ++j) {
      if (buffers_[j].empty()) throw NotReadyError("task " + std::to_string(j) + " has an empty buffer");
    }
  }
  // A single task consumes no randomness, so M = 1 replays the plain sampler stream.
  std::size_t uniform_task(Rng& rng) const {
    if (buffers_.size() == 1) return 0;
    auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(buffers_.size()));
    return j < buffers_.size() ? j : buffers_.size() - 1;
  }

  std::vector<RingBuffer<Payload>> buffers_;
  std::vector<Sampler> samplers_;
};

}  // namespace tgreplay
