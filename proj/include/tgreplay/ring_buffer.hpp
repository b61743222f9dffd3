#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tgreplay/error.hpp"

namespace tgreplay {

/// A stored element together with its global insertion sequence number.
template <typename Payload>
struct Transition {
  Payload payload{};
  std::uint64_t insert_seq = 0;
};

/// Snapshot of the ring geometry, enough for samplers to map logical
/// indices onto stable physical slots.
struct BufferState {
  std::size_t size = 0;
  std::size_t capacity = 0;
  std::size_t head_offset = 0;

  std::size_t physical_slot(std::size_t logical) const {
    return (head_offset + logical) % capacity;
  }
  std::size_t logical_index(std::size_t slot) const {
    return (slot + capacity - head_offset) % capacity;
  }
};

/// Fixed-capacity FIFO store. Logical index 0 is the oldest stored element,
/// size()-1 the newest. Pushing into a full buffer evicts logical index 0.
template <typename Payload>
class RingBuffer {
 public:
  using value_type = Transition<Payload>;

  explicit RingBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ParameterError("RingBuffer capacity must be positive");
    slots_.resize(capacity);
  }

  /// Returns the logical index of the inserted element (always size()-1).
  std::size_t push(Payload payload) {
    std::size_t slot;
    if (size_ < capacity_) {
      slot = (head_offset_ + size_) % capacity_;
      ++size_;
    } else {
      slot = head_offset_;
      head_offset_ = (head_offset_ + 1) % capacity_;
      ++evictions_;
    }
    slots_[slot].payload = std::move(payload);
    slots_[slot].insert_seq = inserted_++;
    return size_ - 1;
  }

  const value_type& get(std::size_t i) const {
    if (i >= size_) {
      throw IndexError("logical index " + std::to_string(i) + " out of range for size " +
                       std::to_string(size_));
    }
    return slots_[(head_offset_ + i) % capacity_];
  }
  const value_type& operator[](std::size_t i) const { return get(i); }

  /// Element-wise get; duplicates allowed.
  std::vector<value_type> batch_get(std::span<const std::size_t> indices) const {
    std::vector<value_type> out;
    out.reserve(indices.size());
    for (auto i : indices) out.push_back(get(i));
    return out;
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t head_offset() const { return head_offset_; }
  bool empty() const { return size_ == 0; }
  bool full() const { return size_ == capacity_; }
  std::uint64_t total_inserted() const { return inserted_; }
  std::uint64_t evictions() const { return evictions_; }

  BufferState state() const { return {size_, capacity_, head_offset_}; }

  void clear() {
    size_ = 0;
    head_offset_ = 0;
  }

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t head_offset_ = 0;
  std::uint64_t inserted_ = 0;
  std::uint64_t evictions_ = 0;
  std::vector<value_type> slots_;
};

}  // namespace tgreplay
