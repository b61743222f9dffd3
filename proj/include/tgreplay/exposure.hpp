#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_map>

#include "tgreplay/ring_buffer.hpp"
#include "tgreplay/sampler.hpp"

namespace tgreplay {

/// Whole-training exposure: how often each transition (by insert_seq) was
/// replayed. total always equals the sum of counts.
struct ExposureLedger {
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(std::uint64_t insert_seq) const {
    auto it = counts.find(insert_seq);
    return it == counts.end() ? 0 : it->second;
  }
};

template <typename Payload>
void record_exposure(ExposureLedger& ledger, const SampleBatch& batch, const RingBuffer<Payload>& buffer) {
  for (auto i : batch.indices) {
    ++ledger.counts[buffer.get(i).insert_seq];
    ++ledger.total;
  }
}

}  // namespace tgreplay
