#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tgreplay/error.hpp"

namespace tgreplay {

/// Binary sum tree over non-negative priorities, stored heap-style:
/// node 1 is the root, leaves occupy [leaf_count, 2 * leaf_count), node i has
/// children 2i and 2i+1. A parallel max array backs max_priority().
///
/// Ancestors are recomputed from their children on every update rather than
/// patched by deltas, so internal nodes never accumulate drift.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ParameterError("SumTree capacity must be positive");
    leaf_count_ = 1;
    while (leaf_count_ < capacity) leaf_count_ <<= 1;
    sum_.assign(2 * leaf_count_, 0.0);
    max_.assign(2 * leaf_count_, 0.0);
  }

  void set(std::size_t i, double priority) {
    check_index(i);
    if (!std::isfinite(priority) || priority < 0.0) {
      throw InputError("priority must be finite and non-negative");
    }
    std::size_t node = leaf_count_ + i;
    sum_[node] = priority;
    max_[node] = priority;
    for (node >>= 1; node >= 1; node >>= 1) {
      sum_[node] = sum_[2 * node] + sum_[2 * node + 1];
      max_[node] = std::max(max_[2 * node], max_[2 * node + 1]);
    }
  }

  double get(std::size_t i) const {
    check_index(i);
    return sum_[leaf_count_ + i];
  }

  double total() const { return sum_[1]; }
  double max_priority() const { return max_[1]; }

  /// Leaf whose cumulative interval [prefix, prefix + priority) contains
  /// target; target is expected in [0, total()).
  std::size_t find_prefix(double target) const {
    std::size_t node = 1;
    while (node < leaf_count_) {
      const std::size_t left = 2 * node;
      if (sum_[left + 1] <= 0.0 || (target < sum_[left] && sum_[left] > 0.0)) {
        node = left;
      } else {
        target -= sum_[left];
        node = left + 1;
      }
    }
    return std::min(node - leaf_count_, capacity_ - 1);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t leaf_count() const { return leaf_count_; }

  /// Raw node array, exposed for invariant checks.
  const std::vector<double>& nodes() const { return sum_; }

 private:
  void check_index(std::size_t i) const {
    if (i >= capacity_) {
      throw IndexError("SumTree index " + std::to_string(i) + " out of range " +
                       std::to_string(capacity_));
    }
  }

  std::size_t capacity_;
  std::size_t leaf_count_ = 1;
  std::vector<double> sum_;
  std::vector<double> max_;
};

struct PerDraw {
  std::size_t index = 0;
  double probability = 0.0;
};

/// Proportional draw: descends at prefix target u * total.
inline PerDraw per_sample(const SumTree& tree, double u) {
  if (!std::isfinite(u) || u < 0.0 || u >= 1.0) throw InputError("u must lie in [0, 1)");
  const double total = tree.total();
  if (!(total > 0.0)) throw SamplingError("cannot sample from a sum tree with zero total priority");
  std::size_t i = tree.find_prefix(u * total);
  return {i, tree.get(i) / total};
}

/// (|td_error| + epsilon)^exponent
inline double per_priority(double td_error, double exponent, double epsilon) {
  if (!std::isfinite(td_error)) throw InputError("td_error must be finite");
  if (!(exponent >= 0.0)) throw ParameterError("PER exponent must be >= 0");
  if (!(epsilon > 0.0)) throw ParameterError("PER epsilon must be positive");
  return std::pow(std::abs(td_error) + epsilon, exponent);
}

inline void per_update(SumTree& tree, std::size_t index, double td_error, double exponent,
                       double epsilon) {
  tree.set(index, per_priority(td_error, exponent, epsilon));
}

}  // namespace tgreplay
