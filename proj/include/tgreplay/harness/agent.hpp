#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "tgreplay/random.hpp"

namespace tgreplay::harness {

/// Payload stored in the replay buffer by the harness.
struct ToyTransition {
  std::size_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;
  std::size_t next_state = 0;
  bool done = false;
};

/// Tabular Q-learning with epsilon-greedy behaviour.
class QAgent {
 public:
  static constexpr double kEpsilon = 0.1;

  QAgent(std::size_t states, std::size_t actions, double learning_rate, double gamma)
      : actions_(actions), lr_(learning_rate), gamma_(gamma), q_(states * actions, 0.0) {}

  /// Ties are broken uniformly at random so an untrained table explores.
  std::size_t act(std::size_t s, Rng& rng) const {
    if (uniform01(rng) < kEpsilon) return pick(rng, actions_);
    const double best = max_q(s);
    std::size_t ties = 0;
    for (std::size_t a = 0; a < actions_; ++a) ties += q(s, a) == best;
    std::size_t k = pick(rng, ties);
    for (std::size_t a = 0; a < actions_; ++a) {
      if (q(s, a) == best && k-- == 0) return a;
    }
    return 0;
  }

  /// Deterministic greedy action; lowest index wins ties.
  std::size_t greedy(std::size_t s) const {
    std::size_t best = 0;
    for (std::size_t a = 1; a < actions_; ++a) {
      if (q(s, a) > q(s, best)) best = a;
    }
    return best;
  }

  /// Applies one weighted TD update and returns the TD error before it.
  double update(const ToyTransition& t, double weight = 1.0) {
    const double target = t.reward + (t.done ? 0.0 : gamma_ * max_q(t.next_state));
    double& cell = q_[t.state * actions_ + t.action];
    const double delta = target - cell;
    cell += lr_ * weight * delta;
    return delta;
  }

  double q(std::size_t s, std::size_t a) const { return q_[s * actions_ + a]; }

  double max_q(std::size_t s) const {
    auto first = q_.begin() + static_cast<std::ptrdiff_t>(s * actions_);
    return *std::max_element(first, first + static_cast<std::ptrdiff_t>(actions_));
  }

 private:
  static std::size_t pick(Rng& rng, std::size_t n) {
    auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return std::min(i, n - 1);
  }

  std::size_t actions_;
  double lr_;
  double gamma_;
  std::vector<double> q_;
};

}  // namespace tgreplay::harness
