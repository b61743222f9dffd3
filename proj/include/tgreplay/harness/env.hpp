#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "tgreplay/error.hpp"
#include "tgreplay/random.hpp"

namespace tgreplay::harness {

enum class EnvKind { DriftingChain, SwitchingGridworld };

inline std::string_view to_string(EnvKind k) {
  return k == EnvKind::DriftingChain ? "drifting_chain" : "switching_gridworld";
}

inline EnvKind parse_env_kind(std::string_view s) {
  if (s == "drifting_chain") return EnvKind::DriftingChain;
  if (s == "switching_gridworld") return EnvKind::SwitchingGridworld;
  throw ConfigError("unknown env kind '" + std::string(s) + "'");
}

/// state_count counts agent positions (a square number for the gridworld).
struct EnvConfig {
  EnvKind kind = EnvKind::DriftingChain;
  std::size_t state_count = 15;
  std::size_t drift_period = 1000;
  std::size_t episode_len = 30;

  std::size_t action_count() const { return kind == EnvKind::DriftingChain ? 2 : 4; }

  std::size_t grid_width() const {
    return static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(state_count))));
  }

  void validate() const {
    if (state_count < 3) throw ConfigError("env state_count must be at least 3");
    if (kind == EnvKind::SwitchingGridworld) {
      const auto w = grid_width();
      if (w * w != state_count) throw ConfigError("gridworld state_count must be a perfect square");
    }
    if (drift_period == 0) throw ConfigError("drift_period must be positive");
    if (episode_len == 0) throw ConfigError("episode_len must be positive");
  }
};

struct StepOutcome {
  std::size_t next_obs = 0;
  double reward = 0.0;
  bool done = false;  // goal reached (terminal for bootstrapping)
  bool reset = false;  // episode ended for any reason; next obs starts a new episode
};

/// Navigation task whose goal relocates every drift_period environment steps.
/// The observation is (position, goal) flattened, so the tabular agent can
/// represent every regime, but transitions collected under an earlier goal
/// say nothing about the current one. Reward is 1 on reaching the goal.
/// Dynamics are deterministic given (position, action, phase); only goal
/// sequence and episode starts use the env's RNG.
class ToyEnv {
 public:
  ToyEnv(EnvConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
    cfg_.validate();
    goal_ = draw_goal(cfg_.state_count);  // no previous goal
    reset_episode();
  }

  std::size_t observation_count() const { return cfg_.state_count * cfg_.state_count; }
  std::size_t action_count() const { return cfg_.action_count(); }
  std::size_t observation() const { return encode(pos_, goal_); }
  std::size_t phase() const { return steps_ / cfg_.drift_period; }
  std::size_t goal() const { return goal_; }
  const EnvConfig& config() const { return cfg_; }

  StepOutcome step(std::size_t action) {
    const std::size_t next = move(pos_, action);
    StepOutcome out;
    out.done = next == goal_;
    out.reward = out.done ? 1.0 : 0.0;
    out.next_obs = encode(next, goal_);
    pos_ = next;
    ++episode_t_;
    ++steps_;
    const bool relocate = steps_ % cfg_.drift_period == 0;
    if (relocate) goal_ = draw_goal(goal_);
    if (out.done || episode_t_ >= cfg_.episode_len || relocate) {
      out.reset = true;
      reset_episode();
    }
    return out;
  }

  /// Fraction of non-goal start positions from which the policy reaches the
  /// current goal within episode_len steps. Does not advance the env.
  template <typename Policy>
  double evaluate(Policy&& greedy_action) const {
    std::size_t reached = 0;
    std::size_t starts = 0;
    for (std::size_t s = 0; s < cfg_.state_count; ++s) {
      if (s == goal_) continue;
      ++starts;
      std::size_t p = s;
      for (std::size_t t = 0; t < cfg_.episode_len; ++t) {
        p = move(p, greedy_action(encode(p, goal_)));
        if (p == goal_) {
          ++reached;
          break;
        }
      }
    }
    return static_cast<double>(reached) / static_cast<double>(starts);
  }

  std::size_t move(std::size_t pos, std::size_t action) const {
    if (cfg_.kind == EnvKind::DriftingChain) {
      if (action == 0) return pos == 0 ? 0 : pos - 1;
      return pos + 1 < cfg_.state_count ? pos + 1 : pos;
    }
    const std::size_t w = cfg_.grid_width();
    const std::size_t x = pos % w;
    const std::size_t y = pos / w;
    switch (action) {
      case 0: return y > 0 ? pos - w : pos;
      case 1: return x + 1 < w ? pos + 1 : pos;
      case 2: return y + 1 < w ? pos + w : pos;
      default: return x > 0 ? pos - 1 : pos;
    }
  }

 private:
  std::size_t encode(std::size_t pos, std::size_t goal) const { return pos + cfg_.state_count * goal; }

  std::size_t draw_goal(std::size_t previous) {
    std::size_t g;
    do {
      g = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(cfg_.state_count));
    } while (g >= cfg_.state_count || g == previous);
    return g;
  }

  void reset_episode() {
    episode_t_ = 0;
    do {
      pos_ = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(cfg_.state_count));
    } while (pos_ >= cfg_.state_count || pos_ == goal_);
  }

  EnvConfig cfg_;
  Rng rng_;
  std::size_t goal_ = 0;
  std::size_t pos_ = 0;
  std::size_t episode_t_ = 0;
  std::size_t steps_ = 0;
};

}  // namespace tgreplay::harness
