#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "tgreplay/error.hpp"
#include "tgreplay/exposure.hpp"
#include "tgreplay/harness/agent.hpp"
#include "tgreplay/harness/env.hpp"
#include "tgreplay/metrics.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/ring_buffer.hpp"
#include "tgreplay/sampler.hpp"
#include "tgreplay/stats.hpp"

namespace tgreplay::harness {

/// Non-negative rational, used for update-to-data ratios such as 1/64.
struct Rational {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// floor(value * n) computed exactly.
  std::uint64_t floor_times(std::uint64_t n) const { return num * n / den; }

  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    auto to_u64 = [&](std::string_view s) -> std::uint64_t {
      s = trim(s);
      if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos) {
        throw ConfigError("invalid rational '" + std::string(text) + "'");
      }
      return std::stoull(std::string(s));
    };
    Rational r;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      r = {to_u64(text.substr(0, slash)), to_u64(text.substr(slash + 1))};
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
      auto frac = text.substr(dot + 1);
      std::uint64_t den = 1;
      for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
      auto whole = text.substr(0, dot);
      r = {(whole.empty() ? 0 : to_u64(whole)) * den + (frac.empty() ? 0 : to_u64(frac)), den};
    } else {
      r = {to_u64(text), 1};
    }
    if (r.den == 0) throw ConfigError("rational with zero denominator");
    const auto g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
};

struct ExperimentConfig {
  SamplerSpec sampler{};
  Rational utd{1, 4};
  std::size_t batch_size = 16;
  std::size_t buffer_capacity = 3000;
  std::size_t total_env_steps = 30000;
  std::size_t eval_every = 250;
  std::vector<std::uint64_t> seeds{0};
  double learning_rate = 0.5;
  double gamma = 0.95;
  std::size_t metrics_every = 1;
  EnvConfig env{};

  double replay_volume() const { return tgreplay::replay_volume(utd.value(), batch_size); }

  std::uint64_t update_count() const { return utd.floor_times(total_env_steps); }

  void validate() const {
    if (utd.num == 0) throw ConfigError("utd must be positive");
    if ((utd.num * total_env_steps) % utd.den != 0) {
      throw ConfigError("utd * total_env_steps must be an integer update count");
    }
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (buffer_capacity < 2) throw ConfigError("buffer_capacity must be at least 2");
    if (total_env_steps == 0) throw ConfigError("total_env_steps must be positive");
    if (eval_every == 0 || eval_every > total_env_steps) {
      throw ConfigError("eval_every must lie in [1, total_env_steps]");
    }
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("learning_rate must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
    if (metrics_every == 0) throw ConfigError("metrics_every must be positive");
    try {
      sampler.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    env.validate();
  }
};

struct ExposureSummary {
  std::uint64_t total_replayed = 0;
  std::uint64_t distinct_replayed = 0;
  std::uint64_t max_count = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<double> checkpoint_returns;
  double auc = 0.0;
  double final_return = 0.0;
  std::uint64_t updates = 0;
  std::vector<MetricsRecord> metrics;
  ExposureSummary exposure;
};

/// One training run. The env stream depends only on the seed, so runs that
/// differ only in sampler see the same goal sequence.
inline RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ToyEnv env(cfg.env, derive_seed(seed, 0));
  Rng agent_rng(derive_seed(seed, 1));
  Rng replay_rng(derive_seed(seed, 2));

  QAgent agent(env.observation_count(), env.action_count(), cfg.learning_rate, cfg.gamma);
  RingBuffer<ToyTransition> buffer(cfg.buffer_capacity);
  Sampler sampler(cfg.sampler, cfg.buffer_capacity);
  ExposureLedger ledger;
  SampleBatch batch;
  std::vector<double> td_errors;

  RunResult result;
  result.seed = seed;
  const double volume = cfg.replay_volume();
  const std::uint64_t total_updates = cfg.update_count();

  std::size_t obs = env.observation();
  for (std::uint64_t t = 1; t <= cfg.total_env_steps; ++t) {
    const std::size_t action = agent.act(obs, agent_rng);
    const StepOutcome out = env.step(action);
    buffer.push({obs, action, out.reward, out.next_obs, out.done});
    sampler.on_push(buffer.state());
    obs = out.reset ? env.observation() : out.next_obs;

    const std::uint64_t due = cfg.utd.floor_times(t) - cfg.utd.floor_times(t - 1);
    for (std::uint64_t u = 0; u < due; ++u) {
      const double progress =
          total_updates > 1 ? static_cast<double>(result.updates) / static_cast<double>(total_updates - 1) : 1.0;
      const StepContext ctx = sampler.next_context(progress);
      const BufferState state = buffer.state();
      sampler.sample_into(state, cfg.batch_size, replay_rng, ctx, batch);
      record_exposure(ledger, batch, buffer);
      td_errors.resize(batch.size());
      for (std::size_t b = 0; b < batch.size(); ++b) {
        td_errors[b] = agent.update(buffer.get(batch.indices[b]).payload, batch.is_weights[b]);
      }
      sampler.update_priorities(state, batch.indices, td_errors);
      ++result.updates;
    }

    if (t % cfg.metrics_every == 0) {
      auto s = sampling_summary(sampler, buffer.state());
      result.metrics.push_back({static_cast<std::size_t>(t), s.mu, s.entropy_nats, volume});
    }
    if (t % cfg.eval_every == 0) {
      result.checkpoint_returns.push_back(env.evaluate([&](std::size_t o) { return agent.greedy(o); }));
    }
  }

  result.auc = normalized_auc(result.checkpoint_returns);
  result.final_return = result.checkpoint_returns.back();
  result.exposure.total_replayed = ledger.total;
  result.exposure.distinct_replayed = ledger.counts.size();
  for (const auto& [seq, c] : ledger.counts) result.exposure.max_count = std::max(result.exposure.max_count, c);
  return result;
}

/// Runs every seed of cfg, in parallel when threads > 1. Results follow the
/// order of cfg.seeds regardless of scheduling.
inline std::vector<RunResult> run_seeds(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  std::vector<RunResult> results(cfg.seeds.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cfg.seeds.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) results[i] = run_experiment(cfg, cfg.seeds[i]);
    return results;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < cfg.seeds.size(); i += threads) results[i] = run_experiment(cfg, cfg.seeds[i]);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

struct SweepRow {
  std::string sampler;
  Rational utd;
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
  double auc = 0.0;
  double final_return = 0.0;
};

/// Runs every cell of the grid for every seed in that cell's config.
inline std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& grid, unsigned threads = 1) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  std::vector<SweepRow> rows;
  for (const auto& cell : grid) {
    for (const auto& r : run_seeds(cell, threads)) {
      rows.push_back({std::string(to_string(cell.sampler.kind)), cell.utd, cell.batch_size, r.seed, r.auc,
                      r.final_return});
    }
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "sampler,utd,batch,seed,auc,final_return\n";
  os.precision(10);
  for (const auto& r : rows) {
    os << r.sampler << ',' << r.utd.str() << ',' << r.batch_size << ',' << r.seed << ',' << r.auc << ','
       << r.final_return << '\n';
  }
}

struct CellSummary {
  std::string sampler;
  Rational utd;
  std::size_t batch_size = 0;
  double replay_volume = 0.0;
  std::size_t seeds = 0;
  double mean_auc = 0.0;
  stats::Interval ci;
  /// mean_auc / mean_auc(uniform, same utd and batch) - 1; NaN without a
  /// uniform reference cell.
  double gain = 0.0;
};

inline std::vector<CellSummary> summarize(const std::vector<SweepRow>& rows, std::uint64_t bootstrap_seed = 0,
                                          double confidence = 0.95, std::size_t resamples = 2000) {
  std::map<std::tuple<std::string, std::uint64_t, std::uint64_t, std::size_t>, std::vector<double>> cells;
  std::vector<std::tuple<std::string, std::uint64_t, std::uint64_t, std::size_t>> order;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.sampler, r.utd.num, r.utd.den, r.batch_size);
    if (!cells.count(key)) order.push_back(key);
    cells[key].push_back(r.auc);
  }
  Rng rng(bootstrap_seed);
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    const auto& aucs = cells[key];
    CellSummary s;
    s.sampler = std::get<0>(key);
    s.utd = {std::get<1>(key), std::get<2>(key)};
    s.batch_size = std::get<3>(key);
    s.replay_volume = s.utd.value() * static_cast<double>(s.batch_size);
    s.seeds = aucs.size();
    s.mean_auc = stats::mean(aucs);
    s.ci = aucs.size() >= 2 ? stats::bootstrap_ci(aucs, confidence, resamples, rng) : stats::Interval{s.mean_auc, s.mean_auc};
    auto ref = cells.find(std::make_tuple(std::string("uniform"), s.utd.num, s.utd.den, s.batch_size));
    s.gain = ref == cells.end() ? NAN : s.mean_auc / stats::mean(ref->second) - 1.0;
    out.push_back(s);
  }
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<CellSummary>& cells) {
  os << "sampler,utd,batch,replay_volume,seeds,mean_auc,ci_lo,ci_hi,gain\n";
  os.precision(10);
  for (const auto& c : cells) {
    os << c.sampler << ',' << c.utd.str() << ',' << c.batch_size << ',' << c.replay_volume << ',' << c.seeds << ','
       << c.mean_auc << ',' << c.ci.lo << ',' << c.ci.hi << ',' << c.gain << '\n';
  }
}

}  // namespace tgreplay::harness
