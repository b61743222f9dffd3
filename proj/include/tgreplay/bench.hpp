#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "tgreplay/random.hpp"
#include "tgreplay/ring_buffer.hpp"
#include "tgreplay/sampler.hpp"

namespace tgreplay::bench {

struct LatencyRow {
  std::string op;
  std::string sampler;
  std::size_t buffer_size = 0;
  double mean_ns = 0.0;
  double p50_ns = 0.0;
  double p99_ns = 0.0;
};

struct LatencyReport {
  std::size_t batch = 0;
  std::size_t warmup_iterations = 0;
  std::size_t measured_iterations = 0;
  std::vector<LatencyRow> rows;

  const LatencyRow* find(const std::string& op, const std::string& sampler, std::size_t size) const {
    for (const auto& r : rows) {
      if (r.op == op && r.sampler == sampler && r.buffer_size == size) return &r;
    }
    return nullptr;
  }
};

/// Smallest number of timed operations per cell that a report may claim.
inline constexpr std::size_t kMinIterations = 100000;

struct BenchOptions {
  std::vector<std::size_t> sizes{1000, 10000, 100000, 1000000};
  std::vector<SamplerKind> samplers{SamplerKind::Uniform, SamplerKind::TruncGeom, SamplerKind::PER};
  std::size_t batch = 256;
  /// Per-element operations timed per cell, excluding warmup.
  std::size_t iterations = 100000;
  std::uint64_t seed = 0;
};

namespace detail {

inline LatencyRow summarize(std::string op, std::string sampler, std::size_t size, std::vector<double>& per_elem_ns) {
  std::sort(per_elem_ns.begin(), per_elem_ns.end());
  double sum = 0.0;
  for (double x : per_elem_ns) sum += x;
  auto quantile = [&](double q) {
    auto k = static_cast<std::size_t>(q * static_cast<double>(per_elem_ns.size() - 1));
    return per_elem_ns[k];
  };
  return {std::move(op), std::move(sampler), size, sum / static_cast<double>(per_elem_ns.size()), quantile(0.5),
          quantile(0.99)};
}

/// Times `rounds` calls of body(), each covering `batch` elements, after
/// `warmup` untimed calls. Returns per-element nanoseconds for every round.
template <typename Body>
std::vector<double> time_rounds(std::size_t warmup, std::size_t rounds, std::size_t batch, Body&& body) {
  using clock = std::chrono::steady_clock;
  for (std::size_t r = 0; r < warmup; ++r) body();
  std::vector<double> out(rounds);
  for (auto& x : out) {
    const auto t0 = clock::now();
    body();
    const auto t1 = clock::now();
    x = std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(batch);
  }
  return out;
}

}  // namespace detail

/// Sampling, priority-update and insert latencies per sampler and buffer
/// size. Buffers are filled to capacity before timing; all scratch storage is
/// sized up front so the timed loops do not allocate. Sampling rounds for the
/// samplers of one buffer size are interleaved so drift in clock speed hits
/// them equally.
inline LatencyReport bench_samplers(const BenchOptions& opt) {
  using clock = std::chrono::steady_clock;
  LatencyReport report;
  report.batch = opt.batch;
  const std::size_t rounds = (opt.iterations + opt.batch - 1) / opt.batch;
  const std::size_t warmup = std::max<std::size_t>(1, rounds / 10);
  report.measured_iterations = rounds * opt.batch;
  report.warmup_iterations = warmup * opt.batch;

  struct Cell {
    SamplerKind kind;
    RingBuffer<std::uint32_t> buffer;
    Sampler sampler;
    SampleBatch batch;
    std::vector<double> sample_ns;
  };

  Rng rng(opt.seed);
  std::vector<double> td(opt.batch);
  for (auto& x : td) x = uniform01(rng) * 2.0 - 1.0;
  const StepContext ctx{};

  for (std::size_t n : opt.sizes) {
    std::vector<Cell> cells;
    cells.reserve(opt.samplers.size());
    for (SamplerKind kind : opt.samplers) {
      SamplerSpec spec;
      spec.kind = kind;
      Cell& c = cells.emplace_back(Cell{kind, RingBuffer<std::uint32_t>(n), Sampler(spec, n), {}, {}});
      for (std::size_t i = 0; i < n; ++i) {
        c.buffer.push(static_cast<std::uint32_t>(i));
        c.sampler.on_push(c.buffer.state());
      }
      c.batch.indices.reserve(opt.batch);
      c.batch.is_weights.reserve(opt.batch);
      c.sample_ns.resize(rounds);
      if (kind == SamplerKind::PER) {
        // Spread priorities so the tree is not trivially uniform.
        std::vector<std::size_t> all(n);
        std::vector<double> errors(n);
        for (std::size_t i = 0; i < n; ++i) {
          all[i] = i;
          errors[i] = uniform01(rng);
        }
        c.sampler.update_priorities(c.buffer.state(), all, errors);
      }
    }

    for (std::size_t r = 0; r < warmup + rounds; ++r) {
      for (Cell& c : cells) {
        const BufferState state = c.buffer.state();
        const auto t0 = clock::now();
        c.sampler.sample_into(state, opt.batch, rng, ctx, c.batch);
        const auto t1 = clock::now();
        if (r >= warmup) {
          c.sample_ns[r - warmup] =
              std::chrono::duration<double, std::nano>(t1 - t0).count() / static_cast<double>(opt.batch);
        }
      }
    }

    for (Cell& c : cells) {
      const std::string name(to_string(c.kind));
      const BufferState state = c.buffer.state();
      report.rows.push_back(detail::summarize("sample", name, n, c.sample_ns));

      if (c.kind == SamplerKind::PER) {
        auto update_ns = detail::time_rounds(warmup, rounds, opt.batch, [&] {
          c.sampler.sample_into(state, opt.batch, rng, ctx, c.batch);
          c.sampler.update_priorities(state, c.batch.indices, td);
        });
        // Subtract the sampling share so the row reflects the update alone.
        const double sample_mean = report.rows.back().mean_ns;
        for (auto& x : update_ns) x = std::max(0.0, x - sample_mean);
        report.rows.push_back(detail::summarize("priority_update", name, n, update_ns));
      }

      std::uint32_t payload = 0;
      auto insert_ns = detail::time_rounds(warmup, rounds, opt.batch, [&] {
        for (std::size_t b = 0; b < opt.batch; ++b) {
          c.buffer.push(payload++);
          c.sampler.on_push(c.buffer.state());
        }
      });
      report.rows.push_back(detail::summarize("insert", name, n, insert_ns));
    }
  }
  return report;
}

inline void write_report_csv(std::ostream& os, const LatencyReport& report) {
  os << "op,sampler,buffer_size,mean_ns,p50_ns,p99_ns\n";
  os << std::fixed << std::setprecision(3);
  for (const auto& r : report.rows) {
    os << r.op << ',' << r.sampler << ',' << r.buffer_size << ',' << r.mean_ns << ',' << r.p50_ns << ',' << r.p99_ns
       << '\n';
  }
}

inline void write_report_table(std::ostream& os, const LatencyReport& report) {
  os << "batch=" << report.batch << " warmup=" << report.warmup_iterations
     << " measured=" << report.measured_iterations << " (per-element ns)\n";
  os << std::left << std::setw(16) << "op" << std::setw(14) << "sampler" << std::right << std::setw(10) << "N"
     << std::setw(12) << "mean" << std::setw(12) << "p50" << std::setw(12) << "p99" << '\n';
  os << std::fixed << std::setprecision(2);
  for (const auto& r : report.rows) {
    os << std::left << std::setw(16) << r.op << std::setw(14) << r.sampler << std::right << std::setw(10)
       << r.buffer_size << std::setw(12) << r.mean_ns << std::setw(12) << r.p50_ns << std::setw(12) << r.p99_ns
       << '\n';
  }
}

/// Least-squares residuals of latency against c * log(N) and against a
/// constant; the first is smaller for logarithmic growth.
struct GrowthFit {
  double log_residual = 0.0;
  double const_residual = 0.0;
};

inline GrowthFit fit_growth(const std::vector<std::size_t>& sizes, const std::vector<double>& latency) {
  double sxy = 0.0, sxx = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    sxy += x * latency[i];
    sxx += x * x;
    mean += latency[i];
  }
  mean /= static_cast<double>(sizes.size());
  const double c = sxy / sxx;
  GrowthFit fit;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    fit.log_residual += (latency[i] - c * x) * (latency[i] - c * x);
    fit.const_residual += (latency[i] - mean) * (latency[i] - mean);
  }
  return fit;
}

}  // namespace tgreplay::bench
