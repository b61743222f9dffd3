#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tgreplay/bench.hpp"
#include "tgreplay/distributions.hpp"
#include "tgreplay/error.hpp"
#include "tgreplay/frontier.hpp"
#include "tgreplay/harness/config.hpp"
#include "tgreplay/harness/experiment.hpp"
#include "tgreplay/metrics.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/sampler.hpp"
#include "tgreplay/stats.hpp"
#include "tgreplay/trunc_geom.hpp"

namespace tgreplay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::size_t kMaxDistN = 10'000'000;
inline constexpr std::size_t kMaxValidateN = 10'000;
inline constexpr double kValidateTvThreshold = 0.01;

inline constexpr const char* kSchemas = R"(CSV schemas:
  dist       '# key=value ...' summary line, then index,probability,rho
  frontier   mu,entropy_nats
             series,mu,entropy_nats  with --overlay (series = frontier or a sampler name)
  bench      op,sampler,buffer_size,mean_ns,p50_ns,p99_ns
  sweep      sampler,utd,batch,seed,auc,final_return
             --summary: sampler,utd,batch,replay_volume,seeds,mean_auc,ci_lo,ci_hi,gain
  validate   sampler,n,draws,tv,chi2,dof,p_value,status
Exit codes: 0 success, 1 validation failure, 2 usage or input error.)";

inline std::string fmt(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

/// Emits rows as CSV immediately, or buffers them to print an aligned table.
class RowWriter {
 public:
  RowWriter(std::ostream& os, bool table, std::vector<std::string> header)
      : os_(os), table_(table), header_(std::move(header)) {
    if (!table_) write_csv(header_);
  }
  RowWriter(const RowWriter&) = delete;
  RowWriter& operator=(const RowWriter&) = delete;
  ~RowWriter() { finish(); }

  void row(std::vector<std::string> cells) {
    if (table_) {
      rows_.push_back(std::move(cells));
    } else {
      write_csv(cells);
    }
  }

  void finish() {
    if (!table_ || done_) return;
    done_ = true;
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) width[c] = header_[c].size();
    for (const auto& r : rows_) {
      for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) os_ << "  ";
        os_ << std::setw(static_cast<int>(width[c])) << r[c];
      }
      os_ << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
  }

 private:
  void write_csv(const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) os_ << (c ? "," : "") << cells[c];
    os_ << '\n';
  }

  std::ostream& os_;
  bool table_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  bool done_ = false;
};

struct SharedFlags {
  std::string out;
  std::uint64_t seed = 0;
  std::string format = "csv";
};

struct SamplerFlags {
  std::string sampler = "truncgeom";
  SamplerSpec spec;

  void add_to(CLI::App& app) {
    app.add_option("--sampler", sampler,
                   "uniform|truncgeom|ere|per|uniform_fifo|linear|reverse_linear|gaussian|reverse_truncgeom")
        ->capture_default_str();
    app.add_option("--alpha", spec.alpha, "truncated geometric recency strength")->capture_default_str();
    app.add_option("--eta", spec.eta, "ERE decay")->capture_default_str();
    app.add_option("--ere-cycle", spec.ere_updates_per_cycle, "ERE updates per cycle")->capture_default_str();
    app.add_option("--c-min", spec.c_min, "ERE minimum window")->capture_default_str();
    app.add_option("--fifo-window", spec.fifo_window, "uniform FIFO window")->capture_default_str();
    app.add_option("--per-exponent", spec.per_exponent, "PER priority exponent")->capture_default_str();
    app.add_option("--ratio-exponent", spec.ratio_exponent, "ablation max/min weight ratio as a power of two")
        ->capture_default_str();
  }

  SamplerSpec resolve() const {
    SamplerSpec s = spec;
    s.kind = parse_sampler_kind(sampler);
    s.validate();
    return s;
  }
};

/// Sampler over a buffer holding n of n_max entries; PER entries all carry
/// the insertion priority.
inline Sampler make_sampler(const SamplerSpec& spec, std::size_t n, std::size_t n_max) {
  Sampler sampler(spec, n_max);
  if (spec.kind == SamplerKind::PER) {
    for (std::size_t i = 1; i <= n; ++i) sampler.on_push(BufferState{i, n_max, 0});
  }
  return sampler;
}

inline void check_sizes(std::size_t n, std::size_t& n_max, std::size_t limit, const char* what) {
  if (n == 0) throw ParameterError(std::string(what) + ": --n must be positive");
  if (n > limit) throw ParameterError(std::string(what) + ": --n must be at most " + std::to_string(limit));
  if (n_max == 0) n_max = std::max<std::size_t>(n, 2);
  if (n_max < n) throw ParameterError(std::string(what) + ": --n-max must be >= --n");
}

inline void cmd_dist(std::ostream& os, bool table, const SamplerFlags& flags, std::size_t n, std::size_t n_max) {
  check_sizes(n, n_max, kMaxDistN, "dist");
  const SamplerSpec spec = flags.resolve();
  Sampler sampler = make_sampler(spec, n, n_max);
  const BufferState state{n, n_max, 0};
  const Pmf p = sampler.pmf(state);
  os << "# sampler=" << to_string(spec.kind) << " n=" << n << " n_max=" << n_max
     << " mu=" << fmt(expected_recency(p)) << " entropy_nats=" << fmt(sampling_entropy(p))
     << " perplexity=" << fmt(perplexity(p));
  if (spec.kind == SamplerKind::ERE) {
    const auto s = sampling_summary(sampler, state);
    os << " update_entropy_nats=" << fmt(s.entropy_nats);
  }
  os << '\n';
  RowWriter w(os, table, {"index", "probability", "rho"});
  for (std::size_t i = 0; i < n; ++i) w.row({std::to_string(i), fmt(p[i]), fmt(normalized_recency(i, n))});
}

inline void cmd_frontier(std::ostream& os, bool table, const SamplerFlags& flags, std::size_t n,
                         std::size_t intervals, const std::vector<std::string>& overlay) {
  if (intervals < 2) throw ParameterError("frontier: --intervals must be at least 2");
  const auto grid = default_mu_grid(intervals);
  const FrontierCurve curve = frontier(n, grid);
  if (overlay.empty()) {
    RowWriter w(os, table, {"mu", "entropy_nats"});
    for (const auto& pt : curve.points) w.row({fmt(pt.mu), fmt(pt.max_entropy_nats)});
    return;
  }
  RowWriter w(os, table, {"series", "mu", "entropy_nats"});
  for (const auto& pt : curve.points) w.row({"frontier", fmt(pt.mu), fmt(pt.max_entropy_nats)});
  for (const auto& name : overlay) {
    SamplerSpec spec = flags.spec;
    spec.kind = parse_sampler_kind(name);
    spec.validate();
    Sampler sampler = make_sampler(spec, n, n);
    const auto s = sampling_summary(sampler, BufferState{n, n, 0});
    w.row({std::string(to_string(spec.kind)), fmt(s.mu), fmt(s.entropy_nats)});
  }
}

inline void cmd_bench(std::ostream& os, bool table, bench::BenchOptions opt, const std::vector<std::string>& samplers) {
  if (opt.iterations < bench::kMinIterations) {
    throw ParameterError("bench: --iterations must be at least " + std::to_string(bench::kMinIterations));
  }
  if (opt.batch == 0) throw ParameterError("bench: --batch must be positive");
  if (opt.sizes.empty() || !std::is_sorted(opt.sizes.begin(), opt.sizes.end()) || opt.sizes.front() < 2) {
    throw ParameterError("bench: --sizes must be ascending and at least 2");
  }
  opt.samplers.clear();
  for (const auto& s : samplers) opt.samplers.push_back(parse_sampler_kind(s));
  const auto report = bench::bench_samplers(opt);
  if (table) {
    bench::write_report_table(os, report);
  } else {
    bench::write_report_csv(os, report);
  }
}

struct SweepFlags {
  std::string config;
  std::optional<std::size_t> seeds;
  std::optional<unsigned> threads;
  std::string summary;
};

/// Run seeds are the config's seed list (or 0..N-1 with --seeds N), each
/// offset by --seed.
inline std::vector<harness::SweepRow> cmd_sweep(std::ostream& os, bool table, const SweepFlags& flags,
                                                std::uint64_t seed_base) {
  harness::SweepConfig cfg = harness::load_sweep_config(flags.config);
  if (flags.seeds) {
    if (*flags.seeds == 0) throw ParameterError("sweep: --seeds must be positive");
    cfg.base.seeds.resize(*flags.seeds);
    for (std::size_t i = 0; i < *flags.seeds; ++i) cfg.base.seeds[i] = i;
  }
  for (auto& s : cfg.base.seeds) s += seed_base;
  if (flags.threads) cfg.threads = std::max(1u, *flags.threads);
  const auto rows = harness::sweep(cfg.cells(), cfg.threads);
  RowWriter w(os, table, {"sampler", "utd", "batch", "seed", "auc", "final_return"});
  for (const auto& r : rows) {
    w.row({r.sampler, r.utd.str(), std::to_string(r.batch_size), std::to_string(r.seed), fmt(r.auc),
           fmt(r.final_return)});
  }
  w.finish();
  if (!flags.summary.empty()) {
    std::ofstream sum(flags.summary);
    if (!sum) throw InputError("cannot open summary file '" + flags.summary + "'");
    harness::write_summary_csv(sum, harness::summarize(rows, seed_base));
  }
  return rows;
}

struct ValidateResult {
  double tv = 0.0;
  stats::ChiSquareResult chi2;
  bool pass = true;
};

/// Draws from the sampler and compares the empirical frequencies with the
/// sampler's own pmf, or with a truncated geometric pmf of another alpha.
/// ERE advances its cycle once per draw so the reference is the cycle mixture.
inline ValidateResult cmd_validate(std::ostream& os, bool table, const SamplerFlags& flags, std::size_t n,
                                   std::size_t n_max, std::size_t draws, std::optional<double> oracle_alpha,
                                   std::uint64_t seed) {
  check_sizes(n, n_max, kMaxValidateN, "validate");
  if (draws == 0) throw ParameterError("validate: --draws must be positive");
  const SamplerSpec spec = flags.resolve();
  Sampler sampler = make_sampler(spec, n, n_max);
  const BufferState state{n, n_max, 0};
  const Pmf reference = oracle_alpha ? trunc_geom_pmf(n, n_max, *oracle_alpha) : sampler.pmf(state);

  Rng rng(seed);
  std::vector<std::size_t> counts(n, 0);
  SampleBatch batch;
  const std::size_t chunk = spec.kind == SamplerKind::ERE ? 1 : 256;
  for (std::size_t done = 0; done < draws;) {
    const std::size_t b = std::min(chunk, draws - done);
    const StepContext ctx = sampler.next_context();
    sampler.sample_into(state, b, rng, ctx, batch);
    for (auto i : batch.indices) ++counts[i];
    done += b;
  }

  ValidateResult r;
  r.tv = total_variation(frequencies(counts), reference.probs());
  r.chi2 = stats::chi_square_gof(counts, reference.probs());
  r.pass = r.tv < kValidateTvThreshold;
  RowWriter w(os, table, {"sampler", "n", "draws", "tv", "chi2", "dof", "p_value", "status"});
  w.row({std::string(to_string(spec.kind)), std::to_string(n), std::to_string(draws), fmt(r.tv),
         fmt(r.chi2.statistic), fmt(r.chi2.dof), fmt(r.chi2.p_value), r.pass ? "pass" : "fail"});
  return r;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Replay sampling toolkit: distributions, frontier, latency benchmarks and sweeps.", "tgreplay"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  SharedFlags shared;
  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--out", shared.out, "write output to this path instead of stdout");
    sub->add_option("--seed", shared.seed, "RNG seed")->capture_default_str();
    sub->add_option("--format", shared.format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}))
        ->capture_default_str();
  };

  SamplerFlags dist_flags;
  std::size_t dist_n = 0, dist_n_max = 0;
  auto* dist = app.add_subcommand("dist", "pmf of a sampler over buffer indices, with mu and entropy");
  dist_flags.add_to(*dist);
  dist->add_option("--n", dist_n, "entries currently stored")->required();
  dist->add_option("--n-max", dist_n_max, "buffer capacity (default: max(n, 2))");
  add_shared(dist);

  SamplerFlags frontier_flags;
  std::size_t frontier_n = 1000, intervals = 100;
  std::vector<std::string> overlay;
  auto* front = app.add_subcommand("frontier", "maximum-entropy frontier over expected recency");
  frontier_flags.add_to(*front);
  front->add_option("--n", frontier_n, "buffer size")->capture_default_str();
  front->add_option("--intervals", intervals, "mu grid spacing 1/intervals")->capture_default_str();
  front->add_option("--overlay", overlay, "samplers to add as (mu, entropy) points")->delimiter(',');
  add_shared(front);

  bench::BenchOptions bench_opt;
  std::vector<std::string> bench_samplers{"uniform", "truncgeom", "per"};
  auto* bench_cmd = app.add_subcommand("bench", "sampling, priority update and insert latency");
  bench_cmd->add_option("--sizes", bench_opt.sizes, "buffer sizes, ascending")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--samplers", bench_samplers, "samplers to time")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--batch", bench_opt.batch, "draws per timed call")->capture_default_str();
  bench_cmd->add_option("--iterations", bench_opt.iterations, "timed operations per cell (>= 100000)")
      ->capture_default_str();
  add_shared(bench_cmd);

  SweepFlags sweep_flags;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a sampler x utd x batch grid on the toy environments");
  sweep_cmd->add_option("config", sweep_flags.config, "sweep config file (key = value)")->required();
  sweep_cmd->add_option("--seeds", sweep_flags.seeds, "use seeds 0..N-1 instead of the config list");
  sweep_cmd->add_option("--threads", sweep_flags.threads, "worker threads per cell");
  sweep_cmd->add_option("--summary", sweep_flags.summary, "also write per-cell summary CSV here");
  add_shared(sweep_cmd);

  SamplerFlags validate_flags;
  std::size_t validate_n = 100, validate_n_max = 0, draws = 1'000'000;
  std::optional<double> oracle_alpha;
  auto* validate = app.add_subcommand("validate", "goodness of fit of sampled indices against the exact pmf");
  validate_flags.add_to(*validate);
  validate->add_option("--n", validate_n, "entries currently stored (<= 10000)")->capture_default_str();
  validate->add_option("--n-max", validate_n_max, "buffer capacity (default: max(n, 2))");
  validate->add_option("--draws", draws, "number of sampled indices")->capture_default_str();
  validate->add_option("--oracle-alpha", oracle_alpha, "compare against a truncated geometric pmf with this alpha");
  add_shared(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::ofstream file;
    if (!shared.out.empty()) {
      file.open(shared.out);
      if (!file) throw InputError("cannot open output file '" + shared.out + "'");
    }
    std::ostream& os = shared.out.empty() ? out : file;
    const bool table = shared.format == "table";
    int status = kExitOk;
    if (*dist) {
      cmd_dist(os, table, dist_flags, dist_n, dist_n_max);
    } else if (*front) {
      cmd_frontier(os, table, frontier_flags, frontier_n, intervals, overlay);
    } else if (*bench_cmd) {
      bench_opt.seed = shared.seed;
      cmd_bench(os, table, bench_opt, bench_samplers);
    } else if (*sweep_cmd) {
      cmd_sweep(os, table, sweep_flags, shared.seed);
    } else if (*validate) {
      auto r = cmd_validate(os, table, validate_flags, validate_n, validate_n_max, draws, oracle_alpha, shared.seed);
      if (!r.pass) status = kExitValidationFailure;
    }
    os.flush();
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace tgreplay::cli
