// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "tgreplay/bench.hpp"
#include "tgreplay/distributions.hpp"
#include "tgreplay/exposure.hpp"
#include "tgreplay/frontier.hpp"
#include "tgreplay/harness/config.hpp"
#include "tgreplay/harness/experiment.hpp"
#include "tgreplay/metrics.hpp"
#include "tgreplay/multitask.hpp"
#include "tgreplay/pmf.hpp"
#include "tgreplay/stats.hpp"
#include "tgreplay/sum_tree.hpp"
#include "tgreplay/trunc_geom.hpp"

using namespace tgreplay;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "; failed: ";
      else detail << ", ";
      detail << what;
      pass = false;
    }
  }
};

unsigned worker_count() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

std::vector<double> brute_pmf(std::size_t n, std::size_t n_max, double alpha) {
  const long double k = static_cast<long double>(alpha) / static_cast<long double>(n_max - 1);
  std::vector<long double> w(n);
  long double z = 0;
  for (std::size_t i = 0; i < n; ++i) z += (w[i] = std::pow(2.0L, k * static_cast<long double>(i)));
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(w[i] / z);
  return p;
}

void criterion_1(Verdict& v) {
  constexpr std::size_t kGrid = 100000;
  const double alphas[] = {0.1, 1.0, 3.0, 10.0, 100.0};
  std::atomic<std::size_t> next{2};
  std::atomic<std::size_t> cases{0};
  std::vector<double> worst(65, 0.0);
  auto work = [&] {
    std::vector<double> h;
    for (std::size_t n_max; (n_max = next++) <= 64;) {
      for (double alpha : alphas) {
        for (std::size_t n = 1; n <= n_max; ++n) {
          h.assign(n, 0.0);
          for (std::size_t g = 0; g < kGrid; ++g) {
            const double u = (static_cast<double>(g) + 0.5) / static_cast<double>(kGrid);
            h[trunc_geom_sample(u, n, n_max, alpha)] += 1.0;
          }
          const auto p = brute_pmf(n, n_max, alpha);
          for (std::size_t i = 0; i < n; ++i) {
            worst[n_max] = std::max(worst[n_max], std::abs(h[i] / static_cast<double>(kGrid) - p[i]));
          }
          ++cases;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < worker_count(); ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  const double max_err = *std::max_element(worst.begin(), worst.end());
  v.detail << cases.load() << " (n, n_max, alpha) cases, max per-index error " << max_err;
  v.require(max_err < 2e-5, "error >= 2e-5");
}

void criterion_2(Verdict& v) {
  const double mu_tg = expected_recency(trunc_geom_pmf(1000000, 1000000, 10.0));
  const double mu_u = expected_recency(uniform_pmf(1000000));
  v.detail << "mu(truncgeom) = " << mu_tg << ", mu(uniform) = " << mu_u;
  v.require(std::abs(mu_tg - 0.857) <= 0.001, "truncgeom mu");
  v.require(mu_u == 0.5, "uniform mu not exactly 0.5");
}

void criterion_3(Verdict& v) {
  const auto tg = trunc_geom_pmf(1000000, 1000000, 10.0);
  const auto fifo = uniform_fifo_pmf(1000000, 288000);
  const double dmu = std::abs(expected_recency(tg) - expected_recency(fifo));
  const double dh = sampling_entropy(tg) - sampling_entropy(fifo);
  v.detail << "|dmu| = " << dmu << ", H(truncgeom) - H(fifo) = " << dh;
  v.require(dmu <= 0.002, "mu mismatch");
  v.require(dh > 0.0, "entropy ordering");
}

void criterion_4(Verdict& v) {
  const std::size_t n = 16;
  double worst = 0.0;
  for (double mu : {0.55, 0.65, 0.75, 0.85, 0.95}) {
    const auto o = oracle::max_entropy(n, mu);
    v.require(o.mean_residual < 1e-12 && o.kkt_residual < 1e-9, "oracle did not converge");
    worst = std::max(worst, std::abs(max_entropy_point(n, mu).max_entropy_nats - o.entropy));
  }
  v.detail << "max |frontier - oracle| = " << worst;
  v.require(worst < 1e-6, "frontier mismatch");

  double max_excess = -INFINITY;
  std::size_t checked = 0;
  for (auto kind : {SamplerKind::Uniform, SamplerKind::TruncGeom, SamplerKind::ERE, SamplerKind::PER,
                    SamplerKind::UniformFIFO, SamplerKind::Linear, SamplerKind::ReverseLinear, SamplerKind::Gaussian,
                    SamplerKind::ReverseTruncGeom}) {
    for (std::size_t size : {std::size_t{2}, std::size_t{7}, n}) {
      SamplerSpec spec;
      spec.kind = kind;
      spec.fifo_window = 5;
      spec.c_min = 3;
      spec.eta = 0.99;
      Sampler sampler(spec, size);
      RingBuffer<int> buffer(size);
      Rng rng(size);
      for (std::size_t i = 0; i < size; ++i) {
        buffer.push(0);
        sampler.on_push(buffer.state());
      }
      if (kind == SamplerKind::PER) {
        std::vector<std::size_t> idx(size);
        std::vector<double> td(size);
        for (std::size_t i = 0; i < size; ++i) {
          idx[i] = i;
          td[i] = uniform01(rng);
        }
        sampler.update_priorities(buffer.state(), idx, td);
      }
      const auto s = sampling_summary(sampler, buffer.state());
      const double mu = std::clamp(s.mu, 1e-9, 1.0 - 1e-9);
      max_excess = std::max(max_excess, s.entropy_nats - max_entropy_point(size, mu).max_entropy_nats);
      ++checked;
    }
  }
  v.detail << ", " << checked << " sampler pmfs, max excess over frontier " << max_excess;
  v.require(max_excess <= 1e-9, "sampler above frontier");
}

void criterion_5(Verdict& v) {
  const auto p = trunc_geom_pmf(1000000, 1000000, 10.0);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t j = 1; j <= 10; ++j) {
    const std::size_t i = j * 80000;
    const double r = p[i + 100000] / p[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  v.detail << "ratio range [" << lo << ", " << hi << "] over 10 points";
  v.require(lo >= 1.999 && hi <= 2.001, "ratio out of [1.999, 2.001]");
}

void criterion_6(Verdict& v) {
  bench::BenchOptions opt;
  opt.iterations = bench::kMinIterations;
  const auto report = bench::bench_samplers(opt);
  std::vector<double> tg, per;
  double worst_vs_uniform = 0.0;
  for (auto n : opt.sizes) {
    const double t = report.find("sample", "truncgeom", n)->mean_ns;
    const double u = report.find("sample", "uniform", n)->mean_ns;
    tg.push_back(t);
    per.push_back(report.find("sample", "per", n)->mean_ns);
    worst_vs_uniform = std::max(worst_vs_uniform, t / u);
  }
  const double tg_spread = *std::max_element(tg.begin(), tg.end()) / *std::min_element(tg.begin(), tg.end());
  const auto growth = bench::fit_growth(opt.sizes, per);
  v.detail << "truncgeom max/min across sizes " << tg_spread << ", worst truncgeom/uniform " << worst_vs_uniform
           << ", per ns " << per.front() << " -> " << per.back() << ", truncgeom ns at 1e6 " << tg.back();
  v.require(tg_spread <= 2.0, "truncgeom latency spread > 2x");
  v.require(worst_vs_uniform <= 1.5, "truncgeom > 1.5x uniform");
  v.require(per.back() > tg.back(), "per not slower than truncgeom at 1e6");
  v.require(per.back() >= 1.5 * per.front(), "per does not grow with N");
  v.require(growth.log_residual < growth.const_residual, "per growth not better explained by log N");
}

void criterion_7(Verdict& v) {
  const std::size_t sizes[] = {5, 17, 40, 64};
  const std::size_t capacity = 64;
  SamplerSpec spec;
  spec.kind = SamplerKind::TruncGeom;
  MultiTaskBuffer<int> mt(4, capacity, spec);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t i = 0; i < sizes[j]; ++i) mt.push(j, 0);
  }
  Rng rng(7);
  constexpr std::size_t kDraws = 1000000;
  std::vector<std::vector<std::size_t>> counts(4);
  for (std::size_t j = 0; j < 4; ++j) counts[j].assign(sizes[j], 0);
  for (const auto& d : mt.sample_indices(kDraws, rng)) ++counts[d.task][d.index];
  double tv = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    const auto p = trunc_geom_pmf(sizes[j], capacity, spec.alpha);
    for (std::size_t i = 0; i < sizes[j]; ++i) {
      tv += std::abs(static_cast<double>(counts[j][i]) / kDraws - p[i] / 4.0);
    }
  }
  tv /= 2.0;
  v.detail << "joint TV = " << tv << " over " << kDraws << " draws";
  v.require(tv < 0.01, "TV >= 0.01");
}

void criterion_8(Verdict& v) {
  auto cfg = harness::load_sweep_config(TGREPLAY_SOURCE_DIR "/configs/example_sweep.cfg");
  v.require(cfg.base.seeds.size() == 20, "config must list 20 seeds");
  v.require(cfg.base.env.kind == harness::EnvKind::DriftingChain, "config must use the drifting chain");
  const auto rows = harness::sweep(cfg.cells(), worker_count());
  std::vector<double> volumes, gains;
  for (auto b : cfg.batch_sizes) {
    std::vector<double> tg, un;
    for (const auto& r : rows) {
      if (r.batch_size != b) continue;
      (r.sampler == "truncgeom" ? tg : un).push_back(r.auc);
    }
    const double volume = cfg.utds.front().value() * static_cast<double>(b);
    const double gain = stats::mean(tg) / stats::mean(un) - 1.0;
    const auto t = stats::paired_t_test_greater(tg, un);
    volumes.push_back(volume);
    gains.push_back(gain);
    v.detail << "volume " << volume << ": gain " << gain << " p " << t.p_greater << "; ";
    if (volume <= 4.0) v.require(gain > 0.0 && t.p_greater < 0.05, "no significant gain at volume " + std::to_string(volume));
  }
  const double rho = stats::spearman(volumes, gains);
  v.detail << "spearman " << rho;
  v.require(rho < 0.0, "gain not decreasing in replay volume");
}

void criterion_9(Verdict& v) {
  const std::size_t n = 1000000, K = 1000, c_min = SamplerSpec{}.c_min;
  for (std::size_t k : {1u, 500u, 1000u}) {
    const long double direct =
        std::round(static_cast<long double>(n) * std::pow(0.996L, 1000.0L * k / static_cast<long double>(K)));
    const auto expect = std::max<std::size_t>(c_min, static_cast<std::size_t>(direct));
    const auto got = ere_window(k, n, 0.996, c_min, K);
    v.detail << "c_" << k << " = " << got << " ";
    v.require(got == expect, "c_" + std::to_string(k) + " != " + std::to_string(expect));
  }
  v.require(ere_window(1, n, 0.996, c_min, K) == 996000, "c_1 != 996000");
  v.require(ere_window(1000, n, 0.996, 1, K) == 18169, "raw c_1000 != 18169");
}

void criterion_10(Verdict& v) {
  SumTree tree(100000);
  Rng rng(10);
  for (int i = 0; i < 100000; ++i) {
    const auto slot = static_cast<std::size_t>(uniform01(rng) * 100000.0);
    tree.set(std::min<std::size_t>(slot, 99999), std::pow(10.0, 6.0 * uniform01(rng) - 3.0));
  }
  const auto& nodes = tree.nodes();
  double worst = 0.0;
  for (std::size_t i = 1; i < tree.leaf_count(); ++i) {
    const double kids = nodes[2 * i] + nodes[2 * i + 1];
    worst = std::max(worst, std::abs(nodes[i] - kids) / std::max(std::abs(kids), 1e-300));
  }
  long double leaves = 0;
  for (std::size_t i = 0; i < tree.capacity(); ++i) leaves += tree.get(i);
  const double root_err = static_cast<double>(std::abs(static_cast<long double>(tree.total()) - leaves) / leaves);
  v.detail << "sum tree max relative error " << std::max(worst, root_err);
  v.require(worst <= 1e-9 && root_err <= 1e-9, "sum tree inconsistent");

  std::size_t runs = 0;
  for (auto kind : {SamplerKind::Uniform, SamplerKind::TruncGeom, SamplerKind::ERE, SamplerKind::PER,
                    SamplerKind::UniformFIFO}) {
    for (auto utd : {harness::Rational{1, 4}, harness::Rational{1, 1}, harness::Rational{3, 2}}) {
      for (std::size_t batch : {1u, 16u}) {
        harness::ExperimentConfig cfg;
        cfg.sampler.kind = kind;
        cfg.sampler.fifo_window = 200;
        cfg.utd = utd;
        cfg.batch_size = batch;
        cfg.total_env_steps = 2000;
        cfg.eval_every = 500;
        cfg.buffer_capacity = 800;
        const auto r = harness::run_experiment(cfg, runs);
        long double volume = 0;
        for (const auto& m : r.metrics) volume += m.replay_volume;
        v.require(std::abs(static_cast<long double>(r.exposure.total_replayed) - volume) < 1e-6L,
                  "exposure mismatch in run " + std::to_string(runs));
        ++runs;
      }
    }
  }
  v.detail << ", exposure = sum of replay volume in " << runs << " runs";

  const double auc = normalized_auc(std::vector<double>{0.0, 0.5, 1.0, 0.25});
  v.require(auc == 0.4375, "normalized_auc");
  const double h1 = normalize_score(351.19, 2.377, 700.0);
  v.detail << ", h1-walk score " << h1;
  v.require(std::abs(h1 - (351.19 - 2.377) / (700.0 - 2.377)) < 1e-15 && std::abs(h1 - 0.5) < 1e-4, "h1-walk");
  v.require(normalize_score(2.377, 2.377, 700.0) == 0.0 && normalize_score(700.0, 2.377, 700.0) == 1.0,
            "normalize_score endpoints");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria{
      {"truncated geometric sampler matches brute-force pmf on a u-grid", criterion_1},
      {"mu of truncgeom(alpha=10, n=1e6) and uniform", criterion_2},
      {"matched-mu uniform FIFO window has lower entropy", criterion_3},
      {"max-entropy frontier vs oracle; samplers on or below", criterion_4},
      {"alpha doubling over 1e5 indices", criterion_5},
      {"sampling latency ratios", criterion_6},
      {"multi-task joint law factorizes", criterion_7},
      {"drifting chain gain over uniform shrinks with replay volume", criterion_8},
      {"ERE window schedule", criterion_9},
      {"accounting invariants", criterion_10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %zu: %s (%s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.str().c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
