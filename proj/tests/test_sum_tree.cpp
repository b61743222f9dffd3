#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tgreplay/pmf.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/sum_tree.hpp"

using namespace tgreplay;

namespace {

double worst_internal_error(const SumTree& t) {
  const auto& nodes = t.nodes();
  double worst = 0.0;
  for (std::size_t i = 1; i < t.leaf_count(); ++i) {
    const double kids = nodes[2 * i] + nodes[2 * i + 1];
    const double scale = std::max(std::abs(kids), 1e-300);
    worst = std::max(worst, std::abs(nodes[i] - kids) / scale);
  }
  return worst;
}

}  // namespace

TEST(SumTree, LeafCountIsPowerOfTwo) {
  SumTree t(5);
  EXPECT_EQ(t.leaf_count(), 8u);
  EXPECT_EQ(t.capacity(), 5u);
  EXPECT_EQ(t.nodes().size(), 16u);
  EXPECT_THROW(SumTree(0), ParameterError);
}

TEST(SumTree, UniformPriorities) {
  SumTree t(4);
  for (std::size_t i = 0; i < 4; ++i) t.set(i, 1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    auto d = per_sample(t, (i + 0.5) / 4);
    EXPECT_EQ(d.index, i);
    EXPECT_DOUBLE_EQ(d.probability, 0.25);
  }
}

TEST(SumTree, PrefixWalk) {
  SumTree t(4);
  const double pr[] = {0, 0, 3, 1};
  for (std::size_t i = 0; i < 4; ++i) t.set(i, pr[i]);
  EXPECT_EQ(per_sample(t, 0.5).index, 2u);
  EXPECT_EQ(per_sample(t, 0.0).index, 2u);
  EXPECT_EQ(per_sample(t, 0.76).index, 3u);
}

TEST(SumTree, ZeroMassLeafNeverSampled) {
  SumTree t(4);
  const double pr[] = {0, 0, 3, 1};
  for (std::size_t i = 0; i < 4; ++i) t.set(i, pr[i]);
  t.set(2, 0.0);
  Rng rng(2);
  for (int d = 0; d < 10000; ++d) ASSERT_EQ(per_sample(t, uniform01(rng)).index, 3u);
  EXPECT_EQ(per_sample(t, std::nextafter(1.0, 0.0)).index, 3u);
}

TEST(SumTree, AllZeroIsSamplingError) {
  SumTree t(4);
  EXPECT_THROW(per_sample(t, 0.3), SamplingError);
}

TEST(SumTree, SetErrors) {
  SumTree t(4);
  EXPECT_THROW(t.set(4, 1.0), IndexError);
  EXPECT_THROW(t.set(0, -1.0), InputError);
  EXPECT_THROW(t.set(0, std::nan("")), InputError);
}

TEST(PerUpdate, PriorityFloorAndExponentZero) {
  SumTree t(2);
  per_update(t, 0, 0.0, 0.6, 1e-6);
  EXPECT_DOUBLE_EQ(t.get(0), std::pow(1e-6, 0.6));
  per_update(t, 1, -123.0, 0.0, 1e-6);
  EXPECT_DOUBLE_EQ(t.get(1), 1.0);
  EXPECT_THROW(per_update(t, 0, INFINITY, 0.6, 1e-6), InputError);
}

TEST(PerUpdate, RootMovesByDelta) {
  SumTree t(8);
  for (std::size_t i = 0; i < 8; ++i) t.set(i, 0.5 + i);
  const double before = t.total(), old = t.get(5);
  per_update(t, 5, 2.0, 0.6, 1e-6);
  EXPECT_NEAR(t.total() - before, t.get(5) - old, 1e-12);
}

TEST(SumTree, ConsistentAfterManyUpdates) {
  const std::size_t n = 1000;
  SumTree t(n);
  std::vector<double> flat(n, 0.0);
  Rng rng(9);
  for (int u = 0; u < 100000; ++u) {
    const std::size_t i = rng() % n;
    const double v = uniform01(rng) * std::exp2(static_cast<double>(rng() % 40) - 20.0);
    t.set(i, v);
    flat[i] = v;
  }
  EXPECT_LE(worst_internal_error(t), 1e-9);
  const double s = compensated_sum(flat);
  EXPECT_LE(std::abs(t.total() - s) / s, 1e-9);
  double m = 0.0;
  for (double v : flat) m = std::max(m, v);
  EXPECT_DOUBLE_EQ(t.max_priority(), m);
}

TEST(SumTree, EmpiricalFrequenciesMatchPriorities) {
  for (std::size_t n : {1u, 5u, 64u}) {
    SumTree t(n);
    Rng rng(n);
    std::vector<double> pr(n);
    for (std::size_t i = 0; i < n; ++i) t.set(i, pr[i] = 0.1 + uniform01(rng));
    std::vector<std::size_t> counts(n, 0);
    for (int d = 0; d < 1000000; ++d) ++counts[per_sample(t, uniform01(rng)).index];
    auto target = Pmf::from_weights(pr);
    EXPECT_LT(total_variation(frequencies(counts), target.probs()), 0.01);
  }
}
