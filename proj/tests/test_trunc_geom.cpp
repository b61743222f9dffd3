#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tgreplay/metrics.hpp"
#include "tgreplay/random.hpp"
#include "tgreplay/trunc_geom.hpp"
#include "tgreplay/vector_log.hpp"

using namespace tgreplay;

namespace {

// Independent oracle: normalize 2^{k i} in long double.
std::vector<double> brute_pmf(std::size_t n, std::size_t n_max, double alpha) {
  const long double k = static_cast<long double>(alpha) / static_cast<long double>(n_max - 1);
  std::vector<long double> w(n);
  long double z = 0;
  for (std::size_t i = 0; i < n; ++i) z += (w[i] = std::pow(2.0L, k * static_cast<long double>(i)));
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(w[i] / z);
  return p;
}

std::vector<double> grid_histogram(std::size_t n, std::size_t n_max, double alpha, std::size_t points) {
  std::vector<double> h(n, 0.0);
  TruncGeomInverse inv(n, n_max, alpha);
  for (std::size_t g = 0; g < points; ++g) {
    const double u = (static_cast<double>(g) + 0.5) / static_cast<double>(points);
    h[inv(u)] += 1.0 / static_cast<double>(points);
  }
  return h;
}

}  // namespace

TEST(TruncGeomSample, LowerBoundary) {
  EXPECT_EQ(trunc_geom_sample(0.0, 10, 10, 3.0), 0u);
  EXPECT_EQ(trunc_geom_sample(0.0, 1000, 1000, 10.0), 0u);
}

TEST(TruncGeomSample, UpperBoundary) {
  const double u = std::nextafter(1.0, 0.0);
  for (double alpha : {0.1, 1.0, 10.0, 100.0, 1024.0}) {
    EXPECT_EQ(trunc_geom_sample(u, 64, 64, alpha), 63u) << alpha;
    EXPECT_EQ(trunc_geom_sample(u, 30, 64, alpha), 29u) << alpha;
  }
}

TEST(TruncGeomSample, FourIndexPreimages) {
  auto h = grid_histogram(4, 4, 3.0, 150000);
  const double expect[] = {1.0 / 15, 2.0 / 15, 4.0 / 15, 8.0 / 15};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(h[i], expect[i], 1e-5);
}

TEST(TruncGeomSample, ExactBreakpointsResolveDownward) {
  // Weights 1,2,4,8: F(0) = 1/15 exactly separates indices 0 and 1.
  TruncGeomInverse inv(4, 4, 3.0);
  EXPECT_EQ(inv(std::nextafter(1.0 / 15.0, 0.0)), 0u);
  EXPECT_EQ(inv(3.0 / 15.0 + 1e-12), 2u);
}

TEST(TruncGeomSample, InputErrors) {
  EXPECT_THROW(trunc_geom_sample(1.0, 4, 4, 1.0), InputError);
  EXPECT_THROW(trunc_geom_sample(-0.1, 4, 4, 1.0), InputError);
  EXPECT_THROW(trunc_geom_sample(std::nan(""), 4, 4, 1.0), InputError);
  EXPECT_THROW(trunc_geom_sample(0.5, 4, 4, 0.0), ParameterError);
  EXPECT_THROW(trunc_geom_sample(0.5, 4, 4, -1.0), ParameterError);
  EXPECT_THROW(trunc_geom_sample(0.5, 5, 4, 1.0), ParameterError);
  EXPECT_THROW(trunc_geom_sample(0.5, 0, 4, 1.0), ParameterError);
  EXPECT_THROW(trunc_geom_sample(0.5, 1, 1, 1.0), ParameterError);
}

TEST(TruncGeomSample, GridMatchesBruteForce) {
  for (double alpha : {0.1, 1.0, 3.0, 10.0}) {
    for (std::size_t n_max : {2u, 7u, 33u, 64u}) {
      for (std::size_t n = 1; n <= n_max; n += (n < 4 ? 1 : 5)) {
        auto h = grid_histogram(n, n_max, alpha, 100000);
        auto p = brute_pmf(n, n_max, alpha);
        for (std::size_t i = 0; i < n; ++i) {
          ASSERT_LT(std::abs(h[i] - p[i]), 2e-5) << "alpha=" << alpha << " n=" << n << " n_max=" << n_max;
        }
      }
    }
  }
}

TEST(TruncGeomSample, MonotoneInU) {
  for (double alpha : {0.5, 10.0, 500.0}) {
    TruncGeomInverse inv(1000, 1000, alpha);
    std::size_t prev = 0;
    for (int g = 0; g < 20000; ++g) {
      const std::size_t i = inv(g / 20000.0);
      ASSERT_GE(i, prev);
      prev = i;
    }
  }
}

TEST(TruncGeomSample, LargeAlphaStaysFiniteAndInRange) {
  const std::size_t n_max = 1000000;
  for (double alpha : {60.0, 256.0, 1024.0}) {
    TruncGeomInverse inv(n_max, n_max, alpha);
    EXPECT_TRUE(inv.log_space());
    Rng rng(3);
    for (int d = 0; d < 10000; ++d) ASSERT_LT(inv(uniform01(rng)), n_max);
    EXPECT_EQ(inv(0.0), 0u);
    EXPECT_EQ(inv(std::nextafter(1.0, 0.0)), n_max - 1);
  }
}

TEST(TruncGeomSample, LogSpaceAgreesWithDirectForm) {
  // Just above the switch, compare against a long-double evaluation of the direct form.
  const std::size_t n = 100;
  const double alpha = 55.0;
  TruncGeomInverse inv(n, n, alpha);
  ASSERT_TRUE(inv.log_space());
  const long double k = static_cast<long double>(alpha) / (n - 1);
  std::size_t mismatches = 0;
  for (int g = 0; g < 10000; ++g) {
    const double u = (g + 0.5) / 10000.0;
    long double x = std::log2(1.0L + u * (std::pow(2.0L, k * n) - 1.0L)) / k;
    auto expect = std::min<std::size_t>(static_cast<std::size_t>(std::floor(x)), n - 1);
    if (inv(u) != expect) ++mismatches;
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(TruncGeomSample, BatchMatchesScalar) {
  for (double alpha : {1e-7, 0.1, 10.0, 300.0}) {
    for (std::size_t n : {1u, 3u, 1000u, 1000000u}) {
      TruncGeomInverse inv(n, 1000000, alpha);
      Rng rng(11);
      std::vector<double> u(1027);
      for (auto& x : u) x = uniform01(rng);
      u[0] = 0.0;
      u[1] = std::nextafter(1.0, 0.0);
      std::vector<std::size_t> batch(u.size());
      inv(u, batch);
      std::size_t off_by_one = 0;
      for (std::size_t b = 0; b < u.size(); ++b) {
        const std::size_t s = inv(u[b]);
        ASSERT_LT(batch[b], n);
        if (batch[b] != s) {
          ASSERT_EQ(batch[b] > s ? batch[b] - s : s - batch[b], 1u);
          ++off_by_one;
        }
      }
      // Vector and scalar logs differ by a few ulp; index disagreements are rare.
      EXPECT_LE(off_by_one, 2u) << "alpha=" << alpha << " n=" << n;
    }
  }
}

TEST(TruncGeomSample, BatchRejectsMismatchedSpans) {
  TruncGeomInverse inv(10, 10, 1.0);
  std::vector<double> u(3, 0.5);
  std::vector<std::size_t> out(2);
  EXPECT_THROW(inv(u, out), InputError);
}

TEST(VectorLog, KernelMatchesScalarReference) {
  Rng rng(5);
  std::vector<double> u(4099);
  for (auto& x : u) x = uniform01(rng);
  std::vector<std::size_t> fast(u.size()), ref(u.size());
  const double a = std::expm1(10.0 * std::log(2.0)), scale = 99.9 / std::log(2.0);
  detail::log_affine_floor(u.data(), fast.data(), u.size(), a, scale, 999.0);
  detail::log_affine_floor_scalar(u.data(), ref.data(), u.size(), a, scale, 999.0);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < u.size(); ++i) diff += fast[i] != ref[i];
  EXPECT_LE(diff, 2u);
}

TEST(TruncGeomPmf, FourIndexExample) {
  auto p = trunc_geom_pmf(4, 4, 3.0);
  EXPECT_NEAR(p[0], 1.0 / 15, 1e-15);
  EXPECT_NEAR(p[1], 2.0 / 15, 1e-15);
  EXPECT_NEAR(p[2], 4.0 / 15, 1e-15);
  EXPECT_NEAR(p[3], 8.0 / 15, 1e-15);
}

TEST(TruncGeomPmf, ConstantRatioAndMonotone) {
  const double alpha = 7.0;
  const std::size_t n_max = 500;
  auto p = trunc_geom_pmf(300, n_max, alpha);
  const double ratio = std::exp2(alpha / (n_max - 1));
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    ASSERT_LE(p[i], p[i + 1]);
    ASSERT_NEAR(p[i + 1] / p[i], ratio, 1e-12);
  }
}

TEST(TruncGeomPmf, SmallAlphaApproachesUniform) {
  for (std::size_t n : {2u, 100u, 10000u}) {
    auto p = trunc_geom_pmf(n, n, 1e-9);
    double worst = 0.0, tv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(p[i] - 1.0 / n));
      tv += std::abs(p[i] - 1.0 / n) / 2;
    }
    EXPECT_LT(worst, 1e-8);
    EXPECT_LT(tv, 1e-8);
  }
}

TEST(TruncGeomPmf, DoublingAtIntegerDistance) {
  auto p = trunc_geom_pmf(1000000, 1000000, 10.0);
  for (std::size_t i : {0u, 123456u, 500000u, 899999u}) EXPECT_NEAR(p[i + 100000] / p[i], 2.0, 1e-4);
}

TEST(TruncGeomPmf, MatchesBruteForceAcrossAlpha) {
  for (double alpha : {0.1, 1.0, 3.0, 10.0, 100.0}) {
    auto p = trunc_geom_pmf(64, 64, alpha);
    auto b = brute_pmf(64, 64, alpha);
    for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(p[i], b[i], 1e-14);
  }
}

TEST(GeometricFamily, ClosedFormMatchesEnumeration) {
  for (std::size_t n : {2u, 3u, 16u, 1000u}) {
    for (double theta : {-0.5, -1e-6, 0.0, 1e-7, 1e-3, 0.02, 0.7, 5.0}) {
      long double z = 0, m = 0;
      std::vector<long double> w(n);
      for (std::size_t i = 0; i < n; ++i) z += (w[i] = std::exp(static_cast<long double>(theta) * i));
      long double h = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const long double p = w[i] / z;
        m += p * i;
        if (p > 0) h -= p * std::log(p);
      }
      auto s = geometric_family_stats(n, theta);
      EXPECT_NEAR(s.mean_index, static_cast<double>(m), 1e-9 * n) << n << " " << theta;
      EXPECT_NEAR(s.entropy_nats, static_cast<double>(h), 1e-9) << n << " " << theta;
    }
  }
}
