#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dreg/normal.hpp"
#include "dreg/rng.hpp"

using namespace dreg;

// Known-answer blocks: the first two agree with numpy.random.Philox, the third
// is the Random123 kat_vectors entry.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(philox4x64({0, 0, 0, 0}, {0, 0}),
            (Philox4x64Counter{0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull,
                               0xd7e772cee186176bull, 0x7e68b68aec7ba23bull}));
  const std::uint64_t m = ~0ull;
  EXPECT_EQ(philox4x64({m, m, m, m}, {m, m}),
            (Philox4x64Counter{0x87b092c3013fe90bull, 0x438c3c67be8d0224ull,
                               0x9cc7d7c69cd777b6ull, 0xa09caebf594f0ba0ull}));
  EXPECT_EQ(philox4x64({0x243f6a8885a308d3ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull,
                        0x082efa98ec4e6c89ull},
                       {0x452821e638d01377ull, 0xbe5466cf34e90c6cull}),
            (Philox4x64Counter{0xa528f45403e61d95ull, 0x38c72dbd566e9788ull,
                               0xa5a1610e72fd18b5ull, 0x57bd43b5e52b7fe6ull}));
}

TEST(StreamEngine, StreamsAreReproducibleAndDistinct) {
  StreamEngine a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    seen.insert(va);
    seen.insert(c());
    seen.insert(d());
  }
  EXPECT_EQ(seen.size(), 300u);
}

TEST(StreamEngine, UniformOpenInterval) {
  StreamEngine e(1, 2);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = e.uniform01();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(StreamEngine, NormalAndLogisticMoments) {
  StreamEngine e(11, 0);
  const int m = 200000;
  double s1 = 0, s2 = 0, l2 = 0;
  for (int i = 0; i < m; ++i) {
    const double z = standard_normal(e);
    s1 += z;
    s2 += z * z;
    const double l = standard_logistic(e);
    l2 += l * l;
  }
  EXPECT_NEAR(s1 / m, 0.0, 0.01);
  EXPECT_NEAR(s2 / m, 1.0, 0.015);
  EXPECT_NEAR(l2 / m, M_PI * M_PI / 3.0, 0.05);
}

TEST(DeriveSeed, SeparatesLabels) {
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  EXPECT_EQ(derive_seed(9, 9), derive_seed(9, 9));
}

// Reference values from mpmath at 50 digits.
TEST(Normal, QuantilesMatchOracle) {
  EXPECT_NEAR(normal_upper_quantile(0.025), 1.9599639845400542355, 1e-13);
  EXPECT_NEAR(normal_upper_quantile(0.0025), 2.8070337683438041172, 1e-13);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  for (double p : {1e-12, 0.01, 0.3, 0.77, 0.999}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 * std::max(1.0, p));
  }
}
