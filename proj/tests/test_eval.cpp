#include <gtest/gtest.h>

#include <random>

#include "sparsedisp/eval.hpp"
#include "test_support.hpp"

namespace sparsedisp {
namespace {

TEST(BadPixelRate, IdenticalMapsScoreZero) {
  DisparityMap t(6, 4, 3);
  const auto r = bad_pixel_rate(t, t, {});
  EXPECT_EQ(r.bad_percent, 0.0);
  EXPECT_EQ(r.n_evaluated, 24);
}

TEST(BadPixelRate, OneBadPixelInHundred) {
  DisparityMap t(10, 10, 5);
  auto c = t;
  c(4, 7) = 8;
  c(2, 2) = 6;  // off by exactly 1.0, not bad
  const auto r = bad_pixel_rate(c, t, {1.0, 0});
  EXPECT_EQ(r.n_bad, 1);
  EXPECT_DOUBLE_EQ(r.bad_percent, 1.0);
}

TEST(BadPixelRate, UnknownTruthAndBorderExcluded) {
  DisparityMap t(5, 5, 2);
  t(2, 2) = 0;
  DisparityMap c(5, 5, 9);
  EXPECT_EQ(bad_pixel_rate(c, t, {1.0, 0}).n_evaluated, 24);
  EXPECT_EQ(bad_pixel_rate(c, t, {1.0, 1}).n_evaluated, 8);
  EXPECT_THROW(bad_pixel_rate(c, t, {1.0, 3}), std::invalid_argument);
  EXPECT_THROW(bad_pixel_rate(c, DisparityMap(5, 5, 0), {}), std::invalid_argument);
  EXPECT_THROW(bad_pixel_rate(c, DisparityMap(4, 5, 1), {}), std::invalid_argument);
  EXPECT_THROW(bad_pixel_rate(c, t, {0.0, 0}), std::invalid_argument);
}

TEST(BadPixelRate, MatchesRecountAndMonotoneInDelta) {
  std::mt19937 rng(53);
  std::uniform_int_distribution<int> d(0, 8);
  for (int trial = 0; trial < 200; ++trial) {
    DisparityMap t(7, 6), c(7, 6);
    for (auto& v : t) v = d(rng);
    t(3, 3) = 1;
    for (auto& v : c) v = d(rng);
    const EvalConfig cfg{0.5 + (trial % 4), trial % 3};
    const auto r = bad_pixel_rate(c, t, cfg);
    long n = 0, bad = 0;
    for (int y = cfg.border; y < 6 - cfg.border; ++y)
      for (int x = cfg.border; x < 7 - cfg.border; ++x)
        if (t(x, y) > 0) {
          ++n;
          bad += std::abs(c(x, y) - t(x, y)) > cfg.delta_d;
        }
    EXPECT_EQ(r.n_evaluated, n);
    EXPECT_EQ(r.n_bad, bad);
    EXPECT_DOUBLE_EQ(r.bad_percent, 100.0 * bad / n);
    EXPECT_LE(bad_pixel_rate(c, t, {cfg.delta_d + 1.0, cfg.border}).bad_percent, r.bad_percent);
  }
}

TEST(Sparsity, IdenticalMapsReduceNothing) {
  BinaryMap m(10, 4, 0);
  m(3, 1) = m(4, 1) = 1;
  const auto s = sparsity_stats(m, m);
  EXPECT_EQ(s.reduction_percent, 0.0);
  EXPECT_EQ(s.computed_pixel_count, 2 + 2 * 4);
}

TEST(Sparsity, FiftyThreePercentReduction) {
  BinaryMap raw(100, 20, 0), refined(100, 20, 0);
  for (int i = 0; i < 1000; ++i) raw(1 + i % 98, i / 98) = 1;
  for (int i = 0; i < 470; ++i) refined(1 + i % 98, i / 98) = 1;
  const auto s = sparsity_stats(raw, refined);
  EXPECT_EQ(s.raw_boundary_count, 1000);
  EXPECT_EQ(s.refined_boundary_count, 470);
  EXPECT_NEAR(s.reduction_percent, 53.0, 1e-9);
}

TEST(Sparsity, CountsMatchRecount) {
  std::mt19937 rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const auto raw = testing::random_binary(rng, 9, 5, 0.5);
    const auto refined = testing::random_binary(rng, 9, 5, 0.3);
    const auto s = sparsity_stats(raw, refined);
    long computed = 0;
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 9; ++x) computed += refined(x, y) || x == 0 || x == 8;
    EXPECT_EQ(s.computed_pixel_count, computed);
    EXPECT_EQ(s.raw_boundary_count, static_cast<long>(count_ones(raw)));
    EXPECT_DOUBLE_EQ(s.computed_fraction_of_image, computed / 45.0);
  }
  EXPECT_THROW(sparsity_stats(BinaryMap(2, 2), BinaryMap(3, 2)), std::invalid_argument);
}

}  // namespace
}  // namespace sparsedisp
