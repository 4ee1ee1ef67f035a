#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gaplab/rng.hpp"

using namespace gaplab;

TEST(Seed, SameLabelsSameKey) {
  EXPECT_EQ(Seed(7).child("a").child(3).key(), Seed(7).derive(std::string_view("a"), std::uint64_t{3}).key());
  EXPECT_EQ(Seed(7).child(1), Seed(7).child(1));
}

TEST(Seed, DistinctPathsDistinctKeys) {
  std::set<std::uint64_t> keys;
  for (std::uint64_t root = 0; root < 20; ++root) {
    for (std::uint64_t a = 0; a < 20; ++a) {
      for (std::uint64_t b = 0; b < 20; ++b) keys.insert(Seed(root).derive(a, b).key());
    }
  }
  EXPECT_EQ(keys.size(), 8000U);
  EXPECT_NE(Seed(1).derive(std::uint64_t{2}, std::uint64_t{3}).key(),
            Seed(1).derive(std::uint64_t{3}, std::uint64_t{2}).key());
}

TEST(CounterRng, RandomAccessMatchesSequential) {
  CounterRng seq(Seed(11));
  const CounterRng ra(Seed(11));
  for (std::uint64_t i = 0; i < 100; ++i) EXPECT_EQ(seq(), ra.at(i));
  EXPECT_EQ(seq.counter(), 100U);
}

TEST(CounterRng, Uniform01InUnitInterval) {
  const CounterRng rng(Seed(2));
  double sum = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform01_at(i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / kDraws, 0.5, 4 * std::sqrt(1.0 / 12.0 / kDraws));
}

TEST(CounterRng, UniformIntIsUnbiased) {
  CounterRng rng(Seed(3));
  constexpr std::uint64_t kBound = 7;
  constexpr int kDraws = 70000;
  std::vector<int> counts(kBound, 0);
  for (int i = 0; i < kDraws; ++i) {
    const auto v = rng.uniform_int(kBound);
    ASSERT_LT(v, kBound);
    ++counts[v];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(kDraws) / kBound;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 16.81);  // 0.99 quantile, 6 dof
}

TEST(CounterRng, BernoulliRate) {
  CounterRng rng(Seed(4));
  int hits = 0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) hits += rng.bernoulli(0.3);
  EXPECT_NEAR(hits / static_cast<double>(kDraws), 0.3, 4 * std::sqrt(0.21 / kDraws));
}
