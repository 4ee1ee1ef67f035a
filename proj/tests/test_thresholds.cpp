#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "gaplab/rng.hpp"
#include "gaplab/thresholds.hpp"

using namespace gaplab;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// Independent 50-digit evaluations of each closed form.
Big big_e_np(Big n, Big p) { return n * (n - 1) / 2 * p * p; }
Big big_s_np(Big n, Big p) { return n * log(n) / log(log(n) / (n * p * p)); }
Big big_d_np(Big n, Big p) { return sqrt(n * n * n * p * p * log(n)); }
Big big_chernoff_upper(Big N, Big P, Big d) { return exp(-N * P * ((1 + d) * log(1 + d) - d)); }
Big big_chernoff_lower(Big N, Big P, Big d) { return exp(-d * d * N * P / 2); }
Big big_chernoff_two(Big N, Big P, Big K) { return 2 * exp(-K * K / (2 * (N * P + K))); }
Big big_dense_gain(Big N, Big p, Big n, Big a) { return N * p + sqrt(2 * a * N * p * log(n)); }

double rel_err(double got, const Big& want) {
  const Big w = abs(want);
  if (w == 0) return std::abs(got);
  return static_cast<double>(abs(Big(got) - want) / w);
}

constexpr double kFormulaTolerance = 1e-12;

}  // namespace

TEST(Thresholds, ENpExamples) {
  EXPECT_DOUBLE_EQ(e_np(4, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(e_np(57, 0.0), 0.0);
  EXPECT_NEAR(e_np(100, 0.3), 445.5, 1e-9);
}

TEST(Thresholds, SNpExamples) {
  EXPECT_NEAR(s_np(1e4, 0.005), 25537.0, 1.0);
  EXPECT_THROW(s_np(1e4, 0.05), DomainError);
  EXPECT_THROW(s_np(1e4, 0.0), DomainError);
  // n = e⁹ and n p² = log n / e: the inner log is 1 and S = n log n.
  const double n = std::exp(9.0);
  const double p = std::sqrt(9.0 / std::exp(1.0) / n);
  EXPECT_NEAR(s_np(n, p), n * 9.0, 1e-9 * n * 9.0);
}

TEST(Thresholds, SparseStepGain) {
  EXPECT_NEAR(sparse_step_gain(1e4, 0.005), 2.5537, 1e-3);
  for (double n : {1e3, 1e4, 1e5}) {
    const double p = 0.1 * p_critical(n);
    EXPECT_DOUBLE_EQ(s_np(n, p) / sparse_step_gain(n, p), n);
  }
  // Inner ratio e gives M₀ = log n.
  const double n = 5000.0;
  const double p = std::sqrt(std::log(n) / std::exp(1.0) / n);
  EXPECT_NEAR(sparse_step_gain(n, p), std::log(n), 1e-12);
}

TEST(Thresholds, DNpExamples) {
  EXPECT_NEAR(d_np(100, 0.3), 643.79, 0.01);
  const double n = std::exp(1.0);
  EXPECT_NEAR(d_np(n, 0.2), std::pow(n, 1.5) * 0.2, 1e-12);
  EXPECT_NEAR(d_np(500, 0.2), 2.0 * d_np(500, 0.1), 1e-9);
}

TEST(Thresholds, BetaC) {
  EXPECT_NEAR(beta_c(), 0.9428090416, 1e-9);
  EXPECT_NEAR(beta_c() * beta_c(), 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(3.0 * beta_c() / (2.0 * std::sqrt(2.0)), 1.0, 1e-15);
}

TEST(Thresholds, ClassifyRegime) {
  EXPECT_NEAR(p_critical(1e4), 0.03035, 1e-5);
  EXPECT_EQ(classify_regime(1e4, 0.005), Regime::Sparse);
  EXPECT_EQ(classify_regime(1e4, 0.1), Regime::Dense);
  EXPECT_EQ(classify_regime(1e4, p_critical(1e4)), Regime::Critical);
  EXPECT_EQ(classify_regime(1e4, p_critical(1e4), RegimeCutoffs{1.5, 3.0}), Regime::Sparse);
}

TEST(Thresholds, RegimeParamsDomainOfS) {
  const auto sparse = regime_params(10000, 0.005);
  ASSERT_TRUE(sparse.s_np.has_value());
  EXPECT_NEAR(*sparse.s_np, 25537.31, 0.01);
  EXPECT_FALSE(regime_params(10000, 0.05).s_np.has_value());
  EXPECT_FALSE(regime_params(10000, 1e-4).s_np.has_value());  // below log n / n
}

TEST(Thresholds, NormalizedRatio) {
  EXPECT_EQ(normalized_ratio(12.0, 500, 0.0, Regime::Sparse), 0.0);
  EXPECT_EQ(normalized_ratio(0.0, 500, 1.0, Regime::Dense), 0.0);
  EXPECT_FALSE(normalized_ratio(12.0, 500, 0.1, Regime::Critical).has_value());
  EXPECT_NEAR(*normalized_ratio(643.7898, 100, 0.3, Regime::Dense), 1.0, 1e-6);
}

TEST(Chernoff, Examples) {
  EXPECT_DOUBLE_EQ(chernoff_upper(100, 0.3, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(chernoff_lower(100, 0.3, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(chernoff_two_sided(100, 0.3, 0.0), 2.0);
  EXPECT_NEAR(chernoff_two_sided(100, 0.5, 20), 2.0 * std::exp(-400.0 / 140.0), 1e-15);
  EXPECT_NEAR(chernoff_two_sided(100, 0.5, 20), 0.1149, 1e-4);
}

TEST(Chernoff, TwoSidedRangeAndMonotone) {
  CounterRng rng(Seed(77));
  for (int t = 0; t < 200; ++t) {
    const double N = 1.0 + std::floor(rng.uniform01() * 1000.0);
    const double P = 0.01 + 0.98 * rng.uniform01();
    double prev = 2.0;
    for (double K = 0.5; K < 50.0; K += 0.5) {
      const double b = chernoff_two_sided(N, P, K);
      ASSERT_GT(b, 0.0);
      ASSERT_LE(b, 2.0);
      ASSERT_LT(b, prev);
      prev = b;
    }
  }
}

TEST(StepGains, DenseStepGain) {
  EXPECT_NEAR(dense_step_gain(100, 0.25, std::exp(4.0), 1.0), 25.0 + std::sqrt(200.0), 1e-12);
  EXPECT_NEAR(dense_step_gain(100, 0.25, std::exp(4.0), 1.0), 39.142, 1e-3);
  EXPECT_DOUBLE_EQ(dense_step_gain(80, 0.3, 1000, 0.0), 24.0);
  const double base = 80 * 0.3;
  EXPECT_NEAR(dense_step_gain(80, 0.3, 1000, 4.0) - base, 2.0 * (dense_step_gain(80, 0.3, 1000, 1.0) - base), 1e-12);
}

TEST(StepGains, PredictedGreedyDense) {
  EXPECT_NEAR((predicted_greedy_dense(3000, 0.2) - e_np(3000, 0.2)) / d_np(3000, 0.2), beta_c(), 1e-12);
  EXPECT_NEAR(e_np(2000, 0.1), 19990.0, 1e-9);
  // Closed form at (2000, 0.1) evaluates to 24659.12 and 43238.84.
  EXPECT_NEAR(d_np(2000, 0.1), 24659.12, 0.01);
  EXPECT_NEAR(predicted_greedy_dense(2000, 0.1), 43238.84, 0.01);
  // p -> 0 at fixed n: quadratic versus linear vanishing.
  EXPECT_NEAR(e_np(2000, 1e-4) / e_np(2000, 2e-4), 0.25, 1e-12);
  EXPECT_NEAR(d_np(2000, 1e-4) / d_np(2000, 2e-4), 0.5, 1e-12);
}

TEST(ScaleOrdering, SparseScaleDominatesMean) {
  for (double n : {1e3, 1e4, 1e5, 1e6}) {
    const double p = p_critical(n) / 10.0;
    EXPECT_GT(s_np(n, p), e_np(n, p)) << "n = " << n;
  }
}

TEST(ScaleOrdering, DenseScaleBelowMean) {
  for (double n = 100; n <= 1e6; n *= 1.7) {
    const double p = 3.0 * p_critical(n);
    if (p >= 1.0) continue;
    EXPECT_LT(d_np(n, p), e_np(n, p)) << "n = " << n;
  }
}

TEST(Oracle, FormulasMatchArbitraryPrecision) {
  CounterRng rng(Seed(2024));
  for (int t = 0; t < 100; ++t) {
    const double n = std::floor(10.0 + rng.uniform01() * 1e6);
    const double p_sparse = (0.05 + 0.9 * rng.uniform01()) * std::sqrt(std::log(n) / n);
    const double p = 0.001 + 0.998 * rng.uniform01();
    const double N = std::floor(1.0 + rng.uniform01() * 300.0);  // keeps every exponent above -700
    const double P = 0.001 + 0.998 * rng.uniform01();
    const double d = 2.0 * rng.uniform01();
    const double K = 100.0 * rng.uniform01();
    const double alpha = 2.0 * rng.uniform01();

    EXPECT_LE(rel_err(e_np(n, p), big_e_np(Big(n), Big(p))), kFormulaTolerance);
    EXPECT_LE(rel_err(d_np(n, p), big_d_np(Big(n), Big(p))), kFormulaTolerance);
    EXPECT_LE(rel_err(s_np(n, p_sparse), big_s_np(Big(n), Big(p_sparse))), kFormulaTolerance);
    EXPECT_LE(rel_err(chernoff_upper(N, P, d), big_chernoff_upper(Big(N), Big(P), Big(d))), kFormulaTolerance);
    EXPECT_LE(rel_err(chernoff_lower(N, P, d), big_chernoff_lower(Big(N), Big(P), Big(d))), kFormulaTolerance);
    EXPECT_LE(rel_err(chernoff_two_sided(N, P, K), big_chernoff_two(Big(N), Big(P), Big(K))), kFormulaTolerance);
    EXPECT_LE(rel_err(dense_step_gain(N, P, n, alpha), big_dense_gain(Big(N), Big(P), Big(n), Big(alpha))),
              kFormulaTolerance);
  }
}
