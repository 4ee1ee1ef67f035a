#pragma once

// Closed-form scales of the random graph alignment problem, regime
// classification, and binomial tail bounds. Natural logarithms throughout.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"

namespace gaplab {

enum class Regime { Sparse, Critical, Dense };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Sparse: return "sparse";
    case Regime::Critical: return "critical";
    case Regime::Dense: return "dense";
  }
  return "unknown";
}

/// E_{n,p} = C(n,2) p².
inline double e_np(double n, double p) { return n * (n - 1.0) / 2.0 * p * p; }

/// Critical density p_c = sqrt(log n / n).
inline double p_critical(double n) { return std::sqrt(std::log(n) / n); }

/// Sparse step gain M₀ = log n / log(log n / (n p²)).
/// Throws DomainError when p ≤ 0 or n p² ≥ log n.
inline double sparse_step_gain(double n, double p) {
  if (!(p > 0.0)) throw DomainError("sparse scale needs p > 0");
  const double log_n = std::log(n);
  const double np2 = n * p * p;
  if (!(np2 < log_n)) throw DomainError("sparse scale undefined: n p^2 >= log n");
  return log_n / std::log(log_n / np2);
}

/// S_{n,p} = n log n / log(log n / (n p²)) = n · M₀.
inline double s_np(double n, double p) { return n * sparse_step_gain(n, p); }

/// D_{n,p} = sqrt(n³ p² log n).
inline double d_np(double n, double p) { return std::sqrt(n * n * n * p * p * std::log(n)); }

/// β_c = ∫₀¹ sqrt(2x) dx = sqrt(8/9).
inline double beta_c() { return std::sqrt(8.0 / 9.0); }

/// Finite-n cutoffs on p / p_c. The critical window has no finite-n
/// definition; these are configuration.
struct RegimeCutoffs {
  double lo = 0.5;
  double hi = 2.0;
};

inline Regime classify_regime(double n, double p, RegimeCutoffs cut = {}) {
  const double ratio = p / p_critical(n);
  if (ratio <= cut.lo) return Regime::Sparse;
  if (ratio >= cut.hi) return Regime::Dense;
  return Regime::Critical;
}

struct RegimeParams {
  std::size_t n = 0;
  double p = 0.0;
  double e_np = 0.0;
  std::optional<double> s_np;  // only when log n / n <= p and n p² < log n
  double d_np = 0.0;
  double p_c = 0.0;
  double ratio_to_pc = 0.0;
  Regime regime = Regime::Sparse;
};

inline RegimeParams regime_params(std::size_t n, double p, RegimeCutoffs cut = {}) {
  const double nd = static_cast<double>(n);
  RegimeParams r;
  r.n = n;
  r.p = p;
  r.e_np = e_np(nd, p);
  r.d_np = d_np(nd, p);
  r.p_c = p_critical(nd);
  r.ratio_to_pc = p / r.p_c;
  r.regime = classify_regime(nd, p, cut);
  const double log_n = std::log(nd);
  if (p >= log_n / nd && nd * p * p < log_n) r.s_np = s_np(nd, p);
  return r;
}

/// Normalizing scale for a regime: S_{n,p} (sparse), D_{n,p} (dense), none in
/// the critical window or where S_{n,p} is undefined.
inline std::optional<double> regime_scale(std::size_t n, double p, Regime regime) {
  const double nd = static_cast<double>(n);
  switch (regime) {
    case Regime::Sparse:
      if (p > 0.0 && nd * p * p < std::log(nd)) return s_np(nd, p);
      return std::nullopt;
    case Regime::Dense: return d_np(nd, p);
    case Regime::Critical: return std::nullopt;
  }
  return std::nullopt;
}

/// centered / scale. For p ∈ {0, 1} the centered objective vanishes for every
/// correspondence, and the ratio is 0 by convention.
inline std::optional<double> normalized_ratio(double centered, std::size_t n, double p, Regime regime) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  auto scale = regime_scale(n, p, regime);
  if (!scale || *scale <= 0.0) return std::nullopt;
  return centered / *scale;
}

// Binomial tails for X ~ B(N, P).

/// P[X >= (1+δ)NP] <= exp(-NP((1+δ)log(1+δ) - δ)).
inline double chernoff_upper(double N, double P, double delta) {
  return std::exp(-N * P * ((1.0 + delta) * std::log1p(delta) - delta));
}

/// P[X <= (1-δ)NP] <= exp(-δ²NP/2).
inline double chernoff_lower(double N, double P, double delta) {
  return std::exp(-delta * delta * N * P / 2.0);
}

/// P[|X - NP| >= K] <= 2 exp(-K² / (2(NP + K))).
inline double chernoff_two_sided(double N, double P, double K) {
  return 2.0 * std::exp(-K * K / (2.0 * (N * P + K)));
}

/// Location N_s p + sqrt(2α N_s p log n) of the upper tail of B(N_s, p) that a
/// maximum over n^α candidates is expected to reach. `n` is real so that
/// log n may be set directly.
inline double dense_step_gain(double n_s, double p, double n, double alpha) {
  return n_s * p + std::sqrt(2.0 * alpha * n_s * p * std::log(n));
}

/// Predicted greedy overlap in the dense regime: C(n,2)p² + β_c D_{n,p}.
inline double predicted_greedy_dense(double n, double p) { return e_np(n, p) + beta_c() * d_np(n, p); }

}  // namespace gaplab
