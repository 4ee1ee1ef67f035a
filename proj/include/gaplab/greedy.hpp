#pragma once

// Greedy online alignment A_η.
//
// Vertices of G are matched in index order. The first ⌊ηn⌋ are mapped to
// themselves; each step s up to ⌊(1-η)n⌋ picks, among the unused vertices r of
// the second graph, one maximizing Σ_{j<s} G(j,s)·H(π(j), r), ties broken
// uniformly at random; the remaining vertices are completed in ascending
// order.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/overlap.hpp"
#include "gaplab/permutation.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/thresholds.hpp"

namespace gaplab {

enum class TieBreak {
  UniformSample,  // uniform draw over the integer argmax set
  Perturbation,   // literal H* = H + U(0, 1/n²) perturbations, real argmax
};

enum class Completion {
  Ascending,   // final segment filled in increasing order
  GreedyTail,  // keep matching greedily to the end (not the analysed algorithm)
};

enum class ScoreMethod { Auto, Accumulate, Bitset };

/// Above this density Auto scores candidates by popcount row intersection.
inline constexpr double kBitsetDensityCrossover = 0.15;

struct GreedyConfig {
  double eta = 0.0;
  TieBreak tie_break = TieBreak::UniformSample;
  Seed seed{};
  bool capture_trajectory = false;
  Completion completion = Completion::Ascending;
  ScoreMethod score_method = ScoreMethod::Auto;
  /// Edge density used for centering and standardization. When unset the
  /// mean empirical density of the two graphs is used.
  std::optional<double> p;

  void validate() const {
    if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
    if (p && !(*p >= 0.0 && *p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  }
};

/// Maps a 1-based step index to the owner label of its tie-break stream.
/// Standalone runs use the constant 0; coupled tree runs use the tree node
/// that owns the step's column block.
using StreamOwner = std::function<std::uint64_t(std::size_t step)>;

struct TrajectoryRecord {
  std::size_t s = 0;    // 1-based step
  std::size_t n_s = 0;  // #{j < s : G(j,s) = 1}
  std::size_t o_s = 0;  // Σ_{j<s} G(j,s) H(π(j), π(s))
  std::optional<double> standardized_gain;  // (o_s - s p²) / sqrt(2 s p² log n)
};

struct GreedyCounters {
  std::uint64_t score_updates = 0;    // neighbour increments or popcount words
  std::uint64_t candidate_scans = 0;  // candidates examined for the argmax
  [[nodiscard]] std::uint64_t total() const noexcept { return score_updates + candidate_scans; }
};

struct AlignmentResult {
  Permutation pi_star;
  std::size_t overlap_value = 0;
  double p = 0.0;
  double centered_value = 0.0;
  Regime regime = Regime::Sparse;
  std::optional<double> ratio;
  std::optional<std::vector<TrajectoryRecord>> trajectory;
  GreedyCounters counters;
};

namespace detail {

inline std::size_t greedy_prefix_end(double eta, std::size_t n) {
  return static_cast<std::size_t>(std::floor(eta * static_cast<double>(n)));
}
inline std::size_t greedy_middle_end(double eta, std::size_t n) {
  return static_cast<std::size_t>(std::floor((1.0 - eta) * static_cast<double>(n)));
}

/// Perturbation X(a, b) ~ U(0, 1/n²), symmetric, keyed by the unordered pair.
inline double pair_perturbation(const CounterRng& stream, Vertex a, Vertex b, double inv_n2) {
  if (a > b) std::swap(a, b);
  const std::uint64_t label = pair_count(b) + a;
  return stream.uniform01_at(label) * inv_n2;
}

inline std::vector<TrajectoryRecord> build_trajectory(const Graph& g, const Graph& h, const Permutation& pi, double p) {
  const std::size_t n = g.n();
  const double log_n = std::log(static_cast<double>(n));
  std::vector<TrajectoryRecord> out(n);
  for (Vertex s = 0; s < n; ++s) {
    auto prior = g.neighbors_below(s, s);
    std::size_t gain = 0;
    for (Vertex j : prior) gain += h.has_edge(pi(j), pi(s));
    TrajectoryRecord& rec = out[s];
    rec.s = s + 1;
    rec.n_s = prior.size();
    rec.o_s = gain;
    const double mean = static_cast<double>(rec.s) * p * p;
    const double scale = std::sqrt(2.0 * mean * log_n);
    if (scale > 0.0) rec.standardized_gain = (static_cast<double>(gain) - mean) / scale;
  }
  return out;
}

inline AlignmentResult run_greedy(const Graph& g, const Graph& h, const GreedyConfig& cfg, const StreamOwner& owner,
                                  bool literal_perturbation) {
  detail::require_same_size(g.n(), h.n(), "greedy_align");
  cfg.validate();
  const std::size_t n = g.n();
  if (n < 2) throw std::invalid_argument("greedy_align: need at least 2 vertices");

  const std::size_t a = greedy_prefix_end(cfg.eta, n);
  const std::size_t b_mid = greedy_middle_end(cfg.eta, n);
  const std::size_t b = cfg.completion == Completion::GreedyTail ? n : b_mid;

  const double density = (g.density() + h.density()) / 2.0;
  const bool use_bitset =
      !literal_perturbation &&
      (cfg.score_method == ScoreMethod::Bitset ||
       (cfg.score_method == ScoreMethod::Auto && density > kBitsetDensityCrossover));

  std::vector<Vertex> image(n, 0);
  std::vector<char> used(n, 0);
  for (std::size_t i = 0; i < a; ++i) {
    image[i] = static_cast<Vertex>(i);
    used[i] = 1;
  }
  std::vector<Vertex> remaining;
  remaining.reserve(n - a);
  for (std::size_t r = a; r < n; ++r) remaining.push_back(static_cast<Vertex>(r));

  GreedyCounters counters;
  std::vector<std::uint32_t> score(n, 0);
  std::vector<std::uint64_t> mask(h.words_per_row(), 0);
  std::vector<double> real_score;
  std::vector<Vertex> ties;
  const Seed tie_seed = cfg.seed.child("tie");
  const CounterRng perturbation(cfg.seed.child("perturbation"));
  const double inv_n2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));

  for (std::size_t s = a; s < b; ++s) {
    const auto prior = g.neighbors_below(static_cast<Vertex>(s), static_cast<Vertex>(s));
    std::size_t pick_pos = 0;

    if (literal_perturbation) {
      // Real-valued scores with every H entry perturbed by X ~ U(0, 1/n²).
      double best = -1.0;
      for (std::size_t k = 0; k < remaining.size(); ++k) {
        const Vertex r = remaining[k];
        double value = 0.0;
        for (Vertex j : prior) {
          value += static_cast<double>(h.has_edge(image[j], r)) + pair_perturbation(perturbation, image[j], r, inv_n2);
        }
        counters.score_updates += prior.size();
        if (value > best || (value == best && r < remaining[pick_pos])) {
          best = value;
          pick_pos = k;
        }
      }
      counters.candidate_scans += remaining.size();
    } else {
      if (use_bitset) {
        std::fill(mask.begin(), mask.end(), 0);
        for (Vertex j : prior) mask[image[j] >> 6] |= 1ULL << (image[j] & 63);
        for (Vertex r : remaining) {
          auto row = h.row(r);
          std::uint32_t c = 0;
          for (std::size_t w = 0; w < mask.size(); ++w) c += std::popcount(row[w] & mask[w]);
          score[r] = c;
        }
        counters.score_updates += remaining.size() * mask.size();
      } else {
        for (Vertex j : prior) {
          for (Vertex r : h.neighbors(image[j])) ++score[r];
          counters.score_updates += h.degree(image[j]);
        }
      }
      std::uint32_t best = 0;
      ties.clear();
      for (std::size_t k = 0; k < remaining.size(); ++k) {
        const std::uint32_t v = score[remaining[k]];
        if (v > best) {
          best = v;
          ties.clear();
        }
        if (v == best) ties.push_back(static_cast<Vertex>(k));
      }
      counters.candidate_scans += remaining.size();
      if (ties.size() == 1) {
        pick_pos = ties.front();
      } else {
        // Order the tie set by vertex id so the draw does not depend on the
        // internal order of `remaining`.
        std::sort(ties.begin(), ties.end(), [&](Vertex x, Vertex y) { return remaining[x] < remaining[y]; });
        const std::uint64_t who = owner ? owner(s + 1) : 0;
        CounterRng rng(tie_seed.derive(who, static_cast<std::uint64_t>(s + 1)));
        pick_pos = ties[rng.uniform_int(ties.size())];
      }
      if (!use_bitset) {
        for (Vertex j : prior)
          for (Vertex r : h.neighbors(image[j])) score[r] = 0;
      }
    }

    const Vertex chosen = remaining[pick_pos];
    image[s] = chosen;
    used[chosen] = 1;
    remaining[pick_pos] = remaining.back();
    remaining.pop_back();
  }

  std::sort(remaining.begin(), remaining.end());
  for (std::size_t s = b, k = 0; s < n; ++s, ++k) image[s] = remaining[k];

  AlignmentResult res;
  res.pi_star = Permutation::from_images(std::move(image));
  res.overlap_value = overlap(g, h, res.pi_star);
  res.p = cfg.p.value_or(density);
  res.centered_value = static_cast<double>(res.overlap_value) - mean_overlap(n, res.p);
  res.regime = classify_regime(static_cast<double>(n), res.p);
  res.ratio = normalized_ratio(res.centered_value, n, res.p, res.regime);
  res.counters = counters;
  if (cfg.capture_trajectory) res.trajectory = build_trajectory(g, h, res.pi_star, res.p);
  return res;
}

}  // namespace detail

/// Runs A_η on (g, h). Deterministic given cfg.seed (and `owner`).
inline AlignmentResult greedy_align(const Graph& g, const Graph& h, const GreedyConfig& cfg,
                                    const StreamOwner& owner = {}) {
  return detail::run_greedy(g, h, cfg, owner, cfg.tie_break == TieBreak::Perturbation);
}

/// A_η with literal U(0, 1/n²) perturbations of the second graph and a
/// real-valued argmax. The perturbations of all pairs sum to less than 1, so
/// the pick always lies in the integer argmax set.
inline AlignmentResult greedy_align_perturbed(const Graph& g, const Graph& h, const GreedyConfig& cfg) {
  return detail::run_greedy(g, h, cfg, {}, true);
}

inline const std::vector<TrajectoryRecord>& trajectory(const AlignmentResult& result) {
  if (!result.trajectory) throw std::logic_error("trajectory was not captured (set capture_trajectory)");
  return *result.trajectory;
}

/// CSV with header "s,n_s,o_s,standardized_gain"; an undefined gain is an
/// empty field.
inline void write_trajectory_csv(std::ostream& os, std::span<const TrajectoryRecord> records) {
  const auto old_precision = os.precision(17);
  os << "s,n_s,o_s,standardized_gain\n";
  for (const auto& r : records) {
    os << r.s << ',' << r.n_s << ',' << r.o_s << ',';
    if (r.standardized_gain) os << *r.standardized_gain;
    os << '\n';
  }
  os.precision(old_precision);
}

struct OnlineCheck {
  bool applicable = false;    // g and g_alt agree on every pair (i, j) with j <= k
  bool prefix_equal = false;  // π*(1..k) identical under both inputs
};

/// Replays `algorithm` (Graph -> Permutation, same internal seed each call)
/// on g and g_alt and compares the first k images (k is a 1-based step).
template <class Algorithm>
OnlineCheck online_prefix_check(Algorithm&& algorithm, const Graph& g, const Graph& g_alt, std::size_t k) {
  detail::require_same_size(g.n(), g_alt.n(), "online_prefix_check");
  if (k > g.n()) throw std::invalid_argument("online_prefix_check: step beyond n");
  OnlineCheck out;
  for (Vertex j = 1; j < k; ++j) {
    for (Vertex i = 0; i < j; ++i) {
      if (g.has_edge(i, j) != g_alt.has_edge(i, j)) return out;
    }
  }
  out.applicable = true;
  const Permutation a = algorithm(g);
  const Permutation b = algorithm(g_alt);
  out.prefix_equal = std::equal(a.images().begin(), a.images().begin() + static_cast<std::ptrdiff_t>(k),
                                b.images().begin());
  return out;
}

}  // namespace gaplab
