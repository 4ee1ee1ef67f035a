#pragma once

// Correlated instance constructions.
//
// Edge labels order the pairs by larger endpoint, then smaller:
// (0,1), (0,2), (1,2), (0,3), ... so label(i, j) = C(j, 2) + i (0-based), and
// the first K labels occupy a vertex prefix.
//
// Two prefix conventions coexist. (2,α)-pairs share an edge-label prefix
// (labels < ⌊αN⌋). Tree families share vertex-column blocks: column j
// (1-based) belongs to level k when α_{k-1} n < j <= α_k n.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/greedy.hpp"
#include "gaplab/rng.hpp"
#include "gaplab/thresholds.hpp"

namespace gaplab {

// ---------------------------------------------------------------------------
// Edge labeling

/// 0-based label of the pair {i, j}.
inline std::uint64_t edge_index(Vertex i, Vertex j, std::size_t n) {
  if (i > j) std::swap(i, j);
  if (i == j || j >= n) throw std::out_of_range("edge_index: invalid pair");
  return pair_count(j) + i;
}

/// Inverse of edge_index.
inline Edge edge_pair(std::uint64_t k, std::size_t n) {
  if (k >= pair_count(n)) throw std::out_of_range("edge_pair: label out of range");
  // Largest j with C(j,2) <= k.
  auto j = static_cast<std::uint64_t>(std::floor((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0));
  while (pair_count(j) > k) --j;
  while (pair_count(j + 1) <= k) ++j;
  return {static_cast<Vertex>(k - pair_count(j)), static_cast<Vertex>(j)};
}

/// ⌊α C(n,2)⌋, exact at the endpoints.
inline std::uint64_t shared_label_count(double alpha, std::size_t n) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  const std::uint64_t total = pair_count(n);
  if (alpha >= 1.0) return total;
  return std::min<std::uint64_t>(total, static_cast<std::uint64_t>(std::floor(alpha * static_cast<double>(total))));
}

/// Smallest vertex count j >= 1 with C(j, 2) >= ⌊α C(n,2)⌋: the label prefix
/// of fraction α lives on the first j vertices.
inline std::size_t prefix_span(double alpha, std::size_t n) {
  const std::uint64_t k = shared_label_count(alpha, n);
  std::size_t j = 1;
  while (pair_count(j) < k) ++j;
  return j;
}

// ---------------------------------------------------------------------------
// (2, α)-correlated pairs and interpolation paths

enum class EdgeSource { Shared, First, Second };

struct CorrelatedPair {
  Graph first;
  Graph second;
  std::uint64_t shared_labels = 0;

  /// Which stream produced label k of `which` (0 = first, 1 = second).
  [[nodiscard]] EdgeSource source(std::uint64_t k, int which) const {
    if (k < shared_labels) return EdgeSource::Shared;
    return which == 0 ? EdgeSource::First : EdgeSource::Second;
  }
};

/// Labels below ⌊αN⌋ are common draws; all others are independent Bernoulli(p).
inline CorrelatedPair sample_2alpha(std::size_t n, double p, double alpha, const Seed& seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_2alpha: p must lie in [0, 1]");
  const std::uint64_t shared = shared_label_count(alpha, n);
  const Seed shared_seed = seed.child("shared");
  const Seed own[2] = {seed.child("first"), seed.child("second")};
  GraphBuilder b[2] = {GraphBuilder(n), GraphBuilder(n)};
  for (Vertex j = 1; j < n; ++j) {
    const CounterRng common = column_stream(shared_seed, j);
    const CounterRng mine[2] = {column_stream(own[0], j), column_stream(own[1], j)};
    for (Vertex i = 0; i < j; ++i) {
      const std::uint64_t k = pair_count(j) + i;
      for (int w = 0; w < 2; ++w) {
        const double u = k < shared ? common.uniform01_at(i) : mine[w].uniform01_at(i);
        if (u < p) b[w].add_edge(i, j);
      }
    }
  }
  return {std::move(b[0]).build(), std::move(b[1]).build(), shared};
}

/// G^k: labels < k taken from g, the rest from g_prime.
inline Graph interpolation_path(const Graph& g, const Graph& g_prime, std::uint64_t k) {
  detail::require_same_size(g.n(), g_prime.n(), "interpolation_path");
  const std::size_t n = g.n();
  if (k > pair_count(n)) throw std::out_of_range("interpolation_path: k beyond C(n,2)");
  GraphBuilder b(n);
  for (Vertex j = 1; j < n; ++j) {
    for (Vertex i = 0; i < j; ++i) {
      const bool from_g = pair_count(j) + i < k;
      if ((from_g ? g : g_prime).has_edge(i, j)) b.add_edge(i, j);
    }
  }
  return std::move(b).build();
}

// ---------------------------------------------------------------------------
// α-schedule and branching parameter

struct AlphaSchedule {
  std::size_t n_levels = 0;
  std::vector<double> alphas;  // 0 = α₀ < α₁ < ... < α_N = 1
  double riemann_sum = 0.0;    // Σ (α_k - α_{k-1}) sqrt(α_k + α_{k-1})
  double epsilon = 0.0;
  double delta = 0.0;          // 1 + δ = (β_c + 2ε/3) / (β_c + ε/3)
  std::size_t d_branch = 0;

  [[nodiscard]] bool riemann_condition() const { return riemann_sum < beta_c() + epsilon / 3.0; }
  [[nodiscard]] double branch_lower_bound() const {
    double worst = 0.0;
    for (std::size_t k = 1; k < alphas.size(); ++k) {
      worst = std::max(worst, alphas[k - 1] / (2.0 * delta * (alphas[k] - alphas[k - 1])));
    }
    return worst;
  }
  [[nodiscard]] bool branch_condition() const { return static_cast<double>(d_branch) > branch_lower_bound(); }
};

inline double riemann_sum(const std::vector<double>& alphas) {
  double sum = 0.0;
  for (std::size_t k = 1; k < alphas.size(); ++k) {
    sum += (alphas[k] - alphas[k - 1]) * std::sqrt(alphas[k] + alphas[k - 1]);
  }
  return sum;
}

inline std::vector<double> uniform_alphas(std::size_t levels) {
  std::vector<double> a(levels + 1);
  for (std::size_t k = 0; k <= levels; ++k) a[k] = static_cast<double>(k) / static_cast<double>(levels);
  return a;
}

/// Uniform grid with mesh at most ε/3 (N = ⌈3/ε⌉), refined until the Riemann
/// sum is below β_c + ε/3; D is the smallest integer above
/// max_k α_{k-1} / (2δ(α_k - α_{k-1})).
inline AlphaSchedule choose_schedule(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("choose_schedule: epsilon must lie in (0, 1)");
  AlphaSchedule s;
  s.epsilon = epsilon;
  s.n_levels = static_cast<std::size_t>(std::ceil(3.0 / epsilon - 1e-9));
  for (;;) {
    s.alphas = uniform_alphas(s.n_levels);
    s.riemann_sum = riemann_sum(s.alphas);
    if (s.riemann_condition()) break;
    ++s.n_levels;
  }
  s.delta = (beta_c() + 2.0 * epsilon / 3.0) / (beta_c() + epsilon / 3.0) - 1.0;
  s.d_branch = static_cast<std::size_t>(std::floor(s.branch_lower_bound())) + 1;
  if (!s.riemann_condition() || !s.branch_condition()) throw std::logic_error("choose_schedule: invariant violated");
  return s;
}

// ---------------------------------------------------------------------------
// (T, α)-correlated families

/// Leaf-indexed family over a D-regular rooted tree of the given depth. A node
/// at depth k owns the indicators of columns in (cut[k-1], cut[k]], where
/// cut[k] = ⌊α_k n⌋; leaf graphs are assembled from their ancestors' blocks on
/// demand.
class CorrelatedFamily {
 public:
  CorrelatedFamily(std::size_t n, double p, std::size_t branching, std::size_t depth, std::vector<double> alphas,
                   Seed seed)
      : n_(n), p_(p), branching_(branching), depth_(depth), alphas_(std::move(alphas)), seed_(std::move(seed)) {
    if (branching_ < 1 || depth_ < 1) throw std::invalid_argument("tree needs branching >= 1 and depth >= 1");
    if (alphas_.size() != depth_ + 1 || alphas_.front() != 0.0 || alphas_.back() != 1.0) {
      throw std::invalid_argument("alphas must run from 0 to 1 with depth + 1 entries");
    }
    for (std::size_t k = 1; k <= depth_; ++k) {
      if (!(alphas_[k] > alphas_[k - 1])) throw std::invalid_argument("alphas must be increasing");
    }
    cuts_.resize(depth_ + 1);
    for (std::size_t k = 0; k <= depth_; ++k) {
      cuts_[k] = std::min(n_, static_cast<std::size_t>(std::floor(alphas_[k] * static_cast<double>(n_) + 1e-9)));
    }
    cuts_.back() = n_;
    leaves_ = 1;
    for (std::size_t k = 0; k < depth_; ++k) leaves_ *= branching_;
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] std::size_t branching() const noexcept { return branching_; }
  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  [[nodiscard]] std::size_t leaf_count() const noexcept { return leaves_; }
  [[nodiscard]] const std::vector<double>& alphas() const noexcept { return alphas_; }
  /// cut[k] = ⌊α_k n⌋: columns 1..cut[k] (1-based) are fixed at depth k.
  [[nodiscard]] const std::vector<std::size_t>& cuts() const noexcept { return cuts_; }

  /// Child indices from the root down to `leaf` (length = depth).
  [[nodiscard]] std::vector<std::size_t> leaf_path(std::size_t leaf) const {
    std::vector<std::size_t> path(depth_);
    for (std::size_t k = depth_; k-- > 0;) {
      path[k] = leaf % branching_;
      leaf /= branching_;
    }
    return path;
  }

  /// Identifier of the depth-`level` ancestor of `leaf`, unique within a level.
  [[nodiscard]] std::uint64_t node_id(std::size_t leaf, std::size_t level) const {
    std::uint64_t id = leaf;
    for (std::size_t k = level; k < depth_; ++k) id /= branching_;
    return id;
  }

  /// Depth of the deepest common ancestor u ∧ v.
  [[nodiscard]] std::size_t common_depth(std::size_t u, std::size_t v) const {
    std::size_t d = depth_;
    while (d > 0 && node_id(u, d) != node_id(v, d)) --d;
    return d;
  }

  /// Level k with cut[k-1] < column <= cut[k] for a 1-based column.
  [[nodiscard]] std::size_t level_of_column(std::size_t column) const {
    for (std::size_t k = 1; k <= depth_; ++k) {
      if (column <= cuts_[k]) return k;
    }
    throw std::out_of_range("column beyond n");
  }

  /// Seed of the block owned by the depth-`level` ancestor of `leaf`.
  [[nodiscard]] Seed node_seed(std::size_t leaf, std::size_t level) const {
    return seed_.child("tree").derive(static_cast<std::uint64_t>(level), node_id(leaf, level));
  }

  /// Block provenance of a 1-based column of a leaf graph: (level, node id).
  [[nodiscard]] std::pair<std::size_t, std::uint64_t> column_source(std::size_t leaf, std::size_t column) const {
    const std::size_t level = level_of_column(column);
    return {level, node_id(leaf, level)};
  }

  /// G^v with G^v(i,j) = E^{v(k)}(i,j) for α_{k-1} n < j <= α_k n.
  [[nodiscard]] Graph leaf_graph(std::size_t leaf) const {
    if (leaf >= leaves_) throw std::out_of_range("leaf index");
    GraphBuilder b(n_);
    for (std::size_t level = 1; level <= depth_; ++level) {
      const Seed block = node_seed(leaf, level);
      for (std::size_t col = cuts_[level - 1] + 1; col <= cuts_[level]; ++col) {
        fill_column(b, block, static_cast<Vertex>(col - 1), p_);
      }
    }
    return std::move(b).build();
  }

  /// Stream owner for coupled runs: the ancestor owning the step's column.
  [[nodiscard]] StreamOwner stream_owner(std::size_t leaf) const {
    return [this, leaf](std::size_t step) { return node_id(leaf, level_of_column(step)); };
  }

  /// One line per tree node: path, column block (1-based, inclusive), seed key.
  void write_manifest(std::ostream& os) const {
    os << "# family n=" << n_ << " p=" << p_ << " branching=" << branching_ << " depth=" << depth_
       << " leaves=" << leaves_ << " root_seed=" << seed_.root() << '\n';
    os << "# alphas";
    for (double a : alphas_) os << ' ' << a;
    os << '\n';
    std::size_t nodes_at_level = 1;
    for (std::size_t level = 1; level <= depth_; ++level) {
      nodes_at_level *= branching_;
      const std::size_t stride = leaves_ / nodes_at_level;
      for (std::size_t id = 0; id < nodes_at_level; ++id) {
        const std::size_t leaf = id * stride;
        const auto path = leaf_path(leaf);
        os << "node ";
        for (std::size_t k = 0; k < level; ++k) os << (k ? "." : "") << path[k];
        os << " level " << level << " columns [" << cuts_[level - 1] + 1 << ", " << cuts_[level] << "] seed_key "
           << node_seed(leaf, level).key() << '\n';
      }
    }
  }

 private:
  std::size_t n_;
  double p_;
  std::size_t branching_;
  std::size_t depth_;
  std::vector<double> alphas_;
  Seed seed_;
  std::vector<std::size_t> cuts_;
  std::size_t leaves_ = 1;
};

/// Instantiates a family for `schedule`. The selected D and depth give
/// D^N leaves; overrides select a small tree (uniform α grid over the
/// overridden depth) for experiments. Throws CapExceeded above `leaf_cap`.
inline CorrelatedFamily sample_tree_family(std::size_t n, double p, const AlphaSchedule& schedule,
                                           std::optional<std::size_t> d_override,
                                           std::optional<std::size_t> depth_override, const Seed& seed,
                                           std::size_t leaf_cap = 64) {
  const std::size_t d = d_override.value_or(schedule.d_branch);
  const std::size_t depth = depth_override.value_or(schedule.n_levels);
  if (d < 1 || depth < 1) throw std::invalid_argument("sample_tree_family: branching and depth must be positive");
  std::size_t leaves = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    if (leaves > leaf_cap / d) throw CapExceeded("sample_tree_family: leaf count exceeds cap");
    leaves *= d;
  }
  std::vector<double> alphas = depth_override && *depth_override != schedule.n_levels ? uniform_alphas(depth)
                                                                                      : schedule.alphas;
  return CorrelatedFamily(n, p, d, depth, std::move(alphas), seed);
}

/// Runs A_η on every leaf. The tie-break stream of step k on leaf v is owned by
/// v's ancestor at the level of column k, so leaves u, v draw identically for
/// k <= α_{|u∧v|} n and independently afterwards. Result index = leaf index.
inline std::vector<AlignmentResult> coupled_greedy_runs(const CorrelatedFamily& family, const Graph& h,
                                                        const GreedyConfig& cfg, std::size_t workers = 1) {
  detail::require_same_size(family.n(), h.n(), "coupled_greedy_runs");
  cfg.validate();
  std::vector<AlignmentResult> out(family.leaf_count());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t leaf = next++; leaf < out.size(); leaf = next++) {
      out[leaf] = greedy_align(family.leaf_graph(leaf), h, cfg, family.stream_owner(leaf));
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, out.size());
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  return out;
}

}  // namespace gaplab
