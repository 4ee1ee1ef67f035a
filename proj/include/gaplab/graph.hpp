#pragma once

// Simple undirected graphs on vertices {0, ..., n-1}.
//
// The library API is 0-based throughout. Text formats (edge lists, witness
// blocks, trajectory CSV, CLI output) are 1-based; the conversion happens only
// in io.hpp and the CLI.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gaplab/errors.hpp"
#include "gaplab/rng.hpp"

namespace gaplab {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// C(n, 2) as an unsigned count.
constexpr std::uint64_t pair_count(std::uint64_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }

class GraphBuilder;

/// Immutable symmetric simple graph. Stores full bit rows (O(1) membership,
/// popcount row intersections) and sorted CSR adjacency lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t edge_count() const noexcept { return m_; }
  [[nodiscard]] std::size_t words_per_row() const noexcept { return words_; }

  [[nodiscard]] bool has_edge(Vertex i, Vertex j) const noexcept {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1ULL;
  }
  [[nodiscard]] std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  /// Neighbours of v with index below `bound` (a prefix of the sorted list).
  [[nodiscard]] std::span<const Vertex> neighbors_below(Vertex v, Vertex bound) const noexcept {
    auto nb = neighbors(v);
    auto it = std::lower_bound(nb.begin(), nb.end(), bound);
    return nb.first(static_cast<std::size_t>(it - nb.begin()));
  }
  [[nodiscard]] std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  [[nodiscard]] std::span<const std::uint64_t> row(Vertex v) const noexcept {
    return {bits_.data() + v * words_, words_};
  }

  /// Calls f(i, j) for every edge with i < j, in (i, j) lexicographic order.
  template <class F>
  void for_each_edge(F&& f) const {
    for (Vertex i = 0; i < n_; ++i) {
      for (Vertex j : neighbors(i)) {
        if (j > i) f(i, j);
      }
    }
  }

  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for_each_edge([&](Vertex i, Vertex j) { out.emplace_back(i, j); });
    return out;
  }

  [[nodiscard]] double density() const noexcept {
    const auto pairs = pair_count(n_);
    return pairs == 0 ? 0.0 : static_cast<double>(m_) / static_cast<double>(pairs);
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.bits_ == b.bits_; }

 private:
  friend class GraphBuilder;

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::size_t m_ = 0;
  std::vector<std::uint64_t> bits_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> adj_;
};

/// Mutable bit-matrix used to assemble a Graph.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n)
      : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}
  explicit GraphBuilder(const Graph& g) : n_(g.n_), words_(g.words_), bits_(g.bits_) {}

  [[nodiscard]] std::size_t n() const noexcept { return n_; }

  void set_edge(Vertex i, Vertex j, bool present) {
    check(i, j);
    if (present) {
      bits_[i * words_ + (j >> 6)] |= 1ULL << (j & 63);
      bits_[j * words_ + (i >> 6)] |= 1ULL << (i & 63);
    } else {
      bits_[i * words_ + (j >> 6)] &= ~(1ULL << (j & 63));
      bits_[j * words_ + (i >> 6)] &= ~(1ULL << (i & 63));
    }
  }
  void add_edge(Vertex i, Vertex j) { set_edge(i, j, true); }
  void toggle_edge(Vertex i, Vertex j) { set_edge(i, j, !has_edge(i, j)); }
  [[nodiscard]] bool has_edge(Vertex i, Vertex j) const noexcept {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1ULL;
  }

  [[nodiscard]] Graph build() const& { return GraphBuilder(*this).finish(); }
  [[nodiscard]] Graph build() && { return finish(); }

 private:
  void check(Vertex i, Vertex j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("vertex index out of range");
    if (i == j) throw std::invalid_argument("self-loops are not allowed");
  }

  Graph finish() {
    Graph g;
    g.n_ = n_;
    g.words_ = words_;
    g.bits_ = std::move(bits_);
    g.offsets_.assign(n_ + 1, 0);
    std::size_t total = 0;
    for (std::size_t v = 0; v < n_; ++v) {
      for (std::size_t w = 0; w < words_; ++w) total += std::popcount(g.bits_[v * words_ + w]);
      g.offsets_[v + 1] = total;
    }
    g.adj_.resize(total);
    std::size_t pos = 0;
    for (std::size_t v = 0; v < n_; ++v) {
      for (std::size_t w = 0; w < words_; ++w) {
        std::uint64_t word = g.bits_[v * words_ + w];
        while (word != 0) {
          g.adj_[pos++] = static_cast<Vertex>(w * 64 + std::countr_zero(word));
          word &= word - 1;
        }
      }
    }
    g.m_ = total / 2;
    return g;
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

inline Graph::Graph(std::size_t n) : Graph(GraphBuilder(n).build()) {}

inline Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  GraphBuilder b(n);
  for (auto [i, j] : edges) b.add_edge(i, j);
  return std::move(b).build();
}

inline Graph complete_graph(std::size_t n) {
  GraphBuilder b(n);
  for (Vertex j = 1; j < n; ++j)
    for (Vertex i = 0; i < j; ++i) b.add_edge(i, j);
  return std::move(b).build();
}

/// Stream that drives the indicators of column j, i.e. pairs (i, j) with i < j.
/// Indicator (i, j) is draw number i of that stream.
inline CounterRng column_stream(const Seed& seed, Vertex j) { return CounterRng(seed.child(j)); }

/// Draws the indicators of column j from `seed` into the builder.
inline void fill_column(GraphBuilder& b, const Seed& seed, Vertex j, double p, Vertex first_row = 0) {
  const CounterRng rng = column_stream(seed, j);
  for (Vertex i = first_row; i < j; ++i) {
    if (rng.uniform01_at(i) < p) b.add_edge(i, j);
  }
}

/// Erdős–Rényi G(n, p): each unordered pair is an edge independently with
/// probability p. Deterministic given the seed.
inline Graph sample_er(std::size_t n, double p, const Seed& seed) {
  if (n < 1) throw std::invalid_argument("sample_er: n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_er: p must lie in [0, 1]");
  GraphBuilder b(n);
  if (p > 0.0) {
    for (Vertex j = 1; j < n; ++j) fill_column(b, seed, j, p);
  }
  return std::move(b).build();
}

}  // namespace gaplab
