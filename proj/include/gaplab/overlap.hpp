#pragma once

// Overlap functionals of a vertex correspondence between two graphs.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/permutation.hpp"

namespace gaplab {

/// Number of pairs i < j with g(i,j) = 1 and h(π(i), π(j)) = 1.
inline std::size_t overlap(const Graph& g, const Graph& h, const Permutation& pi) {
  detail::require_same_size(g.n(), h.n(), "overlap");
  detail::require_same_size(g.n(), pi.size(), "overlap");
  std::size_t total = 0;
  g.for_each_edge([&](Vertex i, Vertex j) { total += h.has_edge(pi(i), pi(j)); });
  return total;
}

/// Mean overlap of any fixed correspondence under G(n,p)⊗G(n,p): C(n,2)p².
inline double mean_overlap(std::size_t n, double p) {
  return static_cast<double>(pair_count(n)) * p * p;
}

inline double centered_overlap(const Graph& g, const Graph& h, const Permutation& pi, double p) {
  return static_cast<double>(overlap(g, h, pi)) - mean_overlap(g.n(), p);
}

/// Streams OL(g, π) = {(i,j) : g(i,j) = g(π(i),π(j)) = 1} to f(i, j), i < j,
/// without materializing it.
template <class F>
void for_each_ol_pair(const Graph& g, const Permutation& pi, F&& f) {
  detail::require_same_size(g.n(), pi.size(), "ol_set");
  g.for_each_edge([&](Vertex i, Vertex j) {
    if (g.has_edge(pi(i), pi(j))) f(i, j);
  });
}

inline std::size_t ol_count(const Graph& g, const Permutation& pi) {
  std::size_t c = 0;
  for_each_ol_pair(g, pi, [&](Vertex, Vertex) { ++c; });
  return c;
}

inline std::vector<Edge> ol_pairs(const Graph& g, const Permutation& pi) {
  std::vector<Edge> out;
  for_each_ol_pair(g, pi, [&](Vertex i, Vertex j) { out.emplace_back(i, j); });
  return out;
}

/// E|OL(G, π)| for G ~ G(n,p) and π with f fixed points and t 2-cycles:
/// [C(f,2) + t](p - p²) + C(n,2)p².
inline double expected_ol(std::size_t n, double p, std::size_t f, std::size_t t) {
  if (f > n || 2 * t > n - f) throw std::invalid_argument("expected_ol: infeasible (fixed points, transpositions)");
  return (static_cast<double>(pair_count(f)) + static_cast<double>(t)) * (p - p * p) + mean_overlap(n, p);
}

}  // namespace gaplab
