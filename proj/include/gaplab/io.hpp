#pragma once

// Text formats. All vertex numbers written or read here are 1-based.
//
// Edge list:   "n m" header, then m lines "i j" with i < j, sorted by (i, j).
// Permutation: one-line word notation, "π(1) π(2) ... π(n)".

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaplab/graph.hpp"
#include "gaplab/permutation.hpp"

namespace gaplab {

inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.n() << ' ' << g.edge_count() << '\n';
  g.for_each_edge([&](Vertex i, Vertex j) { os << i + 1 << ' ' << j + 1 << '\n'; });
}

inline Graph read_edge_list(std::istream& is) {
  long long n = 0;
  long long m = 0;
  if (!(is >> n >> m) || n < 1 || m < 0) throw std::runtime_error("edge list: bad header");
  GraphBuilder b(static_cast<std::size_t>(n));
  for (long long e = 0; e < m; ++e) {
    long long i = 0;
    long long j = 0;
    if (!(is >> i >> j)) throw std::runtime_error("edge list: truncated at edge " + std::to_string(e + 1));
    if (i < 1 || j < 1 || i > n || j > n || i == j) {
      throw std::runtime_error("edge list: invalid pair " + std::to_string(i) + " " + std::to_string(j));
    }
    b.add_edge(static_cast<Vertex>(i - 1), static_cast<Vertex>(j - 1));
  }
  Graph g = std::move(b).build();
  if (g.edge_count() != static_cast<std::size_t>(m)) throw std::runtime_error("edge list: duplicate edges");
  return g;
}

inline std::string to_edge_list(const Graph& g) {
  std::ostringstream os;
  write_edge_list(os, g);
  return os.str();
}

inline Graph from_edge_list(const std::string& text) {
  std::istringstream is(text);
  return read_edge_list(is);
}

inline std::string to_word(const Permutation& pi) {
  std::string out;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(pi(static_cast<Vertex>(i)) + 1);
  }
  return out;
}

inline Permutation from_word(const std::string& text) {
  std::istringstream is(text);
  std::vector<Vertex> images;
  long long v = 0;
  while (is >> v) {
    if (v < 1) throw std::invalid_argument("permutation word: entries are 1-based");
    images.push_back(static_cast<Vertex>(v - 1));
  }
  return Permutation::from_images(std::move(images));
}

}  // namespace gaplab
