#pragma once

// p-admissibility checks. A graph on n vertices is p-admissible when
//   | |E| - C(n,2)p |                 <= 2 sqrt(n² p log n),
//   | |E(H)| - C(|H|,2)p |             <= n² p / (log n)^{1/4}   for every induced H,
//   | |OL(G,π)| - E|OL(G,π)| |         <= 2 sqrt(F(π) n p log n) + 3 sqrt(2 n³ p² log n)   for every π.
// Failed clauses are reported, not thrown.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/overlap.hpp"
#include "gaplab/permutation.hpp"
#include "gaplab/rng.hpp"

namespace gaplab {

enum class CheckMode { Exact, MonteCarlo };

inline const char* to_string(CheckMode m) { return m == CheckMode::Exact ? "exact" : "monte_carlo"; }

inline constexpr std::size_t kExactSubsetCap = 20;
inline constexpr std::size_t kExactPermutationCap = 8;

struct EdgeClause {
  double lhs = 0.0;  // | |E| - C(n,2)p |
  double bound = 0.0;
  bool pass = false;
};

struct SubgraphClause {
  CheckMode mode = CheckMode::Exact;
  double worst_violation = 0.0;  // max over tested H of | |E(H)| - C(|H|,2)p |
  double bound = 0.0;
  bool pass = false;
  std::uint64_t samples = 0;     // subsets examined
  std::vector<Vertex> worst_subset;
};

struct OlClause {
  CheckMode mode = CheckMode::Exact;
  double worst_violation = 0.0;  // max over tested π of deviation / bound(π)
  bool pass = false;
  std::uint64_t samples = 0;     // permutations examined
  std::vector<Vertex> worst_permutation;
};

struct AdmissibilityReport {
  EdgeClause edge;
  SubgraphClause subgraph;
  OlClause ol;
  bool overall = false;
};

struct CheckOptions {
  CheckMode mode = CheckMode::MonteCarlo;
  std::uint64_t samples = 1000;
  Seed seed = Seed(0);
  std::size_t workers = 1;
};

inline double edge_clause_bound(std::size_t n, double p) {
  const double nd = static_cast<double>(n);
  return 2.0 * std::sqrt(nd * nd * p * std::log(nd));
}

inline double subgraph_clause_bound(std::size_t n, double p) {
  const double nd = static_cast<double>(n);
  return nd * nd * p / std::pow(std::log(nd), 0.25);
}

inline double ol_clause_bound(std::size_t n, double p, std::size_t fixed) {
  const double nd = static_cast<double>(n);
  const double log_n = std::log(nd);
  return 2.0 * std::sqrt(static_cast<double>(fixed) * nd * p * log_n) + 3.0 * std::sqrt(2.0 * nd * nd * nd * p * p * log_n);
}

namespace detail {

inline void require_admissibility_input(const Graph& g, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("admissibility: p must lie in (0, 1)");
  if (g.n() < 2) throw std::invalid_argument("admissibility: n must be at least 2");
}

// Runs body(i) for i in [0, count) on `workers` threads; the body writes only
// to slot-owned state, so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::uint64_t count, std::size_t workers, Body&& body) {
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t i = next++; i < count; i = next++) body(i);
  };
  workers = std::max<std::size_t>(1, workers);
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
}

inline std::size_t induced_edges(const Graph& g, const std::vector<char>& in) {
  std::size_t m = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!in[v]) continue;
    for (Vertex u : g.neighbors_below(v, v)) m += in[u] != 0;
  }
  return m;
}

inline double subset_deviation(std::size_t edges, std::size_t k, double p) {
  return std::abs(static_cast<double>(edges) - static_cast<double>(pair_count(k)) * p);
}

inline std::vector<Vertex> members_of_mask(std::uint64_t mask) {
  std::vector<Vertex> out;
  for (Vertex v = 0; mask; ++v, mask >>= 1) {
    if (mask & 1U) out.push_back(v);
  }
  return out;
}

// Every subset of an n <= kExactSubsetCap vertex set, by Gray code.
inline void exhaustive_subsets(const Graph& g, double p, SubgraphClause& out) {
  const std::size_t n = g.n();
  std::vector<std::uint32_t> adj(n, 0);
  g.for_each_edge([&](Vertex i, Vertex j) {
    adj[i] |= 1U << j;
    adj[j] |= 1U << i;
  });
  std::uint32_t set = 0;
  std::size_t edges = 0;
  double worst = 0.0;
  std::uint32_t worst_set = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto v = static_cast<unsigned>(std::countr_zero(step));
    const std::uint32_t bit = 1U << v;
    const auto touching = static_cast<std::size_t>(std::popcount(adj[v] & set));
    if (set & bit) {
      set &= ~bit;
      edges -= touching;
    } else {
      set |= bit;
      edges += touching;
    }
    const double dev = subset_deviation(edges, static_cast<std::size_t>(std::popcount(set)), p);
    if (dev > worst) {
      worst = dev;
      worst_set = set;
    }
  }
  out.worst_violation = worst;
  out.worst_subset = members_of_mask(worst_set);
  out.samples = total;
}

}  // namespace detail

inline EdgeClause check_edge_count(const Graph& g, double p) {
  detail::require_admissibility_input(g, p);
  EdgeClause c;
  c.lhs = std::abs(static_cast<double>(g.edge_count()) - static_cast<double>(pair_count(g.n())) * p);
  c.bound = edge_clause_bound(g.n(), p);
  c.pass = c.lhs <= c.bound;
  return c;
}

/// Exact mode visits all 2ⁿ subsets (n <= 20). Monte Carlo mode checks the
/// prefixes {0..k-1} for every k plus `samples` uniform subsets; when samples
/// reach 2ⁿ it enumerates every subset instead.
inline SubgraphClause check_induced_subgraphs(const Graph& g, double p, const CheckOptions& opt = {}) {
  detail::require_admissibility_input(g, p);
  const std::size_t n = g.n();
  SubgraphClause c;
  c.mode = opt.mode;
  c.bound = subgraph_clause_bound(n, p);
  const bool full_cover = n <= kExactSubsetCap && opt.samples >= (std::uint64_t{1} << n);
  if (opt.mode == CheckMode::Exact || full_cover) {
    if (n > kExactSubsetCap) throw CapExceeded("check_induced_subgraphs: exact mode needs n <= 20");
    detail::exhaustive_subsets(g, p, c);
  } else {
    // Prefixes first.
    double worst = 0.0;
    std::size_t worst_prefix = 0;
    std::size_t edges = 0;
    for (Vertex k = 1; k <= n; ++k) {
      edges += g.neighbors_below(k - 1, k - 1).size();
      const double dev = detail::subset_deviation(edges, k, p);
      if (dev > worst) {
        worst = dev;
        worst_prefix = k;
      }
    }
    std::vector<double> dev(opt.samples, 0.0);
    detail::parallel_for(opt.samples, opt.workers, [&](std::uint64_t i) {
      const CounterRng rng(opt.seed.child("subset").child(i));
      std::vector<char> in(n);
      std::size_t k = 0;
      for (Vertex v = 0; v < n; ++v) k += (in[v] = static_cast<char>(rng.at(v) >> 63));
      dev[i] = detail::subset_deviation(detail::induced_edges(g, in), k, p);
    });
    const auto it = std::max_element(dev.begin(), dev.end());
    if (it != dev.end() && *it > worst) {
      const CounterRng rng(opt.seed.child("subset").child(static_cast<std::uint64_t>(it - dev.begin())));
      worst = *it;
      for (Vertex v = 0; v < n; ++v) {
        if (rng.at(v) >> 63) c.worst_subset.push_back(v);
      }
    } else {
      for (Vertex v = 0; v < worst_prefix; ++v) c.worst_subset.push_back(v);
    }
    c.worst_violation = worst;
    c.samples = n + opt.samples;
  }
  c.pass = c.worst_violation <= c.bound;
  return c;
}

namespace detail {

inline double ol_ratio(const Graph& g, double p, const Permutation& pi) {
  const double expected = expected_ol(g.n(), p, pi.fixed_points(), pi.transpositions());
  const double dev = std::abs(static_cast<double>(ol_count(g, pi)) - expected);
  return dev / ol_clause_bound(g.n(), p, pi.fixed_points());
}

inline std::uint64_t factorial_or_max(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) {
    if (f > UINT64_MAX / k) return UINT64_MAX;
    f *= k;
  }
  return f;
}

}  // namespace detail

/// Exact mode visits all n! permutations (n <= 8). Monte Carlo mode checks
/// the identity plus `samples` uniform permutations; when samples reach n! it
/// enumerates every permutation instead.
inline OlClause check_ol_concentration(const Graph& g, double p, const CheckOptions& opt = {}) {
  detail::require_admissibility_input(g, p);
  const std::size_t n = g.n();
  OlClause c;
  c.mode = opt.mode;
  const bool full_cover = opt.samples >= detail::factorial_or_max(n);
  if (opt.mode == CheckMode::Exact || full_cover) {
    if (n > kExactPermutationCap) throw CapExceeded("check_ol_concentration: exact mode needs n <= 8");
    std::vector<Vertex> images(n);
    for (Vertex v = 0; v < n; ++v) images[v] = v;
    double worst = -1.0;
    do {
      const double r = detail::ol_ratio(g, p, Permutation::from_images(images));
      if (r > worst) {
        worst = r;
        c.worst_permutation = images;
      }
      ++c.samples;
    } while (std::next_permutation(images.begin(), images.end()));
    c.worst_violation = worst;
  } else {
    std::vector<double> ratio(opt.samples, 0.0);
    detail::parallel_for(opt.samples, opt.workers, [&](std::uint64_t i) {
      CounterRng rng(opt.seed.child("permutation").child(i));
      ratio[i] = detail::ol_ratio(g, p, random_permutation(n, rng));
    });
    const double id_ratio = detail::ol_ratio(g, p, Permutation::identity(n));
    const auto it = std::max_element(ratio.begin(), ratio.end());
    if (it != ratio.end() && *it > id_ratio) {
      CounterRng rng(opt.seed.child("permutation").child(static_cast<std::uint64_t>(it - ratio.begin())));
      const Permutation pi = random_permutation(n, rng);
      c.worst_permutation.assign(pi.images().begin(), pi.images().end());
      c.worst_violation = *it;
    } else {
      const Permutation id = Permutation::identity(n);
      c.worst_permutation.assign(id.images().begin(), id.images().end());
      c.worst_violation = id_ratio;
    }
    c.samples = opt.samples + 1;
  }
  c.pass = c.worst_violation <= 1.0;
  return c;
}

inline AdmissibilityReport is_admissible(const Graph& g, double p, const CheckOptions& opt = {}) {
  AdmissibilityReport r;
  r.edge = check_edge_count(g, p);
  r.subgraph = check_induced_subgraphs(g, p, opt);
  r.ol = check_ol_concentration(g, p, opt);
  r.overall = r.edge.pass && r.subgraph.pass && r.ol.pass;
  return r;
}

/// One object per clause; vertex lists are 1-based.
inline nlohmann::ordered_json to_json(const AdmissibilityReport& r) {
  auto one_based = [](const std::vector<Vertex>& v) {
    std::vector<std::uint64_t> out(v.begin(), v.end());
    for (auto& x : out) ++x;
    return out;
  };
  nlohmann::ordered_json j;
  j["edge_clause"] = {{"lhs", r.edge.lhs}, {"bound", r.edge.bound}, {"pass", r.edge.pass}};
  j["subgraph_clause"] = {{"mode", to_string(r.subgraph.mode)},
                          {"worst_violation", r.subgraph.worst_violation},
                          {"bound", r.subgraph.bound},
                          {"pass", r.subgraph.pass},
                          {"samples", r.subgraph.samples},
                          {"worst_subset", one_based(r.subgraph.worst_subset)}};
  j["ol_clause"] = {{"mode", to_string(r.ol.mode)},
                    {"worst_violation_ratio", r.ol.worst_violation},
                    {"pass", r.ol.pass},
                    {"samples", r.ol.samples},
                    {"worst_permutation", one_based(r.ol.worst_permutation)}};
  j["overall"] = r.overall;
  return j;
}

}  // namespace gaplab
