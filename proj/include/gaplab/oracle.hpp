#pragma once

// Exhaustive oracles for small instances: exact maximum overlap, β-optimal
// solution sets, and detectors for the two forbidden structures (2-OGP on a
// pair of correlated instances, branching OGP on a tree family).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gaplab/correlated.hpp"
#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/io.hpp"
#include "gaplab/overlap.hpp"
#include "gaplab/permutation.hpp"
#include "gaplab/thresholds.hpp"

namespace gaplab {

inline constexpr std::size_t kDefaultBruteCap = 10;

/// Knuth's plain changes (Steinhaus–Johnson–Trotter order) over m items:
/// visit(npos) for the starting arrangement, then visit(k) after each adjacent
/// swap of positions k and k+1, which the caller performs. m! visits in total.
template <class Visit>
void plain_changes(std::size_t m, Visit&& visit) {
  constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  visit(npos);
  if (m < 2) return;
  std::vector<long> c(m + 1, 0);
  std::vector<long> o(m + 1, 1);
  const long mm = static_cast<long>(m);
  for (;;) {
    long j = mm;
    long s = 0;
    for (;;) {
      const long q = c[j] + o[j];
      if (q < 0) {
        o[j] = -o[j];
        --j;
        continue;
      }
      if (q == j) {
        if (j == 1) return;
        ++s;
        o[j] = -o[j];
        --j;
        continue;
      }
      const long x = j - c[j] + s;
      const long y = j - q + s;
      c[j] = q;
      visit(static_cast<std::size_t>(std::min(x, y) - 1));
      break;
    }
  }
}

namespace detail {

inline void check_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) throw CapExceeded(std::string(what) + ": n = " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
}

/// Enumerates every correspondence with π(0) = first, in plain-changes order
/// over the other positions, maintaining the overlap incrementally.
template <class Visit>
void enumerate_branch(const Graph& g, const Graph& h, Vertex first, Visit&& visit) {
  const std::size_t n = g.n();
  std::vector<Vertex> image(n);
  image[0] = first;
  for (Vertex v = 0, pos = 1; v < n; ++v) {
    if (v != first) image[pos++] = v;
  }
  std::size_t value = 0;
  g.for_each_edge([&](Vertex i, Vertex j) { value += h.has_edge(image[i], image[j]); });
  const std::span<const Vertex> view(image);
  plain_changes(n - 1, [&](std::size_t k) {
    if (k != std::numeric_limits<std::size_t>::max()) {
      const Vertex x = static_cast<Vertex>(k + 1);
      const Vertex y = x + 1;
      long delta = 0;
      for (Vertex z : g.neighbors(x)) {
        if (z != y) delta += static_cast<long>(h.has_edge(image[y], image[z])) - h.has_edge(image[x], image[z]);
      }
      for (Vertex z : g.neighbors(y)) {
        if (z != x) delta += static_cast<long>(h.has_edge(image[x], image[z])) - h.has_edge(image[y], image[z]);
      }
      std::swap(image[x], image[y]);
      value = static_cast<std::size_t>(static_cast<long>(value) + delta);
    }
    visit(view, value);
  });
}

}  // namespace detail

/// Calls visit(images, overlap) for all n! correspondences.
template <class Visit>
void for_each_alignment(const Graph& g, const Graph& h, std::size_t cap, Visit&& visit) {
  detail::require_same_size(g.n(), h.n(), "for_each_alignment");
  detail::check_cap(g.n(), cap, "for_each_alignment");
  for (Vertex first = 0; first < g.n(); ++first) detail::enumerate_branch(g, h, first, visit);
}

struct BruteResult {
  std::size_t max_value = 0;
  Permutation argmax;            // lexicographically smallest maximizer
  std::uint64_t argmax_count = 0;
};

/// Exact max over all n! correspondences. Branches on π(0) run on `workers`
/// threads; the reduction is in branch order, so the result does not depend
/// on the worker count.
inline BruteResult brute_max_overlap(const Graph& g, const Graph& h, std::size_t cap = kDefaultBruteCap,
                                     std::size_t workers = 1) {
  detail::require_same_size(g.n(), h.n(), "brute_max_overlap");
  detail::check_cap(g.n(), cap, "brute_max_overlap");
  const std::size_t n = g.n();
  struct Branch {
    std::size_t best = 0;
    std::uint64_t count = 0;
    std::vector<Vertex> argmax;
  };
  std::vector<Branch> branches(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t v = next++; v < n; v = next++) {
      Branch& b = branches[v];
      detail::enumerate_branch(g, h, static_cast<Vertex>(v), [&](std::span<const Vertex> images, std::size_t value) {
        if (b.count == 0 || value > b.best) {
          b.best = value;
          b.count = 1;
          b.argmax.assign(images.begin(), images.end());
        } else if (value == b.best) {
          ++b.count;
          if (std::lexicographical_compare(images.begin(), images.end(), b.argmax.begin(), b.argmax.end())) {
            b.argmax.assign(images.begin(), images.end());
          }
        }
      });
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  BruteResult out;
  const Branch* winner = nullptr;
  for (const Branch& b : branches) {
    if (!winner || b.best > out.max_value) {
      out.max_value = b.best;
      out.argmax_count = b.count;
      winner = &b;
    } else if (b.best == out.max_value) {
      out.argmax_count += b.count;
    }
  }
  out.argmax = Permutation::from_images(winner->argmax);
  return out;
}

// ---------------------------------------------------------------------------
// Solution sets

/// Minimum centered overlap for membership in S_β. Comparisons allow a
/// relative slack of 1e-9 so that a threshold rebuilt from β = value / scale
/// still admits the value it came from.
struct SolutionThreshold {
  double value = 0.0;
  std::optional<double> beta;
  std::optional<double> scale;

  static SolutionThreshold absolute(double centered_min) { return {centered_min, std::nullopt, std::nullopt}; }
  static SolutionThreshold relative(double beta, double scale) { return {beta * scale, beta, scale}; }
  /// β times S_{n,p} (sparse) or D_{n,p} (dense). Throws DomainError where the
  /// scale is undefined.
  static SolutionThreshold asymptotic(double beta, Regime regime, std::size_t n, double p) {
    const double nd = static_cast<double>(n);
    switch (regime) {
      case Regime::Sparse: return relative(beta, s_np(nd, p));
      case Regime::Dense: return relative(beta, d_np(nd, p));
      case Regime::Critical: break;
    }
    throw DomainError("no asymptotic scale in the critical window");
  }

  [[nodiscard]] bool admits(double centered) const {
    return centered >= value - 1e-9 * std::max(1.0, std::abs(value));
  }
};

struct SolutionSet {
  SolutionThreshold threshold;
  std::vector<Permutation> members;  // lexicographic order
  [[nodiscard]] std::size_t count() const noexcept { return members.size(); }
};

inline SolutionSet enumerate_solution_set(const Graph& g, const Graph& h, double p, const SolutionThreshold& threshold,
                                          std::size_t cap = kDefaultBruteCap) {
  const double mean = mean_overlap(g.n(), p);
  std::vector<std::vector<Vertex>> raw;
  for_each_alignment(g, h, cap, [&](std::span<const Vertex> images, std::size_t value) {
    if (threshold.admits(static_cast<double>(value) - mean)) raw.emplace_back(images.begin(), images.end());
  });
  std::sort(raw.begin(), raw.end());
  SolutionSet set{threshold, {}};
  set.members.reserve(raw.size());
  for (auto& r : raw) set.members.push_back(Permutation::from_images(std::move(r)));
  return set;
}

// ---------------------------------------------------------------------------
// 2-OGP

/// Forbidden overlap band ((ρ₀ - η)n, (ρ₀ + η)n), open at both ends.
struct ForbiddenBand {
  double rho0 = 1.0 / 3.0;
  double eta = 0.0;

  [[nodiscard]] double lower(std::size_t n) const { return (rho0 - eta) * static_cast<double>(n); }
  [[nodiscard]] double upper(std::size_t n) const { return (rho0 + eta) * static_cast<double>(n); }
  [[nodiscard]] bool contains(std::size_t overlap_count, std::size_t n) const {
    const auto v = static_cast<double>(overlap_count);
    return v > lower(n) && v < upper(n);
  }

  /// 2 - ρ₀ + η - 2β₀² / (1 + (ρ₀ + η)²) < 0.
  [[nodiscard]] bool satisfies_gap_condition(double beta0) const {
    return 2.0 - rho0 + eta - 2.0 * beta0 * beta0 / (1.0 + (rho0 + eta) * (rho0 + eta)) < 0.0;
  }

  /// Band with ρ₀ = 1/3, validated against β₀ ∈ (sqrt(25/27), 1) and the gap
  /// condition.
  static ForbiddenBand for_beta(double beta0, double eta) {
    if (!(beta0 > std::sqrt(25.0 / 27.0) && beta0 < 1.0)) throw std::invalid_argument("beta0 must lie in (sqrt(25/27), 1)");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    ForbiddenBand band{1.0 / 3.0, eta};
    if (!band.satisfies_gap_condition(beta0)) throw std::invalid_argument("eta too large for beta0");
    return band;
  }

  /// Supremum of admissible η for β₀ (bisection on the gap condition).
  static double max_eta(double beta0) {
    double lo = 0.0;
    double hi = 1.0;
    if (!ForbiddenBand{1.0 / 3.0, 0.0}.satisfies_gap_condition(beta0)) return 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = (lo + hi) / 2.0;
      (ForbiddenBand{1.0 / 3.0, mid}.satisfies_gap_condition(beta0) ? lo : hi) = mid;
    }
    return lo;
  }
};

using Witness2 = std::pair<Permutation, Permutation>;

namespace detail {

inline std::optional<Witness2> find_band_pair(const SolutionSet& s1, const SolutionSet& s2, const ForbiddenBand& band,
                                              std::size_t n) {
  for (const auto& a : s1.members) {
    for (const auto& b : s2.members) {
      if (band.contains(permutation_overlap(a, b), n)) return Witness2{a, b};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Searches S(g1, h) × S(g2, h) in lexicographic order for a pair whose
/// permutation overlap falls in the band.
inline std::optional<Witness2> detect_forbidden_2ogp(const Graph& g1, const Graph& g2, const Graph& h, double p,
                                                     const ForbiddenBand& band, const SolutionThreshold& threshold,
                                                     std::size_t cap = 8) {
  detail::require_same_size(g1.n(), g2.n(), "detect_forbidden_2ogp");
  const SolutionSet s1 = enumerate_solution_set(g1, h, p, threshold, cap);
  if (s1.members.empty()) return std::nullopt;
  const SolutionSet s2 = enumerate_solution_set(g2, h, p, threshold, cap);
  return detail::find_band_pair(s1, s2, band, g1.n());
}

struct InterpolationReport {
  std::size_t path_length = 0;     // number of graphs G^0..G^N
  std::optional<bool> ogp_holds;   // unset when n exceeds the exhaustive cap
  bool suc_holds = false;
  bool stable_holds = false;
  bool ends_holds = false;
  std::vector<std::size_t> step_distances;     // d(π_k, π_{k+1})
  std::vector<std::size_t> overlaps_to_start;  // overlap(π_0, π_k)
};

using PairAlgorithm = std::function<Permutation(const Graph&, const Graph&)>;

/// Runs `algorithm` along the interpolation path G^k (labels < k from g, the
/// rest from g_prime) and evaluates the four events: no forbidden pair between
/// G^0 and any G^k, every output β-optimal, consecutive outputs within ηn, and
/// end outputs overlapping at most (ρ₀ - η)n. The four cannot hold together;
/// if they do, the scan throws std::logic_error.
inline InterpolationReport interpolation_ogp_scan(const Graph& g, const Graph& g_prime, const Graph& h, double p,
                                                  const ForbiddenBand& band, const SolutionThreshold& threshold,
                                                  const PairAlgorithm& algorithm, std::size_t cap = 8) {
  detail::require_same_size(g.n(), g_prime.n(), "interpolation_ogp_scan");
  detail::require_same_size(g.n(), h.n(), "interpolation_ogp_scan");
  const std::size_t n = g.n();
  const std::uint64_t labels = pair_count(n);
  const double mean = mean_overlap(n, p);
  const bool exhaustive = n <= cap;

  InterpolationReport rep;
  rep.path_length = labels + 1;
  rep.suc_holds = true;
  rep.stable_holds = true;
  bool ogp = true;

  std::optional<SolutionSet> start_set;
  std::optional<Permutation> first;
  std::optional<Permutation> previous;
  for (std::uint64_t k = 0; k <= labels; ++k) {
    const Graph gk = interpolation_path(g, g_prime, k);
    Permutation pi = algorithm(gk, h);
    if (!threshold.admits(static_cast<double>(overlap(gk, h, pi)) - mean)) rep.suc_holds = false;
    if (previous) {
      const std::size_t d = permutation_distance(*previous, pi);
      rep.step_distances.push_back(d);
      if (static_cast<double>(d) > band.eta * static_cast<double>(n)) rep.stable_holds = false;
    }
    if (!first) first = pi;
    rep.overlaps_to_start.push_back(permutation_overlap(*first, pi));
    if (exhaustive && ogp) {
      if (!start_set) start_set = enumerate_solution_set(gk, h, p, threshold, cap);
      if (!start_set->members.empty()) {
        const SolutionSet sk = enumerate_solution_set(gk, h, p, threshold, cap);
        if (detail::find_band_pair(*start_set, sk, band, n)) ogp = false;
      }
    }
    previous = std::move(pi);
  }
  rep.ends_holds = static_cast<double>(rep.overlaps_to_start.back()) <= band.lower(n);
  if (exhaustive) rep.ogp_holds = ogp;

  if (rep.ogp_holds.value_or(false) && rep.suc_holds && rep.stable_holds && rep.ends_holds) {
    throw std::logic_error("interpolation scan: OGP, success, stability and end events hold simultaneously");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Branching OGP

namespace detail {

class BranchingSearch {
 public:
  BranchingSearch(const CorrelatedFamily& family, const Graph& h, double p, const SolutionThreshold& threshold)
      : family_(family), h_(h), threshold_(threshold), mean_(mean_overlap(family.n(), p)),
        image_(family.n(), 0), used_(family.n(), 0), witness_(family.leaf_count()) {
    leaves_.reserve(family.leaf_count());
    for (std::size_t leaf = 0; leaf < family.leaf_count(); ++leaf) leaves_.push_back(family.leaf_graph(leaf));
  }

  std::optional<std::vector<Permutation>> run() {
    if (!solve_children(0, 0)) return std::nullopt;
    return witness_;
  }

 private:
  // Node (level, id): children are (level + 1, id * D + c).
  bool solve_children(std::size_t level, std::size_t id) {
    for (std::size_t c = 0; c < family_.branching(); ++c) {
      if (!solve_node(level + 1, id * family_.branching() + c)) return false;
    }
    return true;
  }

  bool solve_node(std::size_t level, std::size_t id) {
    const auto& cuts = family_.cuts();
    return assign(level, id, cuts[level - 1], cuts[level]);
  }

  // Assigns images to columns [pos, end) of the node's block in lexicographic
  // order, then descends.
  bool assign(std::size_t level, std::size_t id, std::size_t pos, std::size_t end) {
    if (pos == end) return block_done(level, id);
    for (Vertex r = 0; r < image_.size(); ++r) {
      if (used_[r]) continue;
      used_[r] = 1;
      image_[pos] = r;
      const bool ok = assign(level, id, pos + 1, end);
      used_[r] = 0;
      if (ok) return true;
    }
    return false;
  }

  bool block_done(std::size_t level, std::size_t id) {
    if (level < family_.depth()) return solve_children(level, id);
    const Graph& g = leaves_[id];
    std::size_t value = 0;
    g.for_each_edge([&](Vertex i, Vertex j) { value += h_.has_edge(image_[i], image_[j]); });
    if (!threshold_.admits(static_cast<double>(value) - mean_)) return false;
    witness_[id] = Permutation::from_images(image_);
    return true;
  }

  const CorrelatedFamily& family_;
  const Graph& h_;
  SolutionThreshold threshold_;
  double mean_;
  std::vector<Graph> leaves_;
  std::vector<Vertex> image_;
  std::vector<char> used_;
  std::vector<Permutation> witness_;
};

}  // namespace detail

/// Searches for {π_v} with every π_v β-optimal on (G^v, h) and
/// π_u(i) = π_v(i) for i <= α_{|u∧v|} n. Prefix-consistent tuples are built
/// as one embedding per tree node (the node's column block), children searched
/// independently given their ancestors. Returns the witness indexed by leaf.
inline std::optional<std::vector<Permutation>> detect_forbidden_branching(const CorrelatedFamily& family, const Graph& h,
                                                                          double p, const SolutionThreshold& threshold,
                                                                          std::size_t cap = 8,
                                                                          std::size_t leaf_cap = 8) {
  detail::require_same_size(family.n(), h.n(), "detect_forbidden_branching");
  detail::check_cap(family.n(), cap, "detect_forbidden_branching");
  if (family.leaf_count() > leaf_cap) throw CapExceeded("detect_forbidden_branching: too many leaves");
  return detail::BranchingSearch(family, h, p, threshold).run();
}

/// True when `perms` (indexed by leaf) agree on positions <= α_{|u∧v|} n for
/// every leaf pair.
inline bool prefix_consistent(const CorrelatedFamily& family, std::span<const Permutation> perms) {
  for (std::size_t u = 0; u < perms.size(); ++u) {
    for (std::size_t v = u + 1; v < perms.size(); ++v) {
      const std::size_t shared = family.cuts()[family.common_depth(u, v)];
      for (std::size_t i = 0; i < shared; ++i) {
        if (perms[u](static_cast<Vertex>(i)) != perms[v](static_cast<Vertex>(i))) return false;
      }
    }
  }
  return true;
}

/// Witness block: "leaf <path> : <one-line word, 1-based>" per leaf.
inline void write_witness(std::ostream& os, const CorrelatedFamily& family, std::span<const Permutation> perms) {
  for (std::size_t leaf = 0; leaf < perms.size(); ++leaf) {
    const auto path = family.leaf_path(leaf);
    os << "leaf ";
    for (std::size_t k = 0; k < path.size(); ++k) os << (k ? "." : "") << path[k];
    os << " : " << to_word(perms[leaf]) << '\n';
  }
}

inline void write_witness(std::ostream& os, const Witness2& w) {
  os << "pi1 : " << to_word(w.first) << '\n' << "pi2 : " << to_word(w.second) << '\n';
}

}  // namespace gaplab
