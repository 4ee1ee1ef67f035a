#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "gaplab/graph.hpp"
#include "gaplab/io.hpp"
#include "gaplab/overlap.hpp"
#include "gaplab/permutation.hpp"
#include "test_support.hpp"

using namespace gaplab;
using gaplab::test::graph_from_1based;
using gaplab::test::perm_from_1based;

TEST(Graph, BuilderRejectsSelfLoopsAndOutOfRange) {
  GraphBuilder b(4);
  EXPECT_THROW(b.add_edge(2, 2), std::invalid_argument);
  EXPECT_THROW(b.add_edge(0, 4), std::out_of_range);
}

TEST(Graph, SymmetricAndCounted) {
  const Graph g = graph_from_1based(5, {{1, 2}, {2, 3}, {5, 1}});
  EXPECT_EQ(g.edge_count(), 3U);
  for (Vertex i = 0; i < 5; ++i) {
    EXPECT_FALSE(g.has_edge(i, i));
    for (Vertex j = 0; j < 5; ++j) EXPECT_EQ(g.has_edge(i, j), g.has_edge(j, i));
  }
  EXPECT_TRUE(g.has_edge(4, 0));
  std::size_t deg_sum = 0;
  for (Vertex v = 0; v < 5; ++v) deg_sum += g.degree(v);
  EXPECT_EQ(deg_sum, 2 * g.edge_count());
}

TEST(Graph, EdgesInLexicographicOrder) {
  const Graph g = graph_from_1based(4, {{3, 4}, {1, 3}, {1, 2}});
  const auto e = g.edges();
  ASSERT_EQ(e.size(), 3U);
  EXPECT_EQ(e[0], Edge(0, 1));
  EXPECT_EQ(e[1], Edge(0, 2));
  EXPECT_EQ(e[2], Edge(2, 3));
}

TEST(Graph, BitRowsMatchAdjacency) {
  const Graph g = sample_er(130, 0.3, Seed(5));
  for (Vertex i = 0; i < g.n(); ++i) {
    const auto row = g.row(i);
    for (Vertex j = 0; j < g.n(); ++j) {
      const bool bit = (row[j >> 6] >> (j & 63)) & 1U;
      ASSERT_EQ(bit, g.has_edge(i, j));
    }
  }
}

TEST(SampleEr, Extremes) {
  EXPECT_EQ(sample_er(5, 0.0, Seed(9)).edge_count(), 0U);
  EXPECT_EQ(sample_er(5, 1.0, Seed(9)).edge_count(), 10U);
  EXPECT_THROW(sample_er(5, 1.5, Seed(1)), std::invalid_argument);
  EXPECT_THROW(sample_er(5, -0.1, Seed(1)), std::invalid_argument);
}

TEST(SampleEr, Reproducible) {
  EXPECT_EQ(sample_er(80, 0.2, Seed(42)), sample_er(80, 0.2, Seed(42)));
  EXPECT_NE(sample_er(80, 0.2, Seed(42)), sample_er(80, 0.2, Seed(43)));
}

TEST(SampleEr, ReproducibleAcrossThreads) {
  const Graph ref = sample_er(120, 0.1, Seed(3).child("x"));
  std::vector<Graph> out(4, Graph(1));
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 4; ++t) pool.emplace_back([&, t] { out[t] = sample_er(120, 0.1, Seed(3).child("x")); });
  }
  for (const auto& g : out) EXPECT_EQ(g, ref);
}

TEST(SampleEr, MeanEdgeCountWithinFourStandardErrors) {
  constexpr int kSeeds = 10000;
  const double n_pairs = 4950.0;
  const double p = 0.3;
  double sum = 0.0;
  for (int s = 0; s < kSeeds; ++s) sum += static_cast<double>(sample_er(100, p, Seed(s)).edge_count());
  const double mean = sum / kSeeds;
  const double se = std::sqrt(n_pairs * p * (1 - p) / kSeeds);
  EXPECT_NEAR(mean, 1485.0, 4 * se);
}

TEST(Permutation, ValidatesAndInverts) {
  EXPECT_THROW(Permutation::from_images({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Permutation::from_images({0, 3, 1}), std::invalid_argument);
  const Permutation pi = perm_from_1based({3, 1, 2, 4});
  const Permutation inv = pi.inverse();
  for (Vertex i = 0; i < 4; ++i) {
    EXPECT_EQ(inv(pi(i)), i);
    EXPECT_EQ(pi.preimage(pi(i)), i);
  }
}

TEST(Permutation, FixedPointsAndTranspositions) {
  const Permutation id = Permutation::identity(7);
  EXPECT_EQ(fixed_points(id), 7U);
  EXPECT_EQ(transpositions(id), 0U);
  const Permutation swap12 = perm_from_1based({2, 1, 3, 4});
  EXPECT_EQ(fixed_points(swap12), 2U);
  EXPECT_EQ(transpositions(swap12), 1U);
  // (1 2)(3 4 5) on 6 points
  const Permutation mixed = perm_from_1based({2, 1, 4, 5, 3, 6});
  EXPECT_EQ(fixed_points(mixed), 1U);
  EXPECT_EQ(transpositions(mixed), 1U);
}

TEST(Permutation, OverlapAndDistance) {
  const Permutation pi = perm_from_1based({2, 4, 1, 3});
  EXPECT_EQ(permutation_overlap(pi, pi), 4U);
  EXPECT_EQ(permutation_distance(pi, pi), 0U);
  const Permutation id = Permutation::identity(4);
  const Permutation swap12 = perm_from_1based({2, 1, 3, 4});
  EXPECT_EQ(permutation_overlap(id, swap12), 2U);
  EXPECT_EQ(permutation_distance(id, swap12), 2U);
}

TEST(Permutation, OverlapEqualsFixedPointsOfComposition) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    CounterRng rng{Seed(s)};
    const Permutation a = random_permutation(6, rng);
    const Permutation b = random_permutation(6, rng);
    // Independent count: fixed points of a⁻¹∘b by explicit composition.
    std::size_t f = 0;
    for (Vertex i = 0; i < 6; ++i) f += a.preimage(b(i)) == i;
    EXPECT_EQ(permutation_overlap(a, b), f);
    EXPECT_EQ(permutation_overlap(a, b), fixed_points(compose(a.inverse(), b)));
  }
}

TEST(Permutation, RandomPermutationIsUniformOnThreePoints) {
  std::vector<int> counts(6, 0);
  constexpr int kDraws = 60000;
  for (int s = 0; s < kDraws; ++s) {
    CounterRng rng{Seed(s)};
    const Permutation p = random_permutation(3, rng);
    std::vector<Vertex> img(p.images().begin(), p.images().end());
    int rank = 0;
    std::vector<Vertex> ref{0, 1, 2};
    while (ref != img) {
      std::next_permutation(ref.begin(), ref.end());
      ++rank;
    }
    ++counts[rank];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - kDraws / 6.0) * (c - kDraws / 6.0) / (kDraws / 6.0);
  EXPECT_LT(chi2, 15.09);  // 0.99 quantile, 5 dof
}

TEST(Overlap, Examples) {
  const Graph empty(5);
  const Graph k5 = complete_graph(5);
  CounterRng rng(Seed(1));
  const Permutation pi = random_permutation(5, rng);
  EXPECT_EQ(overlap(empty, k5, pi), 0U);
  EXPECT_EQ(overlap(k5, k5, pi), 10U);

  const Graph path = graph_from_1based(3, {{1, 2}, {2, 3}});
  EXPECT_EQ(overlap(path, path, Permutation::identity(3)), 2U);
  EXPECT_EQ(overlap(path, path, perm_from_1based({3, 2, 1})), 2U);
}

TEST(Overlap, CenteredExamples) {
  EXPECT_DOUBLE_EQ(centered_overlap(Graph(4), Graph(4), Permutation::identity(4), 0.0), 0.0);
  EXPECT_DOUBLE_EQ(centered_overlap(complete_graph(4), complete_graph(4), Permutation::identity(4), 1.0), 0.0);
  const Graph path = graph_from_1based(3, {{1, 2}, {2, 3}});
  EXPECT_DOUBLE_EQ(centered_overlap(path, path, Permutation::identity(3), 0.5), 1.25);
}

TEST(Overlap, SizeMismatchThrows) {
  EXPECT_THROW(overlap(Graph(4), Graph(5), Permutation::identity(4)), SizeMismatch);
  EXPECT_THROW(overlap(Graph(4), Graph(4), Permutation::identity(5)), SizeMismatch);
}

TEST(Overlap, SymmetryUnderInverse) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Graph g = sample_er(12, 0.4, Seed(s).child("g"));
    const Graph h = sample_er(12, 0.4, Seed(s).child("h"));
    CounterRng rng(Seed(s).child("pi"));
    const Permutation pi = random_permutation(12, rng);
    EXPECT_EQ(overlap(g, h, pi), overlap(h, g, pi.inverse()));
  }
}

TEST(OlSet, IdentityGivesEdgeSet) {
  const Graph g = sample_er(15, 0.3, Seed(8));
  EXPECT_EQ(ol_count(g, Permutation::identity(15)), g.edge_count());
  EXPECT_EQ(ol_pairs(g, Permutation::identity(15)), g.edges());
  EXPECT_EQ(ol_count(Graph(6), perm_from_1based({2, 3, 1, 5, 6, 4})), 0U);
}

TEST(OlSet, CompleteMinusEdgeUnderDoubleSwap) {
  GraphBuilder b(complete_graph(4));
  b.set_edge(0, 1, false);
  const Graph g = std::move(b).build();
  const Permutation pi = perm_from_1based({3, 4, 1, 2});  // (1 3)(2 4)
  // Edges and their images: (1,3)->(3,1), (1,4)->(3,2), (2,3)->(4,1), (2,4)->(4,2), (3,4)->(1,2).
  const std::vector<Edge> expected{{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  EXPECT_EQ(ol_pairs(g, pi), expected);
  EXPECT_EQ(ol_count(g, pi), 4U);
}

TEST(ExpectedOl, Examples) {
  EXPECT_NEAR(expected_ol(10, 0.3, 10, 0), 45 * 0.3, 1e-12);
  EXPECT_NEAR(expected_ol(10, 0.3, 0, 0), 4.05, 1e-12);
  EXPECT_NEAR(expected_ol(10, 0.3, 6, 2), 7.62, 1e-12);
  EXPECT_THROW(expected_ol(10, 0.3, 11, 0), std::invalid_argument);
  EXPECT_THROW(expected_ol(10, 0.3, 6, 3), std::invalid_argument);
}

TEST(Io, EdgeListRoundTrip) {
  const Graph g = sample_er(40, 0.2, Seed(4));
  const std::string text = to_edge_list(g);
  EXPECT_EQ(from_edge_list(text), g);
  EXPECT_EQ(to_edge_list(from_edge_list(text)), text);
  EXPECT_EQ(to_edge_list(graph_from_1based(3, {{2, 3}, {1, 2}})), "3 2\n1 2\n2 3\n");
}

TEST(Io, EdgeListRejectsMalformedInput) {
  EXPECT_THROW(from_edge_list("x"), std::runtime_error);
  EXPECT_THROW(from_edge_list("3 2\n1 2\n"), std::runtime_error);
  EXPECT_THROW(from_edge_list("3 1\n1 4\n"), std::runtime_error);
  EXPECT_THROW(from_edge_list("3 1\n2 2\n"), std::runtime_error);
  EXPECT_THROW(from_edge_list("3 2\n1 2\n2 1\n"), std::runtime_error);
}

TEST(Io, PermutationWordRoundTrip) {
  const Permutation pi = perm_from_1based({4, 1, 3, 2});
  EXPECT_EQ(to_word(pi), "4 1 3 2");
  EXPECT_EQ(from_word("4 1 3 2").images().size(), 4U);
  EXPECT_EQ(permutation_overlap(from_word(to_word(pi)), pi), 4U);
  EXPECT_THROW(from_word("0 1 2"), std::invalid_argument);
}
