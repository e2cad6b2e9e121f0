#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pdim/cliques.hpp"
#include "pdim/graph.hpp"
#include "pdim/rng.hpp"

using namespace pdim;

namespace {

Graph path3() {
  Graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

VertexSet random_subset(std::size_t n, std::size_t size, Rng& rng) {
  std::set<Vertex> s;
  while (s.size() < size) s.insert(static_cast<Vertex>(rng.below(n)));
  return {s.begin(), s.end()};
}

}  // namespace

// ---- Rng -----------------------------------------------------------------

TEST(Rng, SplitmixMatchesReferenceOutput) {
  // First output of the reference splitmix64 generator from state 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, SameSeedAndLabelReplay) {
  Rng a(42, "x"), b(42, "x");
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, LabelsAndSeedsSeparateStreams) {
  Rng a(42, "x"), b(42, "y"), c(43, "x");
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    same_ab += x == b() ? 1 : 0;
    same_ac += x == c() ? 1 : 0;
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(Rng, DeriveAppendsToLabel) {
  Rng a(7, "root");
  Rng d = a.derive("sub");
  EXPECT_EQ(d.label(), "root/sub");
  EXPECT_EQ(d.seed(), 7u);
  Rng direct(7, "root/sub");
  EXPECT_EQ(d(), direct());
}

TEST(Rng, BelowStaysInRangeAndIsRoughlyUniform) {
  Rng r(1, "below");
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = r.below(7);
    ASSERT_LT(x, 7u);
    ++hist[x];
  }
  // Chi-square, 6 df, 0.001 critical value 22.458.
  double chi = 0;
  for (int h : hist) chi += (h - 10000.0) * (h - 10000.0) / 10000.0;
  EXPECT_LT(chi, 22.458);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(2, "u");
  double sum = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean 1/2, sd of the mean sqrt(1/12/1e5) ~ 0.000913.
  EXPECT_NEAR(sum / 100000, 0.5, 4 * 0.000913);
}

TEST(Rng, BernoulliEdgeCases) {
  Rng r(3, "b");
  for (int i = 0; i < 100; ++i) {
    EXPECT_FALSE(r.bernoulli(0.0));
    EXPECT_TRUE(r.bernoulli(1.0));
  }
}

TEST(Rng, GeometricMeanMatchesFailuresBeforeSuccess) {
  Rng r(4, "g");
  const double p = 0.2;
  double sum = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) sum += static_cast<double>(r.geometric(p));
  // Mean (1-p)/p = 4, variance (1-p)/p^2 = 20.
  EXPECT_NEAR(sum / N, 4.0, 4 * std::sqrt(20.0 / N));
  EXPECT_EQ(r.geometric(1.0), 0u);
  EXPECT_EQ(r.geometric(0.0), Rng::max());
}

// ---- sample_gnp ----------------------------------------------------------

TEST(SampleGnp, ZeroAndOneProbability) {
  Rng r(9, "g");
  EXPECT_EQ(sample_gnp(5, 0.0, r).edge_count(), 0u);
  EXPECT_EQ(sample_gnp(5, 1.0, r), complete_graph(5));
  EXPECT_EQ(sample_gnp(5, 1.0, r).edge_count(), 10u);
}

TEST(SampleGnp, RejectsBadInput) {
  Rng r(9, "g");
  EXPECT_THROW(sample_gnp(5, -0.1, r), std::invalid_argument);
  EXPECT_THROW(sample_gnp(5, 1.1, r), std::invalid_argument);
  EXPECT_THROW(sample_gnp(0, 0.5, r), std::invalid_argument);
}

TEST(SampleGnp, Deterministic) {
  Rng a(11, "graph"), b(11, "graph");
  EXPECT_EQ(sample_gnp(80, 0.3, a), sample_gnp(80, 0.3, b));
}

TEST(SampleGnp, MeanEdgeCountIsBinomial) {
  // 1000 seeds of G(100, 1/2); the mean edge count has sd sqrt(4950/4/1000).
  double sum = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng r(s, "mean");
    sum += static_cast<double>(sample_gnp(100, 0.5, r).edge_count());
  }
  const double sd = std::sqrt(4950 * 0.25 / 1000.0);
  EXPECT_NEAR(sum / 1000, 2475.0, 3 * sd);
}

TEST(SampleGnp, DifferentLabelsAreIndependent) {
  // Degree of vertex 0 in G(3, 1/2) under two labels: 3x3 contingency table
  // over 10^4 seeds, chi-square with 4 df, 0.001 critical value 18.467.
  double table[3][3] = {};
  const int N = 10000;
  for (int s = 0; s < N; ++s) {
    Rng a(static_cast<std::uint64_t>(s), "left"), b(static_cast<std::uint64_t>(s), "right");
    const auto da = sample_gnp(3, 0.5, a).degree(0);
    const auto db = sample_gnp(3, 0.5, b).degree(0);
    table[da][db] += 1;
  }
  double row[3] = {}, col[3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      row[i] += table[i][j];
      col[j] += table[i][j];
    }
  double chi = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double e = row[i] * col[j] / N;
      chi += (table[i][j] - e) * (table[i][j] - e) / e;
    }
  EXPECT_LT(chi, 18.467);
}

// ---- Graph ---------------------------------------------------------------

TEST(Graph, RowInvariants) {
  Rng r(5, "inv");
  const Graph g = sample_gnp(130, 0.4, r);
  std::size_t deg_sum = 0;
  for (Vertex u = 0; u < g.n(); ++u) {
    EXPECT_FALSE(g.adjacent(u, u));
    deg_sum += g.degree(u);
    for (Vertex v = 0; v < g.n(); ++v) ASSERT_EQ(g.adjacent(u, v), g.adjacent(v, u));
  }
  EXPECT_EQ(deg_sum, 2 * g.edge_count());
  const auto edges = g.edges();
  EXPECT_EQ(edges.size(), g.edge_count());
  EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end()));
}

TEST(Graph, RejectsSelfLoopsAndRange) {
  Graph g(4);
  EXPECT_THROW(g.add_edge(1, 1), std::invalid_argument);
  EXPECT_THROW(g.add_edge(1, 4), std::out_of_range);
}

TEST(Complement, Examples) {
  EXPECT_EQ(complement(complete_graph(4)).edge_count(), 0u);
  EXPECT_EQ(complement(Graph(3)), complete_graph(3));
  const Graph c = complement(path3());
  EXPECT_EQ(c.edge_count(), 1u);
  EXPECT_TRUE(c.adjacent(0, 2));
}

TEST(Complement, IsAnInvolution) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng r(s, "inv");
    const Graph g = sample_gnp(70, 0.37, r);
    EXPECT_EQ(complement(complement(g)), g);
    EXPECT_EQ(g.edge_count() + complement(g).edge_count(), 70u * 69u / 2u);
  }
}

TEST(EdgeList, RoundTrip) {
  Rng r(6, "io");
  const Graph g = sample_gnp(40, 0.3, r);
  std::stringstream ss;
  write_edge_list(ss, g);
  EXPECT_EQ(read_edge_list(ss), g);
}

TEST(EdgeList, RejectsMalformedInput) {
  auto parse = [](const std::string& s) {
    std::istringstream is(s);
    return read_edge_list(is);
  };
  EXPECT_THROW(parse("3 1\n1 1\n"), std::runtime_error);       // self-loop
  EXPECT_THROW(parse("3 2\n0 1\n0 1\n"), std::runtime_error);  // duplicate
  EXPECT_THROW(parse("3 1\n2 1\n"), std::runtime_error);       // u > v
  EXPECT_THROW(parse("3 2\n0 1\n"), std::runtime_error);       // truncated
  EXPECT_THROW(parse("3 1\n0 3\n"), std::runtime_error);       // out of range
  EXPECT_THROW(parse("x"), std::runtime_error);
  EXPECT_EQ(parse("4 0\n").n(), 4u);
}

// ---- cliques -------------------------------------------------------------

TEST(EnumerateCliques, TriangleHasOneTriangle) {
  const auto c = enumerate_cliques(complete_graph(3), VertexSet{}, 3);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], (VertexSet{0, 1, 2}));
}

TEST(EnumerateCliques, PairsInsideSAreExempt) {
  const Graph empty(6);
  const VertexSet s{1, 3, 4};
  const auto c = enumerate_cliques(empty, s, 3);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], s);
  // S is not a clique but every extension vertex must see all of S.
  Graph g(5);
  g.add_edge(0, 2);
  g.add_edge(1, 2);
  EXPECT_EQ(enumerate_cliques(g, VertexSet{0, 1}, 3), (std::vector<VertexSet>{{0, 1, 2}}));
}

TEST(EnumerateCliques, RejectsBadQueries) {
  const Graph g = complete_graph(5);
  EXPECT_THROW(enumerate_cliques(g, VertexSet{}, 6), std::invalid_argument);
  EXPECT_THROW(enumerate_cliques(g, VertexSet{0, 1, 2}, 2), std::invalid_argument);
  EXPECT_THROW(enumerate_cliques(g, VertexSet{2, 1}, 3), std::invalid_argument);
}

TEST(EnumerateCliques, MatchesSubsetScanOnG12) {
  Rng r(12, "g12");
  const Graph g = sample_gnp(12, 0.5, r);
  EXPECT_EQ(enumerate_cliques(g, VertexSet{}, 4), oracle::cliques_by_subsets(g, {}, 4));
}

TEST(EnumerateCliques, FullSweepAgainstSubsetScanUpTo14) {
  for (std::size_t n = 1; n <= 14; ++n) {
    for (double p : {0.3, 0.6, 0.9}) {
      Rng r(n * 100 + static_cast<std::uint64_t>(p * 10), "sweep");
      const Graph g = sample_gnp(n, p, r);
      for (int j = 0; j <= static_cast<int>(n); ++j) {
        ASSERT_EQ(enumerate_cliques(g, VertexSet{}, j), oracle::cliques_by_subsets(g, {}, j)) << n << " " << j;
        ASSERT_EQ(count_cliques(g, VertexSet{}, j), oracle::cliques_by_subsets(g, {}, j).size());
        // A random S of size <= min(j, 3), clique or not.
        const std::size_t ssize = std::min<std::size_t>(static_cast<std::size_t>(j), r.below(4));
        const VertexSet s = random_subset(n, ssize, r);
        ASSERT_EQ(enumerate_cliques(g, s, j), oracle::cliques_by_subsets(g, s, j)) << n << " " << j;
      }
    }
  }
}

TEST(EnumerateCliques, SampledQueriesAgainstRecursionUpTo60) {
  Rng r(60, "sampled");
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 15 + r.below(46);
    const Graph g = sample_gnp(n, 0.3 + 0.4 * r.uniform(), r);
    const int j = 2 + static_cast<int>(r.below(4));
    const VertexSet s = random_subset(n, r.below(3), r);
    ASSERT_EQ(enumerate_cliques(g, s, j), oracle::cliques_recursive(g, s, j)) << trial;
    ASSERT_EQ(count_cliques(g, s, j), oracle::cliques_recursive(g, s, j).size());
  }
}

TEST(CountCliques, CapSaturates) {
  const Graph g = complete_graph(10);
  EXPECT_EQ(count_cliques(g, VertexSet{}, 3), 120u);
  EXPECT_EQ(count_cliques(g, VertexSet{}, 3, 50), 50u);
  EXPECT_EQ(count_cliques(g, VertexSet{}, 3, 500), 120u);
}

TEST(CommonNeighbors, Examples) {
  EXPECT_EQ(count_common_neighbors(complete_graph(5), VertexSet{0, 1}), 3u);
  EXPECT_EQ(count_common_neighbors(Graph(5), VertexSet{0}), 0u);
  EXPECT_EQ(count_common_neighbors(Graph(7), VertexSet{}), 7u);
}

TEST(CommonNeighbors, MatchesScanOnG50) {
  Rng r(50, "cn");
  const Graph g = sample_gnp(50, 0.5, r);
  for (int t = 0; t < 200; ++t) {
    const VertexSet s = random_subset(50, 3, r);
    ASSERT_EQ(count_common_neighbors(g, s), oracle::common_neighbors_scan(g, s));
  }
}

TEST(CommonNeighbors, AgreesWithCliqueExtensionsWhenSIsAClique) {
  Rng r(51, "cn2");
  const Graph g = sample_gnp(60, 0.6, r);
  int checked = 0;
  for (int t = 0; t < 2000 && checked < 100; ++t) {
    const VertexSet s = random_subset(60, 1 + r.below(3), r);
    if (!is_clique(g, s)) continue;
    ++checked;
    ASSERT_EQ(count_common_neighbors(g, s), enumerate_cliques(g, s, static_cast<int>(s.size()) + 1).size());
  }
  EXPECT_EQ(checked, 100);
}

TEST(EdgeCliqueCounts, MatchEnumeration) {
  Rng r(52, "ecc");
  const Graph g = sample_gnp(40, 0.5, r);
  for (int k = 2; k <= 5; ++k) {
    const auto counts = edge_clique_counts(g, k);
    const auto edges = g.edges();
    ASSERT_EQ(counts.size(), edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
      ASSERT_EQ(counts[e], oracle::cliques_recursive(g, {edges[e].u, edges[e].v}, k).size());
  }
}

TEST(SampleCliques, ExtremesAndSubset) {
  Rng r(53, "sc");
  const Graph g = sample_gnp(30, 0.5, r);
  const auto all = enumerate_cliques(g, VertexSet{}, 4);
  Rng a(1, "a");
  const auto none = sample_cliques(g, 4, 0.0, a);
  EXPECT_TRUE(none.chosen.empty());
  EXPECT_EQ(none.population, all.size());
  const auto every = sample_cliques(g, 4, 1.0, a);
  EXPECT_EQ(every.chosen, all);
  const auto some = sample_cliques(g, 4, 0.3, a);
  EXPECT_TRUE(std::is_sorted(some.chosen.begin(), some.chosen.end()));
  for (const auto& K : some.chosen) EXPECT_TRUE(std::binary_search(all.begin(), all.end(), K));
}

TEST(SampleCliques, InclusionFrequencyIsQ) {
  // Each 3-clique of K_8 (56 of them) kept with probability 0.25, 2000 runs:
  // per-clique frequency sd = sqrt(.25*.75/2000) ~ 0.00968.
  const Graph g = complete_graph(8);
  const auto all = enumerate_cliques(g, VertexSet{}, 3);
  std::vector<int> hits(all.size(), 0);
  for (std::uint64_t s = 0; s < 2000; ++s) {
    Rng r(s, "freq");
    for (const auto& K : sample_cliques(g, 3, 0.25, r).chosen)
      ++hits[static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), K) - all.begin())];
  }
  for (int h : hits) EXPECT_NEAR(h / 2000.0, 0.25, 5 * 0.00968);
}
