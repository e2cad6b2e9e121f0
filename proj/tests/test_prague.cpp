#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pdim/prague.hpp"

using namespace pdim;

namespace {

NibbleParams small_params() {
  NibbleParams p;
  p.ca = 0.5;
  p.tau = 2;
  return p;
}

Graph path3() {
  Graph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

}  // namespace

// ---- assembly ------------------------------------------------------------

TEST(Assembly, TriangleEdgesNeedThreeColours) {
  const CliquePartition part = trivial_partition(complete_graph(3));
  Rng rng(1, "asm");
  const ColoredCover c = color_partition_assembled(part, 3, {}, rng);
  EXPECT_EQ(c.d, 3u);
  ASSERT_EQ(c.blocks.size(), 1u);
  EXPECT_EQ(c.blocks[0].size, 3u);
}

TEST(Assembly, DisjointGammaCliquesShareOneColour) {
  const CliquePartition part{{{0, 1, 2}, CliqueTag::GammaStar, 0}, {{3, 4, 5}, CliqueTag::GammaStar, 0}};
  Rng rng(2, "asm");
  const ColoredCover c = color_partition_assembled(part, 6, {}, rng);
  EXPECT_EQ(c.d, 1u);
  EXPECT_EQ(c.blocks[0].size, 1u);
  EXPECT_EQ(c.blocks[0].retries, 0);
}

TEST(Assembly, BlocksUseSeparatePalettes) {
  const CliquePartition part{{{0, 1, 2}, CliqueTag::GammaStar, 0},
                             {{3, 4}, CliqueTag::D, 0},
                             {{5, 6}, CliqueTag::S, 0},
                             {{0, 3, 5}, CliqueTag::GammaStar, 1},
                             {{1, 4}, CliqueTag::Final, 2}};
  Rng rng(3, "asm");
  const ColoredCover c = color_partition_assembled(part, 7, {}, rng);
  EXPECT_EQ(c.blocks.size(), 5u);
  EXPECT_EQ(c.d, 5u);
  std::set<Color> colours(c.color.begin(), c.color.end());
  EXPECT_EQ(colours.size(), 5u);
}

TEST(Assembly, ExplicitPaletteRetriesByDoubling) {
  // Three pairwise-intersecting triangles with an initial palette of 1.
  const CliquePartition part{{{0, 1, 2}, CliqueTag::GammaStar, 0},
                             {{0, 3, 4}, CliqueTag::GammaStar, 0},
                             {{0, 5, 6}, CliqueTag::GammaStar, 0}};
  AssemblyOptions opts;
  opts.q_per_gamma = {1};
  Rng rng(4, "asm");
  const ColoredCover c = color_partition_assembled(part, 7, opts, rng);
  EXPECT_EQ(c.d, 3u);
  EXPECT_GE(c.blocks[0].retries, 2);
  EXPECT_GE(c.blocks[0].palette, 3u);
}

// ---- representation ------------------------------------------------------

TEST(Representation, CompleteGraphsNeedOneCoordinate) {
  for (std::size_t n = 2; n <= 64; ++n) {
    Rng rng(n, "kn");
    const PragueResult r = prague_upper(complete_graph(n), small_params(), rng);
    EXPECT_EQ(r.d, 1u) << "n=" << n;
    EXPECT_TRUE(r.rep.extra_coordinate);
  }
}

TEST(Representation, PathOnThreeVertices) {
  Rng rng(5, "p3");
  const PragueResult r = prague_upper(path3(), small_params(), rng);
  EXPECT_EQ(r.d, 2u);
  EXPECT_TRUE(verify_embedding(path3(), r.rep).ok);
}

TEST(Representation, EdgelessGraphsVerify) {
  for (std::size_t n = 1; n <= 8; ++n) {
    Rng rng(n, "empty");
    const Graph g(n);
    const PragueResult r = prague_upper(g, small_params(), rng);
    EXPECT_TRUE(verify_embedding(g, r.rep).ok) << "n=" << n;
    EXPECT_TRUE(r.trivial_partition);
  }
}

TEST(Representation, VerifierCatchesBadVectors) {
  Graph k2(2);
  k2.add_edge(0, 1);
  ProductRepresentation rep;
  rep.d = 1;
  rep.labels = {{1}, {1}};
  EmbeddingReport r = verify_embedding(k2, rep);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.distinct);
  EXPECT_FALSE(r.equivalence);
  rep.labels = {{1}, {2}};
  EXPECT_TRUE(verify_embedding(k2, rep).ok);
  // Non-adjacent pair that differs everywhere.
  const Graph e2(2);
  r = verify_embedding(e2, rep);
  EXPECT_FALSE(r.equivalence);
  rep.labels = {{1}};
  EXPECT_FALSE(verify_embedding(k2, rep).ok);
}

TEST(Representation, RandomGraphsAreCertified) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Rng gr(s, "graph");
    const Graph g = sample_gnp(64, 0.5, gr);
    Rng rng(s, "prague");
    const PragueResult r = prague_upper(g, small_params(), rng);
    EXPECT_FALSE(r.trivial_partition);
    EXPECT_TRUE(verify_embedding(g, r.rep).ok);
    EXPECT_TRUE(verify_partition(complement(g), r.partition.partition).ok);
    EXPECT_LE(r.d, r.cover.d + 1);
  }
}

TEST(Representation, PaletteAccounting) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng gr(s, "graph");
    const Graph g = sample_gnp(48, 0.4, gr);
    Rng rng(s, "prague");
    const PragueResult r = prague_upper(g, small_params(), rng);
    std::size_t total = 0;
    for (const auto& b : r.cover.blocks) total += b.size;
    EXPECT_EQ(r.cover.d, total);
    EXPECT_EQ(r.cover.d, static_cast<std::size_t>(*std::max_element(r.cover.color.begin(), r.cover.color.end())) + 1);
    EXPECT_EQ(r.d, r.cover.d + (r.rep.extra_coordinate ? 1 : 0));
  }
}

TEST(Representation, PartitionSanityBounds) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    Rng gr(s, "graph");
    const Graph h = sample_gnp(150, 0.5, gr);
    Rng rng(s, "part");
    const PartitionRun run = run_partition(h, 0.5, small_params(), rng);
    const PartitionAudit a = verify_partition(h, run.partition);
    ASSERT_TRUE(a.ok);
    const double w = static_cast<double>(a.max_size);
    EXPECT_GE(static_cast<double>(a.thickness), static_cast<double>(h.max_degree()) / (w - 1));
    EXPECT_GE(static_cast<double>(a.size), static_cast<double>(h.edge_count()) / (w * (w - 1) / 2));
  }
}

TEST(Representation, FallbackAlphaForcesTrivialPartition) {
  Rng gr(9, "graph");
  const Graph g = sample_gnp(40, 0.9, gr);
  NibbleParams p = small_params();
  p.fallback_alpha = 0.1;  // complement density ~0.1 <= 40^-0.1
  Rng rng(9, "prague");
  const PragueResult r = prague_upper(g, p, rng);
  EXPECT_TRUE(r.trivial_partition);
  EXPECT_TRUE(verify_embedding(g, r.rep).ok);
}

// ---- lower bounds ---------------------------------------------------------

TEST(LowerBound, PhiAnchors) {
  EXPECT_DOUBLE_EQ(phi(0.5), 1.0);
  EXPECT_LT(phi(1e-50), 0.01);
  // Reference values evaluated at 30 digits.
  EXPECT_NEAR(phi(1e-3), 0.1446924207478912, 1e-14);
  EXPECT_NEAR(phi(0.3), 0.69124612521707776, 1e-14);
  EXPECT_NEAR(phi(0.7), 1.4466627204397879, 1e-14);
  EXPECT_NEAR(phi(0.999), 6.9112120374458129, 1e-12);
  EXPECT_THROW(phi(0.0), std::invalid_argument);
  EXPECT_THROW(phi(1.0), std::invalid_argument);
}

TEST(LowerBound, PhiIsIncreasing) {
  double prev = 0;
  for (int i = 1; i < 1000; ++i) {
    const double v = phi(i / 1000.0);
    EXPECT_GT(v, prev) << "at p=" << i / 1000.0;
    prev = v;
  }
}

TEST(LowerBound, Formulas) {
  const LowerBounds b = lower_bounds(1024, 0.5, 0.5);
  EXPECT_EQ(b.s, 20);
  EXPECT_DOUBLE_EQ(b.phi, 1.0);
  EXPECT_NEAR(b.ccn_lb, 0.5 * 2 * (1024.0 * 1023 / 2) * 0.5 / 190, 1e-9);
  EXPECT_NEAR(b.cct_lb, 0.5 * 2 * 1024 * 0.5 / 19, 1e-12);
  EXPECT_EQ(b.phi_half, 1.0);
  EXPECT_THROW(lower_bounds(100, 0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(lower_bounds(100, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(lower_bounds(100, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(lower_bounds(1, 0.5, 0.5), std::invalid_argument);
}

TEST(LowerBound, BelowExactCliqueCoverOnSmallGraphs) {
  for (std::size_t n = 2; n <= 8; ++n) {
    const LowerBounds b = lower_bounds(n, 0.5, 0.5);
    for (std::uint64_t s = 0; s < 20; ++s) {
      Rng gr(s * 100 + n, "small");
      const Graph g = sample_gnp(n, 0.5, gr);
      if (g.edge_count() == 0) continue;  // optimum 0 defeats any positive bound
      EXPECT_LE(b.ccn_lb, static_cast<double>(oracle::min_clique_cover(g)) + 1e-12);
    }
  }
}

TEST(LowerBound, ExactCoverOracleExamples) {
  EXPECT_EQ(oracle::min_clique_cover(complete_graph(6)), 1u);
  EXPECT_EQ(oracle::min_clique_cover(path3()), 2u);
  EXPECT_EQ(oracle::min_clique_cover(Graph(5)), 0u);
  Graph c5(5);
  for (Vertex v = 0; v < 5; ++v) c5.add_edge(v, (v + 1) % 5);
  EXPECT_EQ(oracle::min_clique_cover(c5), 5u);
}
