#include <gtest/gtest.h>

#include <cmath>

#include "pdim/audit.hpp"
#include "pdim/graph.hpp"
#include "pdim/schedule.hpp"

using namespace pdim;

namespace {

Schedule flat_schedule(std::size_t n, double p, int k, double eps) {
  Schedule s;
  s.n = n;
  s.p = p;
  s.k = k;
  s.rounds_total = 3;
  s.k_pow_tau = 1;
  s.eps = eps;
  for (int i = 0; i <= 3; ++i) s.rounds.push_back({p, k});
  return s;
}

AuditSpec spec_for(std::vector<CliqueSampleSize> r, std::vector<NeighborSampleSize> nb) {
  AuditSpec a;
  a.clique_samples = std::move(r);
  a.neighbor_samples = std::move(nb);
  a.rounds_to_audit = {0};
  return a;
}

}  // namespace

TEST(Audit, CompleteGraphHasZeroDeviation) {
  const Graph g = complete_graph(12);
  const Schedule s = flat_schedule(12, 1.0, 4, 0.01);
  Rng rng(1, "audit");
  const auto spec = spec_for({{0, 3, 1}, {1, 3, 10}, {2, 4, 10}, {3, 4, 10}}, {{0, 1}, {1, 10}, {3, 10}});
  const AuditReport r = audit_R(g, 0, s, spec, rng);
  const AuditReport nb = audit_N(g, 0, s, spec, rng);
  for (const auto& e : r.entries) {
    EXPECT_FALSE(e.insufficient_samples);
    EXPECT_NEAR(e.max_deviation, 0.0, 1e-12);
    EXPECT_TRUE(e.pass);
  }
  for (const auto& e : nb.entries) EXPECT_NEAR(e.max_deviation, 0.0, 1e-12);
  EXPECT_TRUE(r.pass());
  EXPECT_TRUE(nb.pass());
}

TEST(Audit, EdgeAsWholeCliqueCountsOne) {
  Rng gr(3, "g");
  const Graph g = sample_gnp(40, 0.5, gr);
  const Schedule s = flat_schedule(40, 0.5, 3, 0.1);
  Rng rng(2, "audit");
  const AuditReport r = audit_R(g, 0, s, spec_for({{2, 2, 25}}, {}), rng);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].samples.size(), 25u);
  for (const auto& smp : r.entries[0].samples) {
    EXPECT_EQ(smp.observed, 1.0);
    EXPECT_EQ(smp.expected, 1.0);
  }
  EXPECT_EQ(r.entries[0].max_deviation, 0.0);
}

TEST(Audit, EmptySetNeighbourhoodIsEveryVertex) {
  Rng gr(4, "g");
  const Graph g = sample_gnp(33, 0.3, gr);
  const Schedule s = flat_schedule(33, 0.3, 3, 0.1);
  Rng rng(5, "audit");
  const AuditReport nb = audit_N(g, 0, s, spec_for({}, {{0, 7}}), rng);
  ASSERT_EQ(nb.entries[0].samples.size(), 1u);
  EXPECT_EQ(nb.entries[0].samples[0].observed, 33.0);
  EXPECT_EQ(nb.entries[0].samples[0].expected, 33.0);
}

TEST(Audit, EmptyGraphHasInsufficientSamples) {
  const Graph g(20);
  const Schedule s = flat_schedule(20, 0.5, 3, 0.1);
  AuditSpec spec = spec_for({{2, 3, 5}}, {{2, 5}});
  spec.retry_cap = 50;
  Rng rng(6, "audit");
  const AuditReport r = audit_R(g, 0, s, spec, rng);
  EXPECT_TRUE(r.entries[0].insufficient_samples);
  EXPECT_FALSE(r.entries[0].pass);
  EXPECT_FALSE(r.pass_at(1e9));
  const AuditReport nb = audit_N(g, 0, s, spec, rng);
  EXPECT_TRUE(nb.entries[0].insufficient_samples);
}

TEST(Audit, RejectsOutOfRangeSizes) {
  const Schedule s = flat_schedule(10, 0.5, 3, 0.1);
  Rng rng(7, "audit");
  EXPECT_THROW(audit_R(complete_graph(10), 0, s, spec_for({{1, 4, 3}}, {}), rng), std::invalid_argument);
  EXPECT_THROW(audit_R(complete_graph(10), 0, s, spec_for({{3, 2, 3}}, {}), rng), std::invalid_argument);
  EXPECT_THROW(audit_N(complete_graph(10), 0, s, spec_for({}, {{3, 3}}), rng), std::invalid_argument);
}

TEST(Audit, VerdictMonotoneInTolerance) {
  Rng gr(8, "g");
  const Graph g = sample_gnp(120, 0.5, gr);
  const Schedule s = flat_schedule(120, 0.5, 3, std::pow(120.0, -0.1));
  Rng rng(9, "audit");
  const AuditReport r = audit_R(g, 0, s, spec_for({{1, 3, 30}, {2, 3, 30}}, {}), rng);
  bool prev = false;
  for (double m = 0.01; m < 100; m *= 1.5) {
    const bool now = r.pass_at(m);
    EXPECT_TRUE(!prev || now) << "verdict regressed at multiplier " << m;
    prev = now;
  }
  EXPECT_TRUE(r.pass_at(1e6));
}

TEST(Audit, Deterministic) {
  Rng gr(10, "g");
  const Graph g = sample_gnp(80, 0.5, gr);
  const Schedule s = flat_schedule(80, 0.5, 3, 0.2);
  const auto spec = spec_for({{1, 3, 20}}, {{2, 20}});
  Rng a(11, "audit"), b(11, "audit");
  const AuditReport ra = audit_R(g, 0, s, spec, a), rb = audit_R(g, 0, s, spec, b);
  ASSERT_EQ(ra.entries[0].samples.size(), rb.entries[0].samples.size());
  for (std::size_t k = 0; k < ra.entries[0].samples.size(); ++k) {
    EXPECT_EQ(ra.entries[0].samples[k].S, rb.entries[0].samples[k].S);
    EXPECT_EQ(ra.entries[0].samples[k].observed, rb.entries[0].samples[k].observed);
  }
}

// In G(n,p) the degree of a vertex is Bin(n-1, p): deviations from the mean
// stay within a few binomial standard deviations.
TEST(Audit, RoundZeroMatchesBinomialScale) {
  const std::size_t n = 400;
  const double p = 0.5;
  const double sd = std::sqrt((n - 1) * p * (1 - p));
  const double mean = (n - 1) * p;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng gr(seed, "g");
    const Graph g = sample_gnp(n, p, gr);
    const Schedule s = flat_schedule(n, p, 3, 0.1);
    Rng rng(seed, "audit");
    const AuditReport r = audit_R(g, 0, s, spec_for({{1, 2, 40}}, {}), rng);
    const AuditReport nb = audit_N(g, 0, s, spec_for({}, {{1, 40}}), rng);
    EXPECT_LE(r.entries[0].max_deviation * mean, 4.5 * sd);
    EXPECT_LE(nb.entries[0].max_deviation * mean, 4.5 * sd);
  }
}

TEST(Audit, BandsFollowRoundIndex) {
  const Schedule s = flat_schedule(50, 0.5, 3, 0.2);
  Rng rng(12, "audit");
  const Graph g = complete_graph(50);
  const AuditReport r = audit_R(g, 2, s, spec_for({{1, 2, 2}}, {}), rng);
  const AuditReport nb = audit_N(g, 2, s, spec_for({}, {{1, 2}}), rng);
  EXPECT_DOUBLE_EQ(r.entries[0].band, 0.2);
  EXPECT_DOUBLE_EQ(nb.entries[0].band, 3 * 0.04);
}
