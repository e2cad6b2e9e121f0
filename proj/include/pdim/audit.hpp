#pragma once

// Sampled audits of the pseudo-randomness events on an evolving graph G_i:
//   R_i: |C_{S,j,i}| = (1 ± eps) mu_{|S|,j,i}
//   N_i: N_{S,i}     = (1 ± (i+1) eps^2) lambda_{|S|,i}
// The events quantify over every S; here S is drawn uniformly among the
// |S|-cliques of G_i by rejection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pdim/cliques.hpp"
#include "pdim/graph.hpp"
#include "pdim/rng.hpp"
#include "pdim/schedule.hpp"

namespace pdim {

struct CliqueSampleSize {
  int s;
  int j;
  std::size_t count;
};

struct NeighborSampleSize {
  int s;
  std::size_t count;
};

struct AuditSpec {
  std::vector<CliqueSampleSize> clique_samples;      // for R_i
  std::vector<NeighborSampleSize> neighbor_samples;  // for N_i
  std::vector<int> rounds_to_audit;
  double tolerance_multiplier = 1.0;
  std::size_t retry_cap = 2000;  // rejection attempts per requested sample
};

struct AuditSample {
  VertexSet S;
  double observed = 0;
  double expected = 0;
  double deviation = 0;  // |observed / expected - 1|
};

struct AuditEntry {
  int round = 0;
  int s = 0;
  int j = 0;  // unused (0) for N_i entries
  double band = 0;
  double max_deviation = 0;
  VertexSet worst;
  bool pass = true;
  bool insufficient_samples = false;
  std::vector<AuditSample> samples;
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  double tolerance_multiplier = 1.0;

  bool pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const AuditEntry& e) { return e.pass; });
  }
  // Verdict under a different multiplier; deviations are unchanged.
  bool pass_at(double multiplier) const {
    return std::all_of(entries.begin(), entries.end(), [&](const AuditEntry& e) {
      if (e.insufficient_samples) return false;
      return e.max_deviation <= e.band / tolerance_multiplier * multiplier;
    });
  }
};

namespace detail {

// Draws uniform s-subsets until one is a clique of g; false after `tries`.
inline bool draw_clique(const Graph& g, int s, std::size_t tries, Rng& rng, VertexSet& out) {
  const std::size_t n = g.n();
  if (static_cast<std::size_t>(s) > n) return false;
  for (std::size_t t = 0; t < tries; ++t) {
    out.clear();
    // Floyd's algorithm for a uniform s-subset.
    for (std::size_t r = n - static_cast<std::size_t>(s); r < n; ++r) {
      const auto x = static_cast<Vertex>(rng.below(r + 1));
      if (std::find(out.begin(), out.end(), x) == out.end())
        out.push_back(x);
      else
        out.push_back(static_cast<Vertex>(r));
    }
    std::sort(out.begin(), out.end());
    if (is_clique(g, out)) return true;
  }
  return false;
}

inline void finish_entry(AuditEntry& e, double multiplier) {
  bool first = true;
  for (const auto& smp : e.samples)
    if (first || smp.deviation > e.max_deviation) {
      e.max_deviation = smp.deviation;
      e.worst = smp.S;
      first = false;
    }
  e.band *= multiplier;
  e.pass = !e.insufficient_samples && e.max_deviation <= e.band;
}

}  // namespace detail

inline AuditReport audit_R(const Graph& g, int i, const Schedule& sched, const AuditSpec& spec, Rng& rng) {
  AuditReport rep;
  rep.tolerance_multiplier = spec.tolerance_multiplier;
  const int ki = sched.rounds.at(static_cast<std::size_t>(i)).k;
  for (const auto& cs : spec.clique_samples) {
    if (cs.s < 0 || cs.s > cs.j || cs.j > ki)
      throw std::invalid_argument("audit_R: need 0 <= |S| <= j <= k_i");
    AuditEntry e;
    e.round = i;
    e.s = cs.s;
    e.j = cs.j;
    e.band = sched.eps;
    const double expected = mu(cs.s, cs.j, i, sched);
    Rng sub = rng.derive("R/" + std::to_string(cs.s) + "/" + std::to_string(cs.j));
    const std::size_t want = cs.s == 0 ? 1 : cs.count;
    for (std::size_t t = 0; t < want; ++t) {
      VertexSet S;
      if (!detail::draw_clique(g, cs.s, spec.retry_cap, sub, S)) {
        e.insufficient_samples = true;
        break;
      }
      const double obs = static_cast<double>(count_cliques(g, S, cs.j));
      e.samples.push_back({S, obs, expected, std::abs(obs / expected - 1.0)});
    }
    detail::finish_entry(e, spec.tolerance_multiplier);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

inline AuditReport audit_N(const Graph& g, int i, const Schedule& sched, const AuditSpec& spec, Rng& rng) {
  AuditReport rep;
  rep.tolerance_multiplier = spec.tolerance_multiplier;
  const int ki = sched.rounds.at(static_cast<std::size_t>(i)).k;
  for (const auto& ns : spec.neighbor_samples) {
    if (ns.s < 0 || ns.s > ki - 1) throw std::invalid_argument("audit_N: need 0 <= |S| <= k_i - 1");
    AuditEntry e;
    e.round = i;
    e.s = ns.s;
    e.band = (i + 1) * sched.eps * sched.eps;
    const double expected = lambda(ns.s, i, sched);
    Rng sub = rng.derive("N/" + std::to_string(ns.s));
    const std::size_t want = ns.s == 0 ? 1 : ns.count;
    for (std::size_t t = 0; t < want; ++t) {
      VertexSet S;
      if (!detail::draw_clique(g, ns.s, spec.retry_cap, sub, S)) {
        e.insufficient_samples = true;
        break;
      }
      const double obs = static_cast<double>(count_common_neighbors(g, S));
      e.samples.push_back({S, obs, expected, std::abs(obs / expected - 1.0)});
    }
    detail::finish_entry(e, spec.tolerance_multiplier);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace pdim
