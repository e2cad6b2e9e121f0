#pragma once

// Semi-random greedy clique partition.
//
// Round i samples each k_i-clique of the current graph with probability q_i
// (Gamma_i), samples each edge e with probability zeta_{e,i} (S_i), keeps a
// greedy edge-disjoint subcollection Gamma_i* of Gamma_i, and turns the
// remaining covered edges into single-edge cliques (D_i). All of E(Gamma_i)
// and S_i leave the graph. After the last round the surviving edges are
// appended as 2-cliques.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pdim/cliques.hpp"
#include "pdim/graph.hpp"
#include "pdim/rng.hpp"
#include "pdim/schedule.hpp"

namespace pdim {

enum class CliqueTag { GammaStar, D, S, Final };

inline std::string_view to_string(CliqueTag t) {
  switch (t) {
    case CliqueTag::GammaStar: return "gamma_star";
    case CliqueTag::D: return "d";
    case CliqueTag::S: return "s";
    case CliqueTag::Final: return "final";
  }
  return "?";
}

inline CliqueTag parse_clique_tag(std::string_view s) {
  if (s == "gamma_star") return CliqueTag::GammaStar;
  if (s == "d") return CliqueTag::D;
  if (s == "s") return CliqueTag::S;
  if (s == "final") return CliqueTag::Final;
  throw std::invalid_argument("unknown clique tag: " + std::string(s));
}

struct PartClique {
  VertexSet vertices;
  CliqueTag tag;
  int round;
  friend bool operator==(const PartClique&, const PartClique&) = default;
};

using CliquePartition = std::vector<PartClique>;

struct RoundOutput {
  int round = 0;
  int k = 0;
  double q = 0;
  bool q_clamped = false;
  bool skipped = false;         // k_i <= 2 or no edges left
  std::uint64_t population = 0; // |C_{∅,k_i,i}|
  std::vector<VertexSet> gamma;
  std::vector<VertexSet> gamma_star;
  std::vector<Edge> d_edges;
  std::vector<Edge> s_edges;    // S_i \ E(Gamma_i)
  std::size_t s_sampled = 0;    // |S_i|
  std::size_t removed_edge_count = 0;
};

struct RoundResult {
  RoundOutput output;
  Graph next;
};

inline RoundResult run_round(const Graph& g, int i, const Schedule& sched, Rng& rng) {
  if (g.n() != sched.n) throw std::invalid_argument("run_round: graph size does not match schedule");
  if (i < 0 || i >= sched.rounds_total) throw std::invalid_argument("run_round: round index out of range");
  RoundOutput out;
  out.round = i;
  const RoundParams rp = sched.rounds[static_cast<std::size_t>(i)];
  out.k = rp.k;
  if (rp.k <= 2 || g.edge_count() == 0) {
    out.skipped = true;
    return {std::move(out), g};
  }

  const QValue qv = round_q(i, sched);
  out.q = qv.value;
  out.q_clamped = qv.clamped;

  Rng gamma_rng = rng.derive("gamma");
  CliqueSample sample = sample_cliques(g, rp.k, qv.value, gamma_rng);
  out.population = sample.population;
  if (qv.clamped && sample.population > 0)
    throw ScheduleInfeasible("round " + std::to_string(i) + ": q_i = " + std::to_string(qv.raw) +
                             " exceeds 1; n is too small for these parameters");
  out.gamma = std::move(sample.chosen);

  // Stabilisation edges. Counts at or above the threshold give zeta = 0, so
  // the per-edge count may saturate there.
  const double threshold = (1 + sched.eps) * mu(2, rp.k, i, sched);
  const double cap_d = std::ceil(threshold);
  const std::uint64_t cap = cap_d < 1.8e19 ? static_cast<std::uint64_t>(cap_d) : kNoCap;
  const auto counts = edge_clique_counts(g, rp.k, cap);
  Rng zeta_rng = rng.derive("zeta");
  std::vector<Edge> stab;
  {
    std::size_t idx = 0;
    g.for_each_edge([&](Vertex u, Vertex v) {
      if (zeta_rng.bernoulli(zeta_from(qv.value, threshold, counts[idx++]))) stab.push_back({u, v});
    });
  }
  out.s_sampled = stab.size();

  // Greedy edge-disjoint subcollection in sampling order.
  Graph covered(g.n());
  Graph used(g.n());
  for (const VertexSet& K : out.gamma) {
    bool free = true;
    for (std::size_t a = 0; a < K.size() && free; ++a)
      for (std::size_t b = a + 1; b < K.size(); ++b)
        if (used.adjacent(K[a], K[b])) {
          free = false;
          break;
        }
    for (std::size_t a = 0; a < K.size(); ++a)
      for (std::size_t b = a + 1; b < K.size(); ++b) {
        covered.add_edge(K[a], K[b]);
        if (free) used.add_edge(K[a], K[b]);
      }
    if (free) out.gamma_star.push_back(K);
  }
  covered.for_each_edge([&](Vertex u, Vertex v) {
    if (!used.adjacent(u, v)) out.d_edges.push_back({u, v});
  });
  for (const Edge& e : stab)
    if (!covered.adjacent(e.u, e.v)) out.s_edges.push_back(e);

  Graph next = g;
  covered.for_each_edge([&](Vertex u, Vertex v) { next.remove_edge(u, v); });
  for (const Edge& e : stab) next.remove_edge(e.u, e.v);

  const std::size_t before = g.edge_count();
  const std::size_t after = next.edge_count();
  out.removed_edge_count = before - after;
  const std::size_t star_edges = out.gamma_star.size() * static_cast<std::size_t>(choose2(rp.k));
  if (out.removed_edge_count != star_edges + out.d_edges.size() + out.s_edges.size())
    throw std::logic_error("run_round: removed edges do not reconcile with Gamma*, D and S");
  return {std::move(out), std::move(next)};
}

struct PartitionRun {
  Schedule schedule;
  std::vector<RoundOutput> rounds;
  CliquePartition partition;
  int rounds_executed = 0;
  bool trivial = false;  // partition is E(G) itself
};

// Called with (i, G_i) before round i and once more with the final graph.
using RoundObserver = std::function<void(int, const Graph&)>;

inline CliquePartition trivial_partition(const Graph& g) {
  CliquePartition part;
  g.for_each_edge([&](Vertex u, Vertex v) { part.push_back({{u, v}, CliqueTag::Final, 0}); });
  return part;
}

inline PartitionRun run_partition(const Graph& g, const Schedule& sched, Rng& rng,
                                  const RoundObserver& observer = {}) {
  PartitionRun run;
  run.schedule = sched;
  Graph cur = g;
  int i = 0;
  for (; i < sched.rounds_total; ++i) {
    if (cur.edge_count() == 0) break;
    if (observer) observer(i, cur);
    Rng round_rng = rng.derive("round/" + std::to_string(i));
    RoundResult rr = run_round(cur, i, sched, round_rng);
    const RoundOutput& o = rr.output;
    for (const auto& K : o.gamma_star) run.partition.push_back({K, CliqueTag::GammaStar, i});
    for (const auto& e : o.d_edges) run.partition.push_back({{e.u, e.v}, CliqueTag::D, i});
    for (const auto& e : o.s_edges) run.partition.push_back({{e.u, e.v}, CliqueTag::S, i});
    const bool exhausted = o.q_clamped && o.population == 0;
    run.rounds.push_back(std::move(rr.output));
    cur = std::move(rr.next);
    if (exhausted) {
      ++i;
      break;
    }
  }
  run.rounds_executed = i;
  if (observer) observer(i, cur);
  cur.for_each_edge([&](Vertex u, Vertex v) { run.partition.push_back({{u, v}, CliqueTag::Final, i}); });
  return run;
}

inline PartitionRun run_partition(const Graph& g, double p, const NibbleParams& params, Rng& rng,
                                  const RoundObserver& observer = {}) {
  params.validate();
  if (params.fallback_alpha && p <= std::pow(static_cast<double>(g.n()), -*params.fallback_alpha)) {
    PartitionRun run;
    run.trivial = true;
    run.partition = trivial_partition(g);
    return run;
  }
  return run_partition(g, build_schedule(g.n(), p, params), rng, observer);
}

struct PartitionAudit {
  bool ok = true;
  bool cliques_ok = true;
  bool coverage_ok = true;
  std::size_t max_size = 0;
  std::size_t size = 0;       // |P|
  std::size_t thickness = 0;  // max_v #{K : v in K}
  std::vector<std::string> violations;  // first 10
};

inline PartitionAudit verify_partition(const Graph& g, const CliquePartition& part) {
  PartitionAudit a;
  a.size = part.size();
  const std::size_t n = g.n();
  auto note = [&](std::string msg) {
    a.ok = false;
    if (a.violations.size() < 10) a.violations.push_back(std::move(msg));
  };
  auto set_str = [](const VertexSet& s) {
    std::string r = "{";
    for (std::size_t i = 0; i < s.size(); ++i) r += (i ? "," : "") + std::to_string(s[i]);
    return r + "}";
  };
  std::vector<std::uint8_t> cover(n * n, 0);  // saturates at 255
  std::vector<std::size_t> per_vertex(n, 0);
  for (std::size_t idx = 0; idx < part.size(); ++idx) {
    const VertexSet& K = part[idx].vertices;
    a.max_size = std::max(a.max_size, K.size());
    if (K.size() < 2 || !is_vertex_set(K, n)) {
      a.cliques_ok = false;
      note("entry " + std::to_string(idx) + " " + set_str(K) + " is not a vertex set of size >= 2");
      continue;
    }
    for (Vertex v : K) ++per_vertex[v];
    for (std::size_t x = 0; x < K.size(); ++x)
      for (std::size_t y = x + 1; y < K.size(); ++y) {
        if (!g.adjacent(K[x], K[y])) {
          a.cliques_ok = false;
          note("entry " + std::to_string(idx) + " " + set_str(K) + " is not a clique: " + std::to_string(K[x]) +
               "-" + std::to_string(K[y]) + " missing");
        }
        auto& c = cover[K[x] * n + K[y]];
        if (c < 255) ++c;
      }
  }
  for (std::size_t v = 0; v < n; ++v) a.thickness = std::max(a.thickness, per_vertex[v]);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      const unsigned c = cover[u * n + v];
      if (g.adjacent(u, v) && c == 0) {
        a.coverage_ok = false;
        note("edge {" + std::to_string(u) + "," + std::to_string(v) + "} uncovered");
      } else if (c > 1) {
        a.coverage_ok = false;
        note("pair {" + std::to_string(u) + "," + std::to_string(v) + "} covered " + std::to_string(c) + " times");
      }
    }
  return a;
}

}  // namespace pdim
