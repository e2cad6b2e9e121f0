#pragma once

// Product representations from properly coloured clique partitions of the
// complement, and the lower-bound formulas for clique covers of G(n,p).
//
// A proper colouring of a clique partition of complement(G) with d colours
// gives d coordinates: in coordinate c a vertex is labelled by its clique of
// colour c, or by a fresh label if it lies in none. Non-adjacent pairs share
// a label where their clique lives; adjacent pairs never share a clique, so
// they differ everywhere. One extra coordinate repairs the boundary case
// where two vertices would otherwise receive identical vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdim/coloring.hpp"
#include "pdim/graph.hpp"
#include "pdim/hypergraph.hpp"
#include "pdim/nibble.hpp"
#include "pdim/rng.hpp"
#include "pdim/schedule.hpp"

namespace pdim {

struct PaletteBlock {
  CliqueTag tag;
  int round;
  std::size_t cliques = 0;
  std::size_t size = 0;     // colours used after compaction
  std::size_t palette = 0;  // palette the successful attempt ran with
  int retries = 0;          // palette doublings
};

struct ColoredCover {
  CliquePartition cliques;
  std::vector<Color> color;  // per clique, in [0, d)
  std::size_t d = 0;
  std::vector<PaletteBlock> blocks;
};

struct AssemblyOptions {
  // Initial palette for a Gamma* block: ceil((1 + slack) * Delta(block)).
  // With slack 0 a block of pairwise disjoint cliques gets a single colour.
  double gamma_palette_slack = 0.0;
  int max_retries = 30;
  // Optional explicit initial palettes, consumed in block order by Gamma* blocks.
  std::vector<std::size_t> q_per_gamma;
};

namespace detail {

inline int tag_rank(CliqueTag t) {
  switch (t) {
    case CliqueTag::GammaStar: return 0;
    case CliqueTag::D: return 1;
    case CliqueTag::S: return 2;
    case CliqueTag::Final: return 3;
  }
  return 4;
}

// Renumbers colours to 0..k-1 in increasing order; returns k.
inline std::size_t compact(std::vector<Color>& colors) {
  std::vector<Color> used(colors);
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (auto& c : colors) c = static_cast<Color>(std::lower_bound(used.begin(), used.end(), c) - used.begin());
  return used.size();
}

}  // namespace detail

// Colours each provenance block (Gamma_i*, D_i, S_i per round, final edges)
// from its own palette. Gamma_i* blocks use the random greedy hypergraph
// colouring, doubling the palette on failure; edge blocks use first-fit.
inline ColoredCover color_partition_assembled(const CliquePartition& part, std::size_t n, const AssemblyOptions& opts,
                                              Rng& rng) {
  ColoredCover cover;
  std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < part.size(); ++i)
    groups[{part[i].round, detail::tag_rank(part[i].tag)}].push_back(i);

  std::size_t offset = 0;
  std::size_t gamma_blocks = 0;
  for (const auto& [key, members] : groups) {
    PaletteBlock block;
    block.tag = part[members.front()].tag;
    block.round = key.first;
    block.cliques = members.size();
    std::vector<Color> local;
    const bool all_edges = std::all_of(members.begin(), members.end(), [&](std::size_t i) { return part[i].vertices.size() == 2; });
    if (block.tag != CliqueTag::GammaStar && all_edges) {
      std::vector<Edge> edges;
      edges.reserve(members.size());
      for (std::size_t i : members) edges.push_back({part[i].vertices[0], part[i].vertices[1]});
      local = graph_edge_color_greedy(edges, n).colors;
      block.palette = local.empty() ? 0 : static_cast<std::size_t>(*std::max_element(local.begin(), local.end())) + 1;
    } else {
      std::vector<VertexSet> sets;
      sets.reserve(members.size());
      for (std::size_t i : members) sets.push_back(part[i].vertices);
      const Hypergraph h = Hypergraph::from_sets(n, sets);
      std::size_t delta = 0;
      for (Vertex v = 0; v < n; ++v) delta = std::max(delta, h.degree(v));
      std::size_t q = static_cast<std::size_t>(std::ceil((1 + opts.gamma_palette_slack) * static_cast<double>(delta)));
      if (block.tag == CliqueTag::GammaStar && gamma_blocks < opts.q_per_gamma.size()) q = opts.q_per_gamma[gamma_blocks];
      q = std::max<std::size_t>(q, 1);
      std::vector<EdgeId> seq(h.edge_count());
      for (EdgeId e = 0; e < seq.size(); ++e) seq[e] = e;
      Rng brng = rng.derive("block/" + std::to_string(key.first) + "/" + std::string(to_string(block.tag)));
      for (int attempt = 0;; ++attempt) {
        Rng arng = brng.derive("attempt/" + std::to_string(attempt));
        ColoringRun run = greedy_color(h, seq, q, arng);
        if (run.succeeded()) {
          local = std::move(run.colors);
          break;
        }
        if (attempt >= opts.max_retries) throw std::runtime_error("color_partition_assembled: palette retries exhausted");
        q *= 2;
        ++block.retries;
      }
      block.palette = q;
    }
    if (block.tag == CliqueTag::GammaStar) ++gamma_blocks;
    block.size = detail::compact(local);
    for (std::size_t k = 0; k < members.size(); ++k) {
      cover.cliques.push_back(part[members[k]]);
      cover.color.push_back(static_cast<Color>(offset) + local[k]);
    }
    offset += block.size;
    cover.blocks.push_back(block);
  }
  cover.d = detail::compact(cover.color);

  // Global properness: no vertex in two cliques of the same colour.
  std::vector<std::vector<Color>> at(n);
  for (std::size_t i = 0; i < cover.cliques.size(); ++i)
    for (Vertex v : cover.cliques[i].vertices) at[v].push_back(cover.color[i]);
  for (auto& cs : at) {
    std::sort(cs.begin(), cs.end());
    if (std::adjacent_find(cs.begin(), cs.end()) != cs.end())
      throw std::logic_error("color_partition_assembled: colouring is not proper");
  }
  return cover;
}

struct ProductRepresentation {
  std::size_t d = 0;
  std::vector<std::vector<std::uint32_t>> labels;  // labels[v][c]
  bool extra_coordinate = false;
};

struct EmbeddingReport {
  bool ok = true;
  bool distinct = true;
  bool equivalence = true;
  std::vector<std::string> violations;  // first 10
};

inline EmbeddingReport verify_embedding(const Graph& g, const ProductRepresentation& rep) {
  EmbeddingReport r;
  const std::size_t n = g.n();
  auto note = [&](std::string m) {
    r.ok = false;
    if (r.violations.size() < 10) r.violations.push_back(std::move(m));
  };
  if (rep.labels.size() != n) {
    note("expected " + std::to_string(n) + " label vectors, got " + std::to_string(rep.labels.size()));
    r.distinct = r.equivalence = false;
    return r;
  }
  for (Vertex v = 0; v < n; ++v)
    if (rep.labels[v].size() != rep.d) {
      note("vertex " + std::to_string(v) + " has a vector of the wrong length");
      r.distinct = r.equivalence = false;
      return r;
    }
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      std::size_t equal = 0;
      for (std::size_t c = 0; c < rep.d; ++c) equal += rep.labels[u][c] == rep.labels[v][c] ? 1 : 0;
      const std::string pair = "{" + std::to_string(u) + "," + std::to_string(v) + "}";
      if (equal == rep.d) {
        r.distinct = false;
        note(pair + ": identical vectors");
      }
      const bool differ_everywhere = equal == 0;
      if (g.adjacent(u, v) != differ_everywhere) {
        r.equivalence = false;
        note(pair + (g.adjacent(u, v) ? ": adjacent but agree in some coordinate" : ": non-adjacent but differ everywhere"));
      }
    }
  return r;
}

inline ProductRepresentation build_product_representation(const Graph& g, const ColoredCover& cover) {
  constexpr std::uint32_t kUnset = UINT32_MAX;
  const std::size_t n = g.n();
  ProductRepresentation rep;
  rep.d = cover.d;
  rep.labels.assign(n, std::vector<std::uint32_t>(rep.d, kUnset));
  std::vector<std::uint32_t> next(rep.d, 0);
  for (std::size_t i = 0; i < cover.cliques.size(); ++i) {
    const auto c = static_cast<std::size_t>(cover.color[i]);
    if (c >= rep.d) throw std::invalid_argument("build_product_representation: colour out of range");
    const std::uint32_t lbl = next[c]++;
    for (Vertex v : cover.cliques[i].vertices) {
      if (rep.labels[v][c] != kUnset) throw std::invalid_argument("build_product_representation: colour class not vertex-disjoint");
      rep.labels[v][c] = lbl;
    }
  }
  for (std::size_t c = 0; c < rep.d; ++c)
    for (Vertex v = 0; v < n; ++v)
      if (rep.labels[v][c] == kUnset) rep.labels[v][c] = next[c]++;

  // Boundary repair.
  std::vector<Edge> unwitnessed;
  bool duplicate = false;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      std::size_t equal = 0;
      for (std::size_t c = 0; c < rep.d; ++c) equal += rep.labels[u][c] == rep.labels[v][c] ? 1 : 0;
      if (!g.adjacent(u, v) && equal == 0) unwitnessed.push_back({u, v});
      if (equal == rep.d) duplicate = true;
    }
  if (!unwitnessed.empty()) {
    // Group the unwitnessed non-edges into vertex-disjoint cliques of the complement.
    std::vector<std::uint32_t> group(n, kUnset);
    std::vector<std::vector<Vertex>> members;
    for (const Edge& e : unwitnessed) {
      const std::uint32_t gu = group[e.u], gv = group[e.v];
      if (gu == kUnset && gv == kUnset) {
        group[e.u] = group[e.v] = static_cast<std::uint32_t>(members.size());
        members.push_back({e.u, e.v});
      } else if ((gu == kUnset) != (gv == kUnset)) {
        const std::uint32_t gid = gu == kUnset ? gv : gu;
        const Vertex x = gu == kUnset ? e.u : e.v;
        const bool fits = std::none_of(members[gid].begin(), members[gid].end(), [&](Vertex w) { return g.adjacent(w, x); });
        if (fits) {
          group[x] = gid;
          members[gid].push_back(x);
        }
      }
    }
    std::uint32_t fresh = static_cast<std::uint32_t>(members.size());
    for (Vertex v = 0; v < n; ++v) rep.labels[v].push_back(group[v] == kUnset ? fresh++ : group[v]);
    ++rep.d;
    rep.extra_coordinate = true;
  } else if (duplicate || (rep.d == 0 && n >= 2)) {
    for (Vertex v = 0; v < n; ++v) rep.labels[v].push_back(v);
    ++rep.d;
    rep.extra_coordinate = true;
  }

  const EmbeddingReport check = verify_embedding(g, rep);
  if (!check.ok)
    throw std::logic_error("build_product_representation: assembled vectors fail verification: " +
                           (check.violations.empty() ? std::string() : check.violations.front()));
  return rep;
}

struct LowerBounds {
  int s = 0;  // ceil(2 log_{1/p} n)
  double phi = 0;
  double ccn_lb = 0;
  double cct_lb = 0;
  // phi at the three anchors: near 0, at 1/2, near 1.
  double phi_near_zero = 0, phi_half = 0, phi_near_one = 0;
};

// phi(p) = (1-p) log(1-p) / (p log p).
inline double phi(double p) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("phi: p must lie in (0,1)");
  return (1 - p) * std::log1p(-p) / (p * std::log(p));
}

inline LowerBounds lower_bounds(std::size_t n, double p, double eps) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("lower_bounds: p must lie in (0,1)");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("lower_bounds: eps must lie in (0,1)");
  if (n < 2) throw std::invalid_argument("lower_bounds: n must be >= 2");
  LowerBounds b;
  const double nn = static_cast<double>(n);
  b.s = static_cast<int>(robust_ceil(2 * log_base_inv(p, nn)));
  b.phi = phi(p);
  const double factor = (1 - eps) * (1 + b.phi);
  b.ccn_lb = b.s >= 2 ? factor * choose2(nn) * p / choose2(b.s) : INFINITY;
  b.cct_lb = b.s >= 2 ? factor * nn * p / (b.s - 1) : INFINITY;
  b.phi_near_zero = phi(1e-3);
  b.phi_half = phi(0.5);
  b.phi_near_one = phi(1 - 1e-3);
  return b;
}

struct PragueResult {
  std::size_t d = 0;
  ProductRepresentation rep;
  ColoredCover cover;
  PartitionRun partition;
  double complement_density = 0;
  bool trivial_partition = false;
};

// Upper bound on the Prague dimension of g: partition complement(g) with the
// nibble (or E itself when the schedule is degenerate), colour the blocks,
// assemble and verify the representation.
inline PragueResult prague_upper(const Graph& g, const NibbleParams& params, Rng& rng,
                                 const AssemblyOptions& opts = {}) {
  PragueResult res;
  const Graph h = complement(g);
  res.complement_density = density(h);
  bool trivial = h.edge_count() == 0 || g.n() < 2 || res.complement_density >= 1.0;
  if (!trivial && params.fallback_alpha &&
      res.complement_density <= std::pow(static_cast<double>(g.n()), -*params.fallback_alpha))
    trivial = true;
  if (!trivial) {
    try {
      Schedule sched = build_schedule(g.n(), res.complement_density, params);
      Rng prng = rng.derive("partition");
      res.partition = run_partition(h, sched, prng);
    } catch (const std::invalid_argument&) {
      trivial = true;  // k < 2
    }
  }
  if (trivial) {
    res.partition = PartitionRun{};
    res.partition.trivial = true;
    res.partition.partition = trivial_partition(h);
  }
  res.trivial_partition = trivial;
  Rng crng = rng.derive("color");
  res.cover = color_partition_assembled(res.partition.partition, g.n(), opts, crng);
  res.rep = build_product_representation(g, res.cover);
  res.d = res.rep.d;
  return res;
}

}  // namespace pdim
