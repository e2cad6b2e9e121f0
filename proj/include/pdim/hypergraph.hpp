#pragma once

// r-uniform hypergraphs with a per-vertex incidence index, degree/codegree
// regularity report, and the two edge-sampling modes (i.i.d. sequence of
// fixed length, independent Bernoulli inclusion).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdim/graph.hpp"
#include "pdim/rng.hpp"

namespace pdim {

using EdgeId = std::uint32_t;

class Hypergraph {
 public:
  Hypergraph() = default;
  Hypergraph(std::size_t n, int r) : n_(n), r_(r), incidence_(n) {
    if (r < 1) throw std::invalid_argument("hypergraph: uniformity must be positive");
  }

  // Builds from a list of vertex sets; all must have the same size.
  static Hypergraph from_sets(std::size_t n, const std::vector<VertexSet>& sets) {
    if (sets.empty()) return Hypergraph(n, 1);
    Hypergraph h(n, static_cast<int>(sets.front().size()));
    for (const auto& s : sets) h.add_edge(s);
    h.check_no_repeats();
    return h;
  }

  std::size_t n() const { return n_; }
  int r() const { return r_; }
  std::size_t edge_count() const { return r_ > 0 ? flat_.size() / static_cast<std::size_t>(r_) : 0; }

  std::span<const Vertex> edge(EdgeId e) const {
    return {flat_.data() + static_cast<std::size_t>(e) * static_cast<std::size_t>(r_), static_cast<std::size_t>(r_)};
  }
  std::span<const EdgeId> incident(Vertex v) const { return incidence_[v]; }
  std::size_t degree(Vertex v) const { return incidence_[v].size(); }

  void add_edge(std::span<const Vertex> e) {
    if (e.size() != static_cast<std::size_t>(r_)) throw std::invalid_argument("hypergraph: edge size differs from r");
    if (!is_vertex_set(e, n_)) throw std::invalid_argument("hypergraph: edge must be sorted, unique, in range");
    const auto id = static_cast<EdgeId>(edge_count());
    flat_.insert(flat_.end(), e.begin(), e.end());
    for (Vertex v : e) incidence_[v].push_back(id);
  }

  void check_no_repeats() const {
    std::set<std::vector<Vertex>> seen;
    for (EdgeId e = 0; e < edge_count(); ++e) {
      auto s = edge(e);
      if (!seen.insert({s.begin(), s.end()}).second) throw std::invalid_argument("hypergraph: repeated edge");
    }
  }

 private:
  std::size_t n_ = 0;
  int r_ = 1;
  std::vector<Vertex> flat_;
  std::vector<std::vector<EdgeId>> incidence_;
};

// All r-subsets of [n] in lexicographic order.
inline Hypergraph complete_uniform(std::size_t n, int r) {
  if (r < 1 || static_cast<std::size_t>(r) > n) throw std::invalid_argument("complete_uniform: need 1 <= r <= n");
  Hypergraph h(n, r);
  std::vector<Vertex> c(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) c[static_cast<std::size_t>(i)] = static_cast<Vertex>(i);
  while (true) {
    h.add_edge(c);
    int i = r - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - static_cast<std::size_t>(r - i)) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
  return h;
}

struct RegularityReport {
  double D_estimate = 0;  // r |E| / n
  double max_degree_deviation = 0;
  std::size_t max_codegree = 0;
  double sigma_implied = 0;  // +inf when both conditions hold for every sigma
};

inline std::size_t max_codegree(const Hypergraph& h) {
  const std::size_t n = h.n();
  std::vector<std::uint32_t> co(n * n, 0);
  std::size_t best = 0;
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const auto s = h.edge(e);
    for (std::size_t a = 0; a < s.size(); ++a)
      for (std::size_t b = a + 1; b < s.size(); ++b) best = std::max<std::size_t>(best, ++co[s[a] * n + s[b]]);
  }
  return best;
}

inline RegularityReport check_regularity(const Hypergraph& h) {
  if (h.edge_count() == 0 || h.n() == 0) throw std::invalid_argument("check_regularity: empty hypergraph");
  RegularityReport rep;
  const double n = static_cast<double>(h.n());
  rep.D_estimate = h.r() * static_cast<double>(h.edge_count()) / n;
  for (Vertex v = 0; v < h.n(); ++v)
    rep.max_degree_deviation =
        std::max(rep.max_degree_deviation, std::abs(static_cast<double>(h.degree(v)) - rep.D_estimate) / rep.D_estimate);
  rep.max_codegree = max_codegree(h);
  // |deg - D| <= n^-sigma D  <=>  sigma <= -log_n(dev);  codeg <= n^-sigma D  <=>  sigma <= log_n(D / codeg).
  const double ln = std::log(n);
  const double from_deg = rep.max_degree_deviation > 0 ? -std::log(rep.max_degree_deviation) / ln : INFINITY;
  const double from_co = rep.max_codegree > 0 ? std::log(rep.D_estimate / static_cast<double>(rep.max_codegree)) / ln : INFINITY;
  rep.sigma_implied = std::min(from_deg, from_co);
  if (!(rep.sigma_implied > 0)) rep.sigma_implied = -INFINITY;
  return rep;
}

// e_1..e_m drawn i.i.d. uniformly from the ground edge list.
inline std::vector<EdgeId> sample_sequence_fixed_m(const Hypergraph& h, std::size_t m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("sample_sequence_fixed_m: m must be >= 1");
  if (h.edge_count() == 0) throw std::invalid_argument("sample_sequence_fixed_m: no edges");
  std::vector<EdgeId> seq(m);
  for (auto& e : seq) e = static_cast<EdgeId>(rng.below(h.edge_count()));
  return seq;
}

// H_q: each edge kept independently with probability q.
inline Hypergraph sample_subhypergraph_bernoulli(const Hypergraph& h, double q, Rng& rng) {
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("sample_subhypergraph_bernoulli: q outside [0,1]");
  Hypergraph out(h.n(), h.r());
  for (EdgeId e = 0; e < h.edge_count(); ++e)
    if (rng.bernoulli(q)) out.add_edge(h.edge(e));
  return out;
}

// Text format: "n r m" then m lines of r vertex ids.
inline Hypergraph read_hypergraph(std::istream& is) {
  long long n = -1, r = -1, m = -1;
  if (!(is >> n >> r >> m) || n <= 0 || r <= 0 || m < 0) throw std::runtime_error("hypergraph: bad header");
  Hypergraph h(static_cast<std::size_t>(n), static_cast<int>(r));
  std::vector<Vertex> e(static_cast<std::size_t>(r));
  for (long long i = 0; i < m; ++i) {
    for (auto& v : e) {
      long long x = -1;
      if (!(is >> x)) throw std::runtime_error("hypergraph: truncated at edge " + std::to_string(i));
      if (x < 0 || x >= n) throw std::runtime_error("hypergraph: vertex out of range");
      v = static_cast<Vertex>(x);
    }
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) != e.end()) throw std::runtime_error("hypergraph: repeated vertex in edge");
    h.add_edge(e);
  }
  try {
    h.check_no_repeats();
  } catch (const std::invalid_argument& ex) {
    throw std::runtime_error(ex.what());
  }
  return h;
}

inline void write_hypergraph(std::ostream& os, const Hypergraph& h) {
  os << h.n() << ' ' << h.r() << ' ' << h.edge_count() << '\n';
  for (EdgeId e = 0; e < h.edge_count(); ++e) {
    const auto s = h.edge(e);
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
    os << '\n';
  }
}

}  // namespace pdim
