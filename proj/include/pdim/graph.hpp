#pragma once

// Simple undirected graphs on [n] stored as rows of fixed-width bit vectors,
// plus G(n,p) sampling and the edge-list text format.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdim/bits.hpp"
#include "pdim/rng.hpp"

namespace pdim {

using Vertex = std::uint32_t;

// Sorted, duplicate-free list of vertex ids.
using VertexSet = std::vector<Vertex>;

struct Edge {
  Vertex u;
  Vertex v;  // u < v
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline bool is_vertex_set(std::span<const Vertex> s, std::size_t n) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= n) return false;
    if (i > 0 && s[i - 1] >= s[i]) return false;
  }
  return true;
}

class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n), words_(bits::words_for(n)), rows_(n * words_, 0) {}

  std::size_t n() const { return n_; }
  std::size_t words() const { return words_; }

  std::span<const bits::Word> row(Vertex v) const { return {rows_.data() + v * words_, words_}; }

  bool adjacent(Vertex u, Vertex v) const { return bits::test(row(u), v); }

  void add_edge(Vertex u, Vertex v) {
    check_pair(u, v);
    bits::set(mrow(u), v);
    bits::set(mrow(v), u);
  }
  void remove_edge(Vertex u, Vertex v) {
    check_pair(u, v);
    bits::reset(mrow(u), v);
    bits::reset(mrow(v), u);
  }

  std::size_t degree(Vertex v) const { return bits::popcount(row(v)); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (Vertex v = 0; v < n_; ++v) d = std::max(d, degree(v));
    return d;
  }

  std::size_t edge_count() const { return bits::popcount(rows_) / 2; }

  // All edges with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for_each_edge([&](Vertex u, Vertex v) { out.push_back({u, v}); });
    return out;
  }

  template <class F>
  void for_each_edge(F&& f) const {
    for (Vertex u = 0; u < n_; ++u) {
      const auto r = row(u);
      const std::size_t first = bits::word_of(u + 1);
      for (std::size_t w = first; w < words_; ++w) {
        bits::Word x = r[w];
        if (w == first) x &= ~((bits::mask_of(u + 1)) - 1);
        while (x != 0) {
          const auto b = static_cast<std::size_t>(std::countr_zero(x));
          f(u, static_cast<Vertex>(w * bits::kWordBits + b));
          x &= x - 1;
        }
      }
    }
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::span<bits::Word> mrow(Vertex v) { return {rows_.data() + v * words_, words_}; }

  void check_pair(Vertex u, Vertex v) const {
    if (u >= n_ || v >= n_) throw std::out_of_range("vertex id out of range");
    if (u == v) throw std::invalid_argument("self-loop");
  }

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<bits::Word> rows_;
};

inline Graph complete_graph(std::size_t n) {
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

// Binomial random graph: each pair {u,v}, u < v, visited in lexicographic
// order and kept with probability p.
inline Graph sample_gnp(std::size_t n, double p, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_gnp: n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_gnp: p outside [0,1]");
  Graph g(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) g.add_edge(u, v);
  return g;
}

inline Graph complement(const Graph& g) {
  Graph h(g.n());
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex v = u + 1; v < g.n(); ++v)
      if (!g.adjacent(u, v)) h.add_edge(u, v);
  return h;
}

inline double density(const Graph& g) {
  const double pairs = static_cast<double>(g.n()) * static_cast<double>(g.n() - 1) / 2.0;
  return pairs > 0 ? static_cast<double>(g.edge_count()) / pairs : 0.0;
}

// Edge-list text format: "n m" followed by m lines "u v" with u < v.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.n() << ' ' << g.edge_count() << '\n';
  g.for_each_edge([&](Vertex u, Vertex v) { os << u << ' ' << v << '\n'; });
}

inline Graph read_edge_list(std::istream& is) {
  long long n = -1, m = -1;
  if (!(is >> n >> m) || n <= 0 || m < 0) throw std::runtime_error("edge list: bad header");
  Graph g(static_cast<std::size_t>(n));
  for (long long i = 0; i < m; ++i) {
    long long u = -1, v = -1;
    if (!(is >> u >> v)) throw std::runtime_error("edge list: truncated at edge " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::runtime_error("edge list: vertex out of range");
    if (u == v) throw std::runtime_error("edge list: self-loop " + std::to_string(u));
    if (u > v) throw std::runtime_error("edge list: expected u < v");
    if (g.adjacent(static_cast<Vertex>(u), static_cast<Vertex>(v)))
      throw std::runtime_error("edge list: duplicate edge " + std::to_string(u) + " " + std::to_string(v));
    g.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return g;
}

}  // namespace pdim
