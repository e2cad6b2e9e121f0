#pragma once

// Fixed-size clique kernels over bit-row adjacency.
//
// Cliques are grown by ordered depth-first extension: a partial clique keeps
// the set of common neighbours with id above its last vertex, so every
// clique is produced exactly once, in lexicographic order. The last level
// is never expanded vertex by vertex; it is a popcount (counting) or a
// geometric skip over the candidate bits (sampling).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdim/bits.hpp"
#include "pdim/graph.hpp"
#include "pdim/rng.hpp"

namespace pdim {

inline constexpr std::uint64_t kNoCap = std::numeric_limits<std::uint64_t>::max();

class CliqueKernel {
 public:
  explicit CliqueKernel(const Graph& g) : g_(g), words_(g.words()) {}

  // Number of `size`-cliques inside `cand`, saturating at `cap`.
  std::uint64_t count(std::span<const bits::Word> cand, int size, std::uint64_t cap = kNoCap) {
    if (size <= 0) return 1;
    if (size == 1) return std::min<std::uint64_t>(bits::popcount(cand), cap);
    reserve(size);
    std::copy(cand.begin(), cand.end(), level(0).begin());
    std::uint64_t total = 0;
    count_rec(0, 0, size, cap, total);
    return std::min(total, cap);
  }

  // Calls f(members) for every `size`-clique inside `cand` in lexicographic
  // order. `members` is ascending and only valid during the call.
  template <class F>
  void enumerate(std::span<const bits::Word> cand, int size, F&& f) {
    prefix_.clear();
    if (size <= 0) {
      f(std::span<const Vertex>(prefix_));
      return;
    }
    for_each_leaf(cand, size - 1, [&](std::span<const Vertex> pre, std::span<const bits::Word> leaf) {
      prefix_.assign(pre.begin(), pre.end());
      prefix_.push_back(0);
      bits::for_each(leaf, [&](std::size_t w) {
        prefix_.back() = static_cast<Vertex>(w);
        f(std::span<const Vertex>(prefix_));
      });
    });
  }

  // Visits every (prefix_size)-clique `pre` inside `cand` in lexicographic
  // order together with its leaf set: the vertices of `cand` above pre.back()
  // adjacent to all of pre. For prefix_size == 0 the leaf is `cand` itself.
  template <class F>
  void for_each_leaf(std::span<const bits::Word> cand, int prefix_size, F&& f) {
    reserve(prefix_size + 1);
    std::copy(cand.begin(), cand.end(), level(0).begin());
    path_.clear();
    leaf_rec(0, 0, prefix_size, f);
  }

 private:
  std::span<bits::Word> level(int d) { return {scratch_.data() + static_cast<std::size_t>(d) * words_, words_}; }

  void reserve(int depth) {
    const std::size_t need = static_cast<std::size_t>(depth + 1) * words_;
    if (scratch_.size() < need) scratch_.resize(need);
  }

  // level(d) holds the candidates; lo is the first word that may be non-zero.
  void count_rec(int d, std::size_t lo, int rem, std::uint64_t cap, std::uint64_t& total) {
    auto work = level(d);
    if (rem == 1) {
      total += bits::popcount(work.subspan(lo));
      return;
    }
    auto next = level(d + 1);
    for (std::size_t wi = lo; wi < words_; ++wi) {
      while (work[wi] != 0) {
        if (total >= cap) return;
        const auto b = static_cast<std::size_t>(std::countr_zero(work[wi]));
        work[wi] &= work[wi] - 1;
        const Vertex v = static_cast<Vertex>(wi * bits::kWordBits + b);
        const auto row = g_.row(v);
        std::size_t live = 0;
        for (std::size_t j = wi; j < words_; ++j) {
          next[j] = work[j] & row[j];
          live += static_cast<std::size_t>(std::popcount(next[j]));
        }
        if (live + 1 < static_cast<std::size_t>(rem)) continue;
        count_rec(d + 1, wi, rem - 1, cap, total);
      }
    }
  }

  template <class F>
  void leaf_rec(int d, std::size_t lo, int rem, F& f) {
    auto work = level(d);
    if (rem == 0) {
      f(std::span<const Vertex>(path_), std::span<const bits::Word>(work));
      return;
    }
    auto next = level(d + 1);
    for (std::size_t wi = lo; wi < words_; ++wi) {
      while (work[wi] != 0) {
        const auto b = static_cast<std::size_t>(std::countr_zero(work[wi]));
        work[wi] &= work[wi] - 1;
        const Vertex v = static_cast<Vertex>(wi * bits::kWordBits + b);
        const auto row = g_.row(v);
        std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(wi), bits::Word{0});
        bool any = false;
        for (std::size_t j = wi; j < words_; ++j) {
          next[j] = work[j] & row[j];
          any = any || next[j] != 0;
        }
        if (!any) continue;  // empty leaf below v
        path_.push_back(v);
        leaf_rec(d + 1, wi, rem - 1, f);
        path_.pop_back();
      }
    }
  }

  const Graph& g_;
  std::size_t words_;
  std::vector<bits::Word> scratch_;
  std::vector<Vertex> path_;
  std::vector<Vertex> prefix_;
};

namespace detail {

// Vertices outside s adjacent to every member of s (all vertices if s = {}).
inline std::vector<bits::Word> common_neighbourhood(const Graph& g, std::span<const Vertex> s) {
  std::vector<bits::Word> cand(g.words(), ~bits::Word{0});
  if (!cand.empty()) cand.back() &= bits::tail_mask(g.n());
  for (Vertex v : s) {
    const auto r = g.row(v);
    for (std::size_t w = 0; w < cand.size(); ++w) cand[w] &= r[w];
  }
  for (Vertex v : s) bits::reset(cand, v);
  return cand;
}

inline void check_clique_query(const Graph& g, std::span<const Vertex> s, int j) {
  if (!is_vertex_set(s, g.n())) throw std::invalid_argument("vertex set must be sorted, unique and in range");
  if (j < 0 || static_cast<std::size_t>(j) > g.n()) throw std::invalid_argument("clique size exceeds n");
  if (s.size() > static_cast<std::size_t>(j)) throw std::invalid_argument("|S| exceeds clique size");
}

}  // namespace detail

// All J ⊇ s with |J| = j such that every pair of J not inside s is an edge.
// Pairs inside s are exempt, so s need not be a clique itself.
inline std::vector<VertexSet> enumerate_cliques(const Graph& g, std::span<const Vertex> s, int j) {
  detail::check_clique_query(g, s, j);
  const auto cand = detail::common_neighbourhood(g, s);
  std::vector<VertexSet> out;
  CliqueKernel kernel(g);
  kernel.enumerate(cand, j - static_cast<int>(s.size()), [&](std::span<const Vertex> ext) {
    VertexSet J;
    J.reserve(static_cast<std::size_t>(j));
    std::merge(s.begin(), s.end(), ext.begin(), ext.end(), std::back_inserter(J));
    out.push_back(std::move(J));
  });
  std::sort(out.begin(), out.end());
  return out;
}

// |enumerate_cliques(g, s, j)| without materialising the sets.
inline std::uint64_t count_cliques(const Graph& g, std::span<const Vertex> s, int j, std::uint64_t cap = kNoCap) {
  detail::check_clique_query(g, s, j);
  const auto cand = detail::common_neighbourhood(g, s);
  CliqueKernel kernel(g);
  return kernel.count(cand, j - static_cast<int>(s.size()), cap);
}

inline std::uint64_t count_common_neighbors(const Graph& g, std::span<const Vertex> s) {
  if (s.empty()) return g.n();
  return bits::popcount(detail::common_neighbourhood(g, s));
}

// For every edge e (in Graph::edges() order) the number of k-cliques that
// contain e, saturating at cap.
inline std::vector<std::uint64_t> edge_clique_counts(const Graph& g, int k, std::uint64_t cap = kNoCap) {
  if (k < 2) throw std::invalid_argument("edge_clique_counts: k < 2");
  std::vector<std::uint64_t> out;
  out.reserve(g.edge_count());
  CliqueKernel kernel(g);
  std::vector<bits::Word> common(g.words());
  g.for_each_edge([&](Vertex u, Vertex v) {
    const auto ru = g.row(u);
    const auto rv = g.row(v);
    for (std::size_t w = 0; w < common.size(); ++w) common[w] = ru[w] & rv[w];
    out.push_back(kernel.count(common, k - 2, cap));
  });
  return out;
}

struct CliqueSample {
  std::vector<VertexSet> chosen;  // in lexicographic order
  std::uint64_t population = 0;   // |C_{∅,k}|
};

// Includes each k-clique of g independently with probability q. Gaps between
// chosen cliques are geometric, so only (k-1)-cliques are walked.
inline CliqueSample sample_cliques(const Graph& g, int k, double q, Rng& rng) {
  if (k < 1) throw std::invalid_argument("sample_cliques: k < 1");
  CliqueSample out;
  std::vector<bits::Word> all(g.words(), ~bits::Word{0});
  if (!all.empty()) all.back() &= bits::tail_mask(g.n());
  auto advance = [&](std::uint64_t from) -> std::uint64_t {
    const std::uint64_t gap = rng.geometric(q);
    if (gap == Rng::max() || from > kNoCap - 1 - gap) return kNoCap;
    return from + gap;
  };
  std::uint64_t next = advance(0);
  std::uint64_t offset = 0;
  CliqueKernel kernel(g);
  kernel.for_each_leaf(all, k - 1, [&](std::span<const Vertex> pre, std::span<const bits::Word> leaf) {
    const std::uint64_t cnt = bits::popcount(leaf);
    while (next < offset + cnt) {
      VertexSet K(pre.begin(), pre.end());
      K.push_back(static_cast<Vertex>(bits::select(leaf, static_cast<std::size_t>(next - offset))));
      out.chosen.push_back(std::move(K));
      next = advance(next + 1);
    }
    offset += cnt;
  });
  out.population = offset;
  return out;
}

inline bool is_clique(const Graph& g, std::span<const Vertex> s) {
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b)
      if (!g.adjacent(s[a], s[b])) return false;
  return true;
}

}  // namespace pdim
