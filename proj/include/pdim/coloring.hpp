#pragma once

// Random greedy edge colouring of a sequence of hyperedges, and first-fit
// greedy colouring of plain graph edges.
//
// The state is one used-colour set U_v per vertex. The colours available at
// a vertex set S are [q] minus the union of U_v over v in S; this is Q_S.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pdim/bits.hpp"
#include "pdim/graph.hpp"
#include "pdim/hypergraph.hpp"
#include "pdim/rng.hpp"

namespace pdim {

using Color = std::int32_t;
inline constexpr Color kNoColor = -1;

class ColoringState {
 public:
  ColoringState(std::size_t n, std::size_t q) : n_(n), q_(q), words_(bits::words_for(q)), used_(n * words_, 0), scratch_(words_) {
    if (q == 0) throw std::invalid_argument("palette must be non-empty");
  }

  std::size_t n() const { return n_; }
  std::size_t q() const { return q_; }

  std::span<const bits::Word> used(Vertex v) const { return {used_.data() + v * words_, words_}; }
  bool is_used(Vertex v, Color c) const { return bits::test(used(v), static_cast<std::size_t>(c)); }

  // Q_S as a bit mask over [q]; valid until the next call.
  std::span<const bits::Word> available(std::span<const Vertex> s) {
    std::fill(scratch_.begin(), scratch_.end(), ~bits::Word{0});
    scratch_.back() &= bits::tail_mask(q_);
    for (Vertex v : s) {
      const auto u = used(v);
      for (std::size_t w = 0; w < words_; ++w) scratch_[w] &= ~u[w];
    }
    return scratch_;
  }

  std::size_t available_count(std::span<const Vertex> s) { return bits::popcount(available(s)); }

  void assign(std::span<const Vertex> e, Color c) {
    for (Vertex v : e) bits::set(std::span<bits::Word>(used_.data() + v * words_, words_), static_cast<std::size_t>(c));
  }

  // Colours e with a uniformly random available colour; kNoColor if none.
  Color color_uniform(std::span<const Vertex> e, Rng& rng) {
    const auto avail = available(e);
    const std::size_t cnt = bits::popcount(avail);
    if (cnt == 0) return kNoColor;
    const auto c = static_cast<Color>(bits::select(avail, static_cast<std::size_t>(rng.below(cnt))));
    assign(e, c);
    return c;
  }

 private:
  std::size_t n_;
  std::size_t q_;
  std::size_t words_;
  std::vector<bits::Word> used_;
  std::vector<bits::Word> scratch_;
};

struct ColoringRun {
  std::size_t q = 0;
  std::vector<EdgeId> sequence;
  std::vector<Color> colors;              // kNoColor from the failure step on
  std::optional<std::size_t> failure_index;  // 1-based step with no colour left

  std::size_t colored_steps() const { return failure_index ? *failure_index - 1 : sequence.size(); }
  bool succeeded() const { return !failure_index; }
};

inline ColoringRun greedy_color(const Hypergraph& h, std::span<const EdgeId> sequence, std::size_t q, Rng& rng) {
  if (q < 1) throw std::invalid_argument("greedy_color: q must be >= 1");
  ColoringRun run;
  run.q = q;
  run.sequence.assign(sequence.begin(), sequence.end());
  run.colors.assign(sequence.size(), kNoColor);
  ColoringState st(h.n(), q);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const Color c = st.color_uniform(h.edge(sequence[i]), rng);
    if (c == kNoColor) {
      run.failure_index = i + 1;
      break;
    }
    run.colors[i] = c;
  }
  return run;
}

// U_v after the first `steps` coloured steps of a run.
inline ColoringState replay(const Hypergraph& h, const ColoringRun& run, std::size_t steps) {
  ColoringState st(h.n(), run.q);
  steps = std::min(steps, run.colored_steps());
  for (std::size_t i = 0; i < steps; ++i) st.assign(h.edge(run.sequence[i]), run.colors[i]);
  return st;
}

struct PropernessReport {
  bool ok = true;
  std::size_t checked_steps = 0;
  std::optional<std::pair<std::size_t, std::size_t>> conflict;  // 0-based positions
};

// Every pair of coloured positions sharing a vertex must differ in colour.
// Equivalent to: no vertex sees the same colour twice.
inline PropernessReport check_proper(const Hypergraph& h, const ColoringRun& run) {
  PropernessReport rep;
  const std::size_t steps = run.colored_steps();
  rep.checked_steps = steps;
  std::vector<std::vector<std::pair<Color, std::size_t>>> seen(h.n());
  for (std::size_t i = 0; i < steps; ++i) {
    const Color c = run.colors[i];
    if (c < 0 || static_cast<std::size_t>(c) >= run.q) {
      rep.ok = false;
      rep.conflict = {{i, i}};
      return rep;
    }
    for (Vertex v : h.edge(run.sequence[i])) seen[v].push_back({c, i});
  }
  for (auto& list : seen) {
    std::sort(list.begin(), list.end());
    for (std::size_t a = 1; a < list.size(); ++a)
      if (list[a].first == list[a - 1].first) {
        rep.ok = false;
        rep.conflict = {{list[a - 1].second, list[a].second}};
        return rep;
      }
  }
  return rep;
}

struct EdgeColoring {
  std::vector<Color> colors;
  std::size_t num_colors = 0;
  std::size_t max_degree = 0;
};

// First-fit over the given order; uses at most 2*Delta - 1 colours.
inline EdgeColoring graph_edge_color_greedy(std::span<const Edge> edges, std::size_t n) {
  EdgeColoring out;
  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n || e.u == e.v) throw std::invalid_argument("graph_edge_color_greedy: bad edge");
    out.max_degree = std::max({out.max_degree, ++deg[e.u], ++deg[e.v]});
  }
  const std::size_t palette = out.max_degree == 0 ? 1 : 2 * out.max_degree - 1;
  const std::size_t words = bits::words_for(palette);
  std::vector<bits::Word> used(n * words, 0);
  out.colors.reserve(edges.size());
  for (const Edge& e : edges) {
    const bits::Word* a = used.data() + e.u * words;
    const bits::Word* b = used.data() + e.v * words;
    std::size_t c = palette;
    for (std::size_t w = 0; w < words; ++w) {
      const bits::Word free = ~(a[w] | b[w]);
      if (free != 0) {
        c = w * bits::kWordBits + static_cast<std::size_t>(std::countr_zero(free));
        break;
      }
    }
    if (c >= palette) throw std::logic_error("graph_edge_color_greedy: exceeded 2*Delta-1 colours");
    bits::set(std::span<bits::Word>(used.data() + e.u * words, words), c);
    bits::set(std::span<bits::Word>(used.data() + e.v * words, words), c);
    out.colors.push_back(static_cast<Color>(c));
    out.num_colors = std::max(out.num_colors, c + 1);
  }
  return out;
}

}  // namespace pdim
