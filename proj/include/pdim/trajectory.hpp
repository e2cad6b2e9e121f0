#pragma once

// Deterministic trajectories of the greedy colouring and checkpoint audits of
// the tracked variables |Q_e(i)| and |Y_{v,c}(i)| against them.
//
//   q_hat(t) = (1-t)^r q,  y_hat(t) = (1-t)^(r-1) D,  e_hat(t) = (1-t)^(-9r) n^(-sigma/3)
//
// Q+/- = ±(|Q_e| - q_hat) - e_hat q_hat and Y+/- likewise; all four being
// non-positive is the concentration statement. At small n the band is
// usually vacuous or violated, so audits report it without a verdict.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pdim/coloring.hpp"
#include "pdim/hypergraph.hpp"
#include "pdim/rng.hpp"

namespace pdim {

inline void check_time(double t) {
  if (!(t >= 0 && t < 1)) throw std::invalid_argument("trajectory time must lie in [0,1)");
}

inline double q_hat(double t, int r, double q) {
  check_time(t);
  return std::pow(1 - t, r) * q;
}

inline double y_hat(double t, int r, double D) {
  check_time(t);
  return std::pow(1 - t, r - 1) * D;
}

inline double e_hat(double t, int r, double n, double sigma) {
  check_time(t);
  return std::pow(1 - t, -9.0 * r) * std::pow(n, -sigma / 3);
}

// Constant conditions of the concentration theorem, reported per run.
struct ConstantChecks {
  double b = 0;  // r / log n
  bool cond_const = false;  // b log(1/gamma) <= sigma/30
  bool ps_random = false;   // b <= delta sigma / 30
};

inline ConstantChecks check_constants(std::size_t n, int r, double gamma, double sigma, double delta) {
  ConstantChecks c;
  c.b = r / std::log(static_cast<double>(n));
  c.cond_const = c.b * std::log(1 / gamma) <= sigma / 30;
  c.ps_random = c.b <= delta * sigma / 30;
  return c;
}

struct TrajectorySampleSpec {
  std::size_t edge_samples = 0;  // 0: every edge of H
  std::size_t vc_samples = 200;
  std::uint64_t seed = 0;
};

struct TrajectorySnapshot {
  std::size_t step = 0;
  double t = 0;
  std::size_t edges_examined = 0;
  double q_min = 0, q_mean = 0, q_max = 0;
  std::size_t vc_examined = 0;
  double y_min = 0, y_mean = 0, y_max = 0;
  double q_hat = 0, y_hat = 0, e_hat = 0;
  double q_rel_dev_max = 0;  // max_e ||Q_e|/q_hat - 1|
  double y_rel_dev_max = 0;
  double q_plus_max = 0, q_minus_max = 0;
  double y_plus_max = 0, y_minus_max = 0;
  double q_band_violation = 0;  // fraction of examined e with Q+ > 0 or Q- > 0
  double y_band_violation = 0;
};

// |Y_{v,c}|: edges f at v with c unused on every vertex of f other than v.
inline std::size_t y_count(const Hypergraph& h, const ColoringState& st, Vertex v, Color c) {
  std::size_t cnt = 0;
  for (EdgeId f : h.incident(v)) {
    bool ok = true;
    for (Vertex w : h.edge(f))
      if (w != v && st.is_used(w, c)) {
        ok = false;
        break;
      }
    cnt += ok ? 1 : 0;
  }
  return cnt;
}

inline std::vector<TrajectorySnapshot> trajectory_audit(const Hypergraph& h, const ColoringRun& run,
                                                        const std::vector<double>& checkpoints, double sigma,
                                                        const TrajectorySampleSpec& spec, std::size_t horizon = 0) {
  // t = i / horizon; the horizon is the m of q = floor(r m / n), which can
  // exceed the number of steps actually coloured.
  const std::size_t m = horizon == 0 ? run.sequence.size() : horizon;
  if (m == 0) throw std::invalid_argument("trajectory_audit: empty run");
  std::vector<TrajectorySnapshot> out;
  Rng rng(spec.seed, "trajectory");
  const int r = h.r();
  const double n = static_cast<double>(h.n());
  const double D = r * static_cast<double>(h.edge_count()) / n;  // mean degree
  for (double t_req : checkpoints) {
    check_time(t_req);
    const auto step = static_cast<std::size_t>(std::floor(t_req * static_cast<double>(m)));
    TrajectorySnapshot s;
    s.step = step;
    s.t = static_cast<double>(step) / static_cast<double>(m);
    s.q_hat = q_hat(s.t, r, static_cast<double>(run.q));
    s.y_hat = y_hat(s.t, r, D);
    s.e_hat = e_hat(s.t, r, n, sigma);
    ColoringState st = replay(h, run, step);

    Rng cp = rng.derive("cp/" + std::to_string(step));
    std::vector<EdgeId> edges;
    if (spec.edge_samples == 0 || spec.edge_samples >= h.edge_count()) {
      edges.resize(h.edge_count());
      for (EdgeId e = 0; e < edges.size(); ++e) edges[e] = e;
    } else {
      edges.resize(spec.edge_samples);
      for (auto& e : edges) e = static_cast<EdgeId>(cp.below(h.edge_count()));
    }
    double sum = 0;
    std::size_t viol = 0;
    s.q_min = std::numeric_limits<double>::infinity();
    s.q_plus_max = s.q_minus_max = -std::numeric_limits<double>::infinity();
    for (EdgeId e : edges) {
      const double qe = static_cast<double>(st.available_count(h.edge(e)));
      sum += qe;
      s.q_min = std::min(s.q_min, qe);
      s.q_max = std::max(s.q_max, qe);
      s.q_rel_dev_max = std::max(s.q_rel_dev_max, std::abs(qe / s.q_hat - 1));
      const double plus = (qe - s.q_hat) - s.e_hat * s.q_hat;
      const double minus = -(qe - s.q_hat) - s.e_hat * s.q_hat;
      s.q_plus_max = std::max(s.q_plus_max, plus);
      s.q_minus_max = std::max(s.q_minus_max, minus);
      viol += (plus > 0 || minus > 0) ? 1 : 0;
    }
    s.edges_examined = edges.size();
    s.q_mean = sum / static_cast<double>(edges.size());
    s.q_band_violation = static_cast<double>(viol) / static_cast<double>(edges.size());

    sum = 0;
    viol = 0;
    s.y_min = std::numeric_limits<double>::infinity();
    s.y_plus_max = s.y_minus_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < spec.vc_samples; ++k) {
      const auto v = static_cast<Vertex>(cp.below(h.n()));
      const auto c = static_cast<Color>(cp.below(run.q));
      const double y = static_cast<double>(y_count(h, st, v, c));
      sum += y;
      s.y_min = std::min(s.y_min, y);
      s.y_max = std::max(s.y_max, y);
      s.y_rel_dev_max = std::max(s.y_rel_dev_max, std::abs(y / s.y_hat - 1));
      const double plus = (y - s.y_hat) - s.e_hat * s.y_hat;
      const double minus = -(y - s.y_hat) - s.e_hat * s.y_hat;
      s.y_plus_max = std::max(s.y_plus_max, plus);
      s.y_minus_max = std::max(s.y_minus_max, minus);
      viol += (plus > 0 || minus > 0) ? 1 : 0;
    }
    s.vc_examined = spec.vc_samples;
    if (spec.vc_samples > 0) {
      s.y_mean = sum / static_cast<double>(spec.vc_samples);
      s.y_band_violation = static_cast<double>(viol) / static_cast<double>(spec.vc_samples);
    } else {
      s.y_min = s.y_plus_max = s.y_minus_max = 0;
    }
    out.push_back(s);
  }
  return out;
}

// Least-squares slope of log(mean |Q_e|) against log(1 - t).
inline double fit_q_exponent(const std::vector<TrajectorySnapshot>& snaps) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double k = 0;
  for (const auto& s : snaps) {
    if (!(s.q_mean > 0)) continue;
    const double x = std::log(1 - s.t);
    const double y = std::log(s.q_mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    k += 1;
  }
  if (k < 2) throw std::invalid_argument("fit_q_exponent: need two checkpoints with positive mean");
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace pdim
