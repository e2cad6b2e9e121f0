#pragma once

// Parameter schedule of the semi-random clique partition and the derived
// quantities: expected clique counts mu, expected common-neighbourhood sizes
// lambda, the inclusion probability q_i and the stabilisation probability
// zeta_{e,i}. Everything that can under- or overflow is evaluated in logs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pdim {

struct NibbleParams {
  double ca = 1.0 / 9.0;  // clique-size constant
  int tau = 9;            // round-count exponent
  double beps = 0.1;      // eps = n^-beps
  std::optional<int> max_clique_cap;
  // When set and p <= n^-fallback_alpha, the partition is E(G) itself.
  std::optional<double> fallback_alpha;

  void validate() const {
    if (!(ca > 0)) throw std::invalid_argument("ca must be positive");
    if (tau < 2) throw std::invalid_argument("tau must be >= 2");
    if (!(beps > 0 && beps < 1)) throw std::invalid_argument("beps must lie in (0,1)");
    if (max_clique_cap && *max_clique_cap < 2) throw std::invalid_argument("max clique cap must be >= 2");
  }
};

struct RoundParams {
  double p;  // p_i
  int k;     // k_i
};

struct Schedule {
  std::size_t n = 0;
  double p = 0;
  NibbleParams params;
  int k = 0;
  bool k_capped = false;
  int rounds_total = 0;  // I
  double eps = 0;
  double k_pow_tau = 0;  // k^tau
  std::vector<RoundParams> rounds;  // i = 0..I
};

class ScheduleInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ceil(x) that forgives floating noise just above an integer, so that
// e.g. log_2(4096) / 3 = 4.0000000000000009 yields 4.
inline long long robust_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long long>(r);
  return static_cast<long long>(std::ceil(x));
}

inline double log_base_inv(double p, double x) { return std::log(x) / -std::log(p); }

inline double log_binomial(double n, double k) {
  if (k < 0 || k > n) return -INFINITY;
  double acc = 0;
  // Exact product for the small lower index used throughout.
  if (k <= 64) {
    for (double t = 0; t < k; t += 1) acc += std::log((n - t) / (t + 1));
    return acc;
  }
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

inline double choose2(double x) { return x * (x - 1) / 2; }

inline Schedule build_schedule(std::size_t n, double p, const NibbleParams& params) {
  params.validate();
  if (n < 2) throw std::invalid_argument("build_schedule: n must be >= 2");
  if (!(p > 0 && p < 1)) throw std::invalid_argument("build_schedule: p must lie in (0,1)");
  Schedule s;
  s.n = n;
  s.p = p;
  s.params = params;
  const double nn = static_cast<double>(n);
  s.k = static_cast<int>(robust_ceil(params.ca * log_base_inv(p, nn)));
  if (params.max_clique_cap && s.k > *params.max_clique_cap) {
    s.k = *params.max_clique_cap;
    s.k_capped = true;
  }
  if (s.k < 2) throw std::invalid_argument("build_schedule: k < 2, use the trivial partition");
  s.k_pow_tau = std::pow(static_cast<double>(s.k), params.tau);
  s.rounds_total = static_cast<int>(robust_ceil(params.tau * s.k_pow_tau * std::log(static_cast<double>(s.k))));
  s.eps = std::pow(nn, -params.beps);
  s.rounds.reserve(static_cast<std::size_t>(s.rounds_total) + 1);
  for (int i = 0; i <= s.rounds_total; ++i) {
    const double pi = p * std::exp(-static_cast<double>(i) / s.k_pow_tau);
    int ki = static_cast<int>(robust_ceil(params.ca * log_base_inv(pi, nn)));
    ki = std::min(ki, s.k);
    s.rounds.push_back({pi, ki});
  }
  return s;
}

// mu_{s,j,i} = C(n-s, j-s) p_i^(C(j,2) - C(s,2)).
inline double mu(int s_size, int j, int i, const Schedule& sched) {
  if (s_size < 0 || s_size > j || static_cast<std::size_t>(j) > sched.n)
    throw std::invalid_argument("mu: need 0 <= |S| <= j <= n");
  const double n = static_cast<double>(sched.n);
  const double pi = sched.rounds.at(static_cast<std::size_t>(i)).p;
  const double expo = choose2(j) - choose2(s_size);
  const double lg = log_binomial(n - s_size, j - s_size) + (expo == 0 ? 0.0 : expo * std::log(pi));
  return std::exp(lg);
}

// lambda_{s,i} = (n-s) p_i^s.
inline double lambda(int s_size, int i, const Schedule& sched) {
  if (s_size < 0 || static_cast<std::size_t>(s_size) >= sched.n) throw std::invalid_argument("lambda: need 0 <= |S| < n");
  const double pi = sched.rounds.at(static_cast<std::size_t>(i)).p;
  const double n = static_cast<double>(sched.n);
  if (s_size == 0) return n;
  return std::exp(std::log(n - s_size) + s_size * std::log(pi));
}

enum class QSource { Predicted, Observed };

struct QValue {
  double value = 0;  // clamped into [0,1]
  double raw = 0;
  bool clamped = false;
};

// q_i = 1 / ((1+eps) k^tau mu_{2,k_i,i}). With QSource::Observed the caller
// supplies the per-edge clique count to use in place of mu_{2,k_i,i}.
inline QValue round_q(int i, const Schedule& sched, QSource source = QSource::Predicted,
                      std::optional<double> observed_edge_cliques = std::nullopt) {
  const int ki = sched.rounds.at(static_cast<std::size_t>(i)).k;
  double m2;
  if (source == QSource::Observed) {
    if (!observed_edge_cliques) throw std::invalid_argument("round_q: observed value missing");
    m2 = *observed_edge_cliques;
  } else {
    m2 = mu(2, ki, i, sched);
  }
  if (!(m2 > 0)) throw std::invalid_argument("round_q: mu_{2,k_i,i} must be positive");
  QValue q;
  q.raw = std::exp(-(std::log1p(sched.eps) + std::log(sched.k_pow_tau) + std::log(m2)));
  q.value = std::clamp(q.raw, 0.0, 1.0);
  q.clamped = q.raw > 1.0;
  return q;
}

// zeta = 1 - (1-q)^max{threshold - count, 0}, threshold = (1+eps) mu_{2,k_i,i}.
inline double zeta_from(double q, double threshold, std::uint64_t count) {
  const double x = threshold - static_cast<double>(count);
  if (!(x > 0) || q <= 0) return 0.0;
  if (q >= 1) return 1.0;
  return -std::expm1(x * std::log1p(-q));
}

inline double zeta(std::uint64_t clique_count_at_e, int i, const Schedule& sched) {
  const int ki = sched.rounds.at(static_cast<std::size_t>(i)).k;
  const double threshold = (1 + sched.eps) * mu(2, ki, i, sched);
  return zeta_from(round_q(i, sched).value, threshold, clique_count_at_e);
}

}  // namespace pdim
