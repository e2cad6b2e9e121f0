#pragma once

// Experiment orchestration: a JSON config describes a parameter grid and a
// seed set for one mode; every (grid point, replicate) pair is one trial.
// Trials run on a small thread pool and are written in trial order to
// records.jsonl as soon as a contiguous prefix is done. summary.csv holds
// mean/std/min/max per grid point and metric; config-echo.json is the
// validated config with defaults filled in.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "pdim/audit.hpp"
#include "pdim/coloring.hpp"
#include "pdim/graph.hpp"
#include "pdim/hypergraph.hpp"
#include "pdim/nibble.hpp"
#include "pdim/prague.hpp"
#include "pdim/rng.hpp"
#include "pdim/schedule.hpp"
#include "pdim/trajectory.hpp"

namespace pdim {

using json = nlohmann::json;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---- serializers ---------------------------------------------------------

inline json to_json(const Schedule& s) {
  json rounds = json::array();
  for (std::size_t i = 0; i < s.rounds.size(); ++i) {
    json r = {{"i", i}, {"p", s.rounds[i].p}, {"k", s.rounds[i].k}};
    if (s.rounds[i].k >= 3) {
      const QValue q = round_q(static_cast<int>(i), s);
      r["q"] = q.value;
      r["q_clamped"] = q.clamped;
    } else {
      r["q"] = nullptr;  // round skipped
    }
    rounds.push_back(r);
  }
  json params = {{"ca", s.params.ca}, {"tau", s.params.tau}, {"beps", s.params.beps}};
  params["max_clique_cap"] = s.params.max_clique_cap ? json(*s.params.max_clique_cap) : json(nullptr);
  return {{"n", s.n}, {"p", s.p}, {"k", s.k}, {"k_capped", s.k_capped}, {"I", s.rounds_total},
          {"eps", s.eps}, {"k_pow_tau", s.k_pow_tau}, {"params", params}, {"rounds", rounds}};
}

inline json to_json(const PartClique& c) {
  return {{"vertices", c.vertices}, {"tag", std::string(to_string(c.tag))}, {"round", c.round}};
}

inline std::string partition_jsonl(const CliquePartition& part) {
  std::string out;
  for (const auto& c : part) out += to_json(c).dump() + "\n";
  return out;
}

inline CliquePartition parse_partition_jsonl(std::istream& is) {
  CliquePartition part;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    part.push_back({j.at("vertices").get<VertexSet>(), parse_clique_tag(j.at("tag").get<std::string>()),
                    j.at("round").get<int>()});
  }
  return part;
}

inline json to_json(const AuditReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json samples = json::array();
    for (const auto& s : e.samples)
      samples.push_back({{"S", s.S}, {"observed", s.observed}, {"expected", s.expected}, {"deviation", s.deviation}});
    json je = {{"round", e.round}, {"s", e.s}, {"band", e.band}, {"max_deviation", e.max_deviation},
               {"worst", e.worst}, {"pass", e.pass}, {"insufficient_samples", e.insufficient_samples},
               {"samples", samples}};
    if (e.j > 0) je["j"] = e.j;
    entries.push_back(je);
  }
  return {{"tolerance_multiplier", rep.tolerance_multiplier}, {"pass", rep.pass()}, {"entries", entries}};
}

inline json to_json(const TrajectorySnapshot& s) {
  return {{"step", s.step},
          {"t", s.t},
          {"edges_examined", s.edges_examined},
          {"q_min", s.q_min},
          {"q_mean", s.q_mean},
          {"q_max", s.q_max},
          {"vc_examined", s.vc_examined},
          {"y_min", s.y_min},
          {"y_mean", s.y_mean},
          {"y_max", s.y_max},
          {"q_hat", s.q_hat},
          {"y_hat", s.y_hat},
          {"e_hat", s.e_hat},
          {"q_rel_dev_max", s.q_rel_dev_max},
          {"y_rel_dev_max", s.y_rel_dev_max},
          {"q_plus_max", s.q_plus_max},
          {"q_minus_max", s.q_minus_max},
          {"y_plus_max", s.y_plus_max},
          {"y_minus_max", s.y_minus_max},
          {"q_band_violation", s.q_band_violation},
          {"y_band_violation", s.y_band_violation}};
}

inline json to_json(const ColoringRun& run, const std::vector<TrajectorySnapshot>& snaps) {
  json js = json::array();
  for (const auto& s : snaps) js.push_back(to_json(s));
  return {{"q", run.q},
          {"m", run.sequence.size()},
          {"failure_index", run.failure_index ? json(*run.failure_index) : json(nullptr)},
          {"snapshots", js}};
}

inline json to_json(const ProductRepresentation& rep) { return {{"d", rep.d}, {"labels", rep.labels}}; }

inline json to_json(const EmbeddingReport& r) {
  return {{"ok", r.ok}, {"distinct", r.distinct}, {"equivalence", r.equivalence}, {"violations", r.violations}};
}

// ---- config --------------------------------------------------------------

struct ExperimentConfig {
  std::string mode;
  std::map<std::string, std::vector<double>> grid;  // key order = cartesian order
  std::vector<std::uint64_t> seed_list;              // explicit seeds, used verbatim
  std::optional<std::uint64_t> seed_base;            // or base + count, hashed per trial
  std::size_t seed_count = 0;
  std::vector<double> checkpoints;
  std::string out = "results";
  std::optional<std::string> hypergraph_file;  // color mode: ground hypergraph instead of complete_uniform
  json audit;                                   // audit mode: rounds / sample sizes
  bool artifacts = false;                       // per-trial detail files

  std::size_t replicates() const { return seed_list.empty() ? seed_count : seed_list.size(); }
  std::size_t grid_size() const {
    std::size_t s = 1;
    for (const auto& [k, v] : grid) s *= v.size();
    return s;
  }
  std::map<std::string, double> point(std::size_t index) const {
    std::map<std::string, double> pt;
    // Last key varies fastest.
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      pt[it->first] = it->second[index % it->second.size()];
      index /= it->second.size();
    }
    return pt;
  }
  std::uint64_t trial_seed(std::size_t grid_index, std::size_t replicate) const {
    if (!seed_list.empty()) return seed_list[replicate];
    return hash_combine(hash_combine(splitmix64(*seed_base), splitmix64(grid_index)), splitmix64(replicate));
  }
};

namespace detail {

struct KeySpec {
  bool required;
  std::optional<double> fallback;
};

inline const std::map<std::string, std::map<std::string, KeySpec>>& mode_keys() {
  static const std::map<std::string, std::map<std::string, KeySpec>> keys = {
      {"partition",
       {{"n", {true, {}}}, {"p", {true, {}}}, {"ca", {false, 1.0 / 9.0}}, {"tau", {false, 9}},
        {"beps", {false, 0.1}}, {"max_k", {false, {}}}}},
      {"audit",
       {{"n", {true, {}}}, {"p", {true, {}}}, {"ca", {false, 1.0 / 9.0}}, {"tau", {false, 9}},
        {"beps", {false, 0.1}}, {"max_k", {false, {}}}}},
      {"prague",
       {{"n", {true, {}}}, {"p", {true, {}}}, {"ca", {false, 1.0 / 9.0}}, {"tau", {false, 9}},
        {"beps", {false, 0.1}}, {"max_k", {false, {}}}, {"fallback_alpha", {false, {}}}}},
      {"color",
       {{"n", {false, {}}}, {"r", {false, 3}}, {"m", {true, {}}}, {"q", {false, {}}}, {"gamma", {false, 0.2}},
        {"delta", {false, {}}}, {"sigma", {false, {}}}, {"edge_samples", {false, 0}},
        {"vc_samples", {false, 200}}}},
      {"lowerbound", {{"n", {true, {}}}, {"p", {true, {}}}, {"eps", {false, 0.5}}}},
  };
  return keys;
}

inline bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

inline void check_point(const std::string& mode, const std::map<std::string, double>& pt, bool have_file) {
  auto has = [&](const char* k) { return pt.count(k) > 0; };
  auto get = [&](const char* k) { return pt.at(k); };
  auto need_int = [&](const char* k, double lo) {
    if (has(k) && (!is_integer(get(k)) || get(k) < lo))
      throw ConfigError(std::string(k) + " must be an integer >= " + std::to_string(static_cast<long long>(lo)));
  };
  auto need_open01 = [&](const char* k) {
    if (has(k) && !(get(k) > 0 && get(k) < 1)) throw ConfigError(std::string(k) + " must lie in (0,1)");
  };
  if (mode == "partition" || mode == "audit" || mode == "prague") {
    need_int("n", 2);
    if (mode == "prague") {
      if (!(get("p") >= 0 && get("p") <= 1)) throw ConfigError("p must lie in [0,1]");
    } else {
      need_open01("p");
    }
    if (!(get("ca") > 0)) throw ConfigError("ca must be positive");
    need_int("tau", 2);
    need_open01("beps");
    need_int("max_k", 2);
    if (mode != "prague") {
      NibbleParams prm;
      prm.ca = get("ca");
      prm.tau = static_cast<int>(get("tau"));
      prm.beps = get("beps");
      if (has("max_k")) prm.max_clique_cap = static_cast<int>(get("max_k"));
      try {
        (void)build_schedule(static_cast<std::size_t>(get("n")), get("p"), prm);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("schedule: ") + e.what());
      }
    }
  } else if (mode == "color") {
    if (!have_file && !has("n")) throw ConfigError("color mode needs n (or a hypergraph file)");
    need_int("n", 1);
    need_int("r", 1);
    need_int("m", 1);
    need_int("q", 1);
    need_int("edge_samples", 0);
    need_int("vc_samples", 0);
    if (!have_file && has("n") && get("r") > get("n")) throw ConfigError("r must not exceed n");
    if (!(get("gamma") > 0 && get("gamma") < 1)) throw ConfigError("gamma must lie in (0,1)");
    if (has("delta") && !(get("delta") > 0)) throw ConfigError("delta must be positive");
    if (has("delta") && has("q")) throw ConfigError("give either q or delta, not both");
    if (has("sigma") && !(get("sigma") > 0)) throw ConfigError("sigma must be positive");
  } else if (mode == "lowerbound") {
    need_int("n", 2);
    need_open01("p");
    need_open01("eps");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> top = {"mode", "grid", "seeds", "checkpoints", "out", "hypergraph", "audit", "artifacts"};
  for (const auto& [k, v] : j.items())
    if (!top.count(k)) throw ConfigError("unknown config key: " + k);
  if (!j.contains("mode") || !j["mode"].is_string()) throw ConfigError("mode missing");
  c.mode = j["mode"].get<std::string>();
  const auto& keys = detail::mode_keys();
  if (!keys.count(c.mode)) throw ConfigError("unknown mode: " + c.mode);
  const auto& spec = keys.at(c.mode);

  if (!j.contains("grid") || !j["grid"].is_object()) throw ConfigError("grid missing");
  for (const auto& [k, v] : j["grid"].items()) {
    if (!spec.count(k)) throw ConfigError("grid key '" + k + "' not valid for mode " + c.mode);
    std::vector<double> vals;
    if (v.is_number()) {
      vals.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("grid values must be numbers: " + k);
        vals.push_back(x.get<double>());
      }
    } else {
      throw ConfigError("grid values must be numbers: " + k);
    }
    if (vals.empty()) throw ConfigError("grid key '" + k + "' has no values");
    c.grid[k] = vals;
  }
  for (const auto& [k, ks] : spec) {
    if (c.grid.count(k)) continue;
    if (ks.required && !(k == "n" && c.mode == "color")) throw ConfigError("grid key '" + k + "' is required");
    if (ks.fallback) c.grid[k] = {*ks.fallback};
  }

  if (!j.contains("seeds")) throw ConfigError("seeds missing");
  const json& s = j["seeds"];
  if (s.is_array()) {
    for (const auto& x : s) {
      if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
        throw ConfigError("seeds must be non-negative integers");
      c.seed_list.push_back(x.get<std::uint64_t>());
    }
    if (c.seed_list.empty()) throw ConfigError("seed list is empty");
  } else if (s.is_object()) {
    if (!s.contains("base") || !s.contains("count")) throw ConfigError("seeds object needs base and count");
    c.seed_base = s["base"].get<std::uint64_t>();
    const long long cnt = s["count"].get<long long>();
    if (cnt < 1) throw ConfigError("seed count must be >= 1");
    c.seed_count = static_cast<std::size_t>(cnt);
  } else {
    throw ConfigError("seeds must be a list or {base, count}");
  }

  if (j.contains("checkpoints")) {
    for (const auto& x : j["checkpoints"]) {
      const double t = x.get<double>();
      if (!(t >= 0 && t < 1)) throw ConfigError("checkpoints must lie in [0,1)");
      c.checkpoints.push_back(t);
    }
  }
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("hypergraph")) {
    if (c.mode != "color") throw ConfigError("hypergraph file is only valid in color mode");
    c.hypergraph_file = j["hypergraph"].get<std::string>();
  }
  c.audit = j.value("audit", json::object());
  if (c.mode != "audit" && !c.audit.empty()) throw ConfigError("audit block is only valid in audit mode");
  c.artifacts = j.value("artifacts", false);

  for (std::size_t g = 0; g < c.grid_size(); ++g) {
    const auto pt = c.point(g);
    detail::check_point(c.mode, pt, c.hypergraph_file.has_value());
    if (c.mode == "color") {
      const double gamma = pt.count("delta") ? 1 - 1 / (1 + pt.at("delta")) : pt.at("gamma");
      for (double t : c.checkpoints)
        if (t > 1 - gamma + 1e-12) throw ConfigError("checkpoint beyond (1 - gamma)");
    }
  }
  if (c.mode == "audit") {
    for (const auto& [k, v] : c.audit.items())
      if (k != "rounds" && k != "clique_samples" && k != "neighbor_samples" && k != "tolerance_multiplier" &&
          k != "samples")
        throw ConfigError("unknown audit key: " + k);
  }
  return c;
}

inline json config_echo(const ExperimentConfig& c) {
  json j = {{"mode", c.mode}, {"grid", c.grid}, {"checkpoints", c.checkpoints}, {"out", c.out},
            {"artifacts", c.artifacts}};
  if (!c.seed_list.empty())
    j["seeds"] = c.seed_list;
  else
    j["seeds"] = {{"base", *c.seed_base}, {"count", c.seed_count}};
  if (c.hypergraph_file) j["hypergraph"] = *c.hypergraph_file;
  if (c.mode == "audit") j["audit"] = c.audit;
  return j;
}

// ---- trials --------------------------------------------------------------

struct TrialRecord {
  std::string mode;
  std::map<std::string, double> point;
  std::size_t grid_index = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  json metrics = json::object();
  std::string status = "ok";
  std::string error;
  double wall_time_ms = 0;
  std::map<std::string, std::string> artifacts;  // file name -> content

  json to_json(bool with_timing = true) const {
    json j = {{"mode", mode},       {"point", point},   {"grid_index", grid_index}, {"replicate", replicate},
              {"seed", seed},       {"status", status}, {"metrics", metrics}};
    j["error"] = error.empty() ? json(nullptr) : json(error);
    if (with_timing) j["wall_time_ms"] = wall_time_ms;
    return j;
  }
};

namespace detail {

inline NibbleParams nibble_params(const std::map<std::string, double>& pt) {
  NibbleParams prm;
  prm.ca = pt.at("ca");
  prm.tau = static_cast<int>(pt.at("tau"));
  prm.beps = pt.at("beps");
  if (pt.count("max_k")) prm.max_clique_cap = static_cast<int>(pt.at("max_k"));
  if (pt.count("fallback_alpha")) prm.fallback_alpha = pt.at("fallback_alpha");
  return prm;
}

inline json block_json(const std::vector<PaletteBlock>& blocks) {
  json out = json::array();
  for (const auto& b : blocks)
    out.push_back({{"tag", std::string(to_string(b.tag))}, {"round", b.round}, {"cliques", b.cliques},
                   {"size", b.size}, {"palette", b.palette}, {"retries", b.retries}});
  return out;
}

inline void trial_partition(const ExperimentConfig& cfg, TrialRecord& rec) {
  const auto& pt = rec.point;
  const auto n = static_cast<std::size_t>(pt.at("n"));
  const double p = pt.at("p");
  Rng base(rec.seed, "trial");
  Rng grng = base.derive("graph");
  const Graph g = sample_gnp(n, p, grng);
  const Schedule sched = build_schedule(n, p, nibble_params(pt));
  Rng prng = base.derive("partition");
  const PartitionRun run = run_partition(g, sched, prng);
  const PartitionAudit audit = verify_partition(g, run.partition);
  Rng crng = base.derive("color");
  const ColoredCover cover = color_partition_assembled(run.partition, n, {}, crng);

  std::size_t gstar = 0, dcount = 0, scount = 0, fcount = 0;
  for (const auto& c : run.partition) {
    switch (c.tag) {
      case CliqueTag::GammaStar: ++gstar; break;
      case CliqueTag::D: ++dcount; break;
      case CliqueTag::S: ++scount; break;
      case CliqueTag::Final: ++fcount; break;
    }
  }
  auto& m = rec.metrics;
  m["edges"] = g.edge_count();
  m["k"] = sched.k;
  m["I"] = sched.rounds_total;
  m["eps"] = sched.eps;
  m["rounds_executed"] = run.rounds_executed;
  m["partition_size"] = audit.size;
  m["thickness"] = audit.thickness;
  m["max_clique"] = audit.max_size;
  m["verified"] = audit.ok;
  m["violations"] = audit.violations;
  m["gamma_star_cliques"] = gstar;
  m["d_edges"] = dcount;
  m["s_edges"] = scount;
  m["final_edges"] = fcount;
  m["d"] = cover.d;
  m["blocks"] = block_json(cover.blocks);
  if (cfg.artifacts) {
    rec.artifacts["schedule.json"] = to_json(sched).dump(2) + "\n";
    rec.artifacts["partition.jsonl"] = partition_jsonl(run.partition);
  }
}

inline void trial_audit(const ExperimentConfig& cfg, TrialRecord& rec) {
  const auto& pt = rec.point;
  const auto n = static_cast<std::size_t>(pt.at("n"));
  const double p = pt.at("p");
  Rng base(rec.seed, "trial");
  Rng grng = base.derive("graph");
  const Graph g = sample_gnp(n, p, grng);
  const Schedule sched = build_schedule(n, p, nibble_params(pt));

  std::vector<int> rounds = cfg.audit.value("rounds", std::vector<int>{0});
  std::set<int> wanted(rounds.begin(), rounds.end());
  std::map<int, Graph> graphs;
  Rng prng = base.derive("partition");
  const int last = wanted.empty() ? 0 : *wanted.rbegin();
  if (wanted.size() == 1 && last == 0) {
    graphs.emplace(0, g);
  } else {
    (void)run_partition(g, sched, prng, [&](int i, const Graph& gi) {
      if (wanted.count(i) && !graphs.count(i)) graphs.emplace(i, gi);
    });
  }

  AuditSpec spec;
  spec.tolerance_multiplier = cfg.audit.value("tolerance_multiplier", 1.0);
  // Without explicit lists: |S| in {1, 2}, j = k_i, `samples` sets each.
  const std::size_t default_count = cfg.audit.value("samples", std::size_t{20});
  const bool custom_cliques = cfg.audit.contains("clique_samples");
  const bool custom_neighbors = cfg.audit.contains("neighbor_samples");
  if (custom_cliques)
    for (const auto& x : cfg.audit["clique_samples"])
      spec.clique_samples.push_back({x.at(0).get<int>(), x.at(1).get<int>(), x.at(2).get<std::size_t>()});
  if (custom_neighbors)
    for (const auto& x : cfg.audit["neighbor_samples"])
      spec.neighbor_samples.push_back({x.at(0).get<int>(), x.at(1).get<std::size_t>()});

  json reports = json::array();
  bool all_pass = true;
  auto& m = rec.metrics;
  m["k"] = sched.k;
  m["eps"] = sched.eps;
  for (int i : wanted) {
    if (i < 0 || i > sched.rounds_total) throw std::invalid_argument("audit round outside [0, I]");
    auto it = graphs.find(i);
    if (it == graphs.end()) {
      m["round_" + std::to_string(i) + "_reached"] = false;
      continue;
    }
    const int ki = sched.rounds[static_cast<std::size_t>(i)].k;
    AuditSpec s = spec;
    if (!custom_cliques)
      for (int ss = 1; ss <= std::min(2, ki); ++ss) s.clique_samples.push_back({ss, ki, default_count});
    if (!custom_neighbors)
      for (int ss = 1; ss <= std::min(2, ki - 1); ++ss) s.neighbor_samples.push_back({ss, default_count});
    Rng arng = base.derive("audit/" + std::to_string(i));
    const AuditReport R = audit_R(it->second, i, sched, s, arng);
    const AuditReport N = audit_N(it->second, i, sched, s, arng);
    all_pass = all_pass && R.pass() && N.pass();
    for (const auto& e : R.entries)
      m["R" + std::to_string(i) + "_s" + std::to_string(e.s) + "_j" + std::to_string(e.j) + "_dev"] = e.max_deviation;
    for (const auto& e : N.entries)
      m["N" + std::to_string(i) + "_s" + std::to_string(e.s) + "_dev"] = e.max_deviation;
    m["R" + std::to_string(i) + "_band"] = R.entries.empty() ? 0.0 : R.entries.front().band;
    m["N" + std::to_string(i) + "_band"] = N.entries.empty() ? 0.0 : N.entries.front().band;
    reports.push_back({{"round", i}, {"R", to_json(R)}, {"N", to_json(N)}});
  }
  m["pass"] = all_pass;
  if (cfg.artifacts) rec.artifacts["audit.json"] = reports.dump(2) + "\n";
}

inline void trial_color(const ExperimentConfig& cfg, TrialRecord& rec) {
  const auto& pt = rec.point;
  Hypergraph h;
  if (cfg.hypergraph_file) {
    std::ifstream in(*cfg.hypergraph_file);
    if (!in) throw std::runtime_error("cannot open hypergraph file " + *cfg.hypergraph_file);
    h = read_hypergraph(in);
  } else {
    h = complete_uniform(static_cast<std::size_t>(pt.at("n")), static_cast<int>(pt.at("r")));
  }
  const double n = static_cast<double>(h.n());
  const int r = h.r();
  const auto m = static_cast<std::size_t>(pt.at("m"));
  // horizon: the m of q = floor(r m / n); steps: edges actually coloured.
  std::size_t horizon = m, steps = 0;
  double gamma = pt.at("gamma");
  if (pt.count("delta")) {
    horizon = static_cast<std::size_t>(std::floor((1 + pt.at("delta")) * static_cast<double>(m)));
    gamma = 1 - 1 / (1 + pt.at("delta"));
    steps = m;
  } else {
    steps = static_cast<std::size_t>(std::floor((1 - gamma) * static_cast<double>(m)));
  }
  const std::size_t q = pt.count("q") ? static_cast<std::size_t>(pt.at("q"))
                                      : static_cast<std::size_t>(std::floor(r * static_cast<double>(horizon) / n));
  if (q < 1) throw std::invalid_argument("palette q = floor(r m / n) is zero");
  if (steps < 1) throw std::invalid_argument("no steps to colour");

  const RegularityReport reg = check_regularity(h);
  const double sigma = pt.count("sigma") ? pt.at("sigma") : reg.sigma_implied;
  Rng base(rec.seed, "trial");
  Rng srng = base.derive("sequence");
  const auto seq = sample_sequence_fixed_m(h, steps, srng);
  Rng crng = base.derive("color");
  const ColoringRun run = greedy_color(h, seq, q, crng);
  const PropernessReport proper = check_proper(h, run);

  std::vector<TrajectorySnapshot> snaps;
  if (!cfg.checkpoints.empty()) {
    TrajectorySampleSpec ts;
    ts.edge_samples = static_cast<std::size_t>(pt.at("edge_samples"));
    ts.vc_samples = static_cast<std::size_t>(pt.at("vc_samples"));
    ts.seed = base.derive("trajectory")();
    snaps = trajectory_audit(h, run, cfg.checkpoints, std::isfinite(sigma) ? sigma : 1.0, ts, horizon);
  }
  const ConstantChecks cc = check_constants(h.n(), r, gamma, sigma, pt.count("delta") ? pt.at("delta") : gamma);

  auto& mm = rec.metrics;
  mm["q"] = q;
  mm["m"] = horizon;
  mm["m0"] = steps;
  mm["r"] = r;
  mm["failure_index"] = run.failure_index ? json(*run.failure_index) : json(nullptr);
  mm["succeeded"] = run.succeeded();
  mm["colored_steps"] = run.colored_steps();
  mm["proper"] = proper.ok;
  mm["D"] = reg.D_estimate;
  mm["sigma"] = std::isfinite(sigma) ? json(sigma) : json(nullptr);
  mm["cond_const"] = cc.cond_const;
  mm["ps_random"] = cc.ps_random;
  json js = json::array();
  for (const auto& s : snaps) js.push_back(to_json(s));
  mm["snapshots"] = js;
  double qmax = 0, ymax = 0;
  for (const auto& s : snaps) {
    qmax = std::max(qmax, s.q_rel_dev_max);
    ymax = std::max(ymax, s.y_rel_dev_max);
  }
  if (!snaps.empty()) {
    mm["q_rel_dev_max"] = qmax;
    mm["y_rel_dev_max"] = ymax;
  }
  std::size_t positive = 0;
  for (const auto& s : snaps) positive += s.q_mean > 0 ? 1 : 0;
  if (positive >= 2) mm["q_exponent"] = fit_q_exponent(snaps);
  if (cfg.artifacts) rec.artifacts["run.json"] = to_json(run, snaps).dump(2) + "\n";
}

inline void trial_prague(const ExperimentConfig& cfg, TrialRecord& rec) {
  const auto& pt = rec.point;
  const auto n = static_cast<std::size_t>(pt.at("n"));
  Rng base(rec.seed, "trial");
  Rng grng = base.derive("graph");
  const Graph g = sample_gnp(n, pt.at("p"), grng);
  Rng prng = base.derive("prague");
  const PragueResult res = prague_upper(g, nibble_params(pt), prng);
  const EmbeddingReport check = verify_embedding(g, res.rep);
  auto& m = rec.metrics;
  m["d"] = res.d;
  m["verified"] = check.ok;
  m["trivial_partition"] = res.trivial_partition;
  m["complement_density"] = res.complement_density;
  m["extra_coordinate"] = res.rep.extra_coordinate;
  m["partition_size"] = res.cover.cliques.size();
  m["blocks"] = block_json(res.cover.blocks);
  if (cfg.artifacts) {
    rec.artifacts["representation.json"] = to_json(res.rep).dump() + "\n";
    rec.artifacts["embedding.json"] = to_json(check).dump(2) + "\n";
  }
}

inline void trial_lowerbound(const ExperimentConfig&, TrialRecord& rec) {
  const auto& pt = rec.point;
  const LowerBounds b = lower_bounds(static_cast<std::size_t>(pt.at("n")), pt.at("p"), pt.at("eps"));
  auto& m = rec.metrics;
  m["s"] = b.s;
  m["phi"] = b.phi;
  m["ccn_lb"] = b.ccn_lb;
  m["cct_lb"] = b.cct_lb;
  m["phi_near_zero"] = b.phi_near_zero;
  m["phi_half"] = b.phi_half;
  m["phi_near_one"] = b.phi_near_one;
}

}  // namespace detail

inline TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t grid_index, std::size_t replicate) {
  TrialRecord rec;
  rec.mode = cfg.mode;
  rec.point = cfg.point(grid_index);
  rec.grid_index = grid_index;
  rec.replicate = replicate;
  rec.seed = cfg.trial_seed(grid_index, replicate);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (cfg.mode == "partition")
      detail::trial_partition(cfg, rec);
    else if (cfg.mode == "audit")
      detail::trial_audit(cfg, rec);
    else if (cfg.mode == "color")
      detail::trial_color(cfg, rec);
    else if (cfg.mode == "prague")
      detail::trial_prague(cfg, rec);
    else if (cfg.mode == "lowerbound")
      detail::trial_lowerbound(cfg, rec);
    else
      throw std::logic_error("unknown mode " + cfg.mode);
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error = e.what();
    rec.metrics = json::object();
    rec.artifacts.clear();
  } catch (...) {
    rec.status = "error";
    rec.error = "unknown exception";
    rec.metrics = json::object();
    rec.artifacts.clear();
  }
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

// ---- summaries -----------------------------------------------------------

struct Stats {
  std::size_t count = 0;
  double mean = 0, std = 0, min = 0, max = 0;
};

inline Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

namespace detail {

inline std::string fmt_double(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace detail

// Long format: one row per (grid point, scalar metric) over ok records.
inline std::string summary_csv(const ExperimentConfig& cfg, const std::vector<TrialRecord>& recs) {
  std::ostringstream os;
  os << "grid_index";
  for (const auto& [k, v] : cfg.grid) os << ',' << k;
  os << ",metric,count,errors,mean,std,min,max\n";
  std::map<std::size_t, std::map<std::string, std::vector<double>>> vals;
  std::map<std::size_t, std::size_t> errors;
  for (const auto& r : recs) {
    if (r.status != "ok") {
      ++errors[r.grid_index];
      continue;
    }
    auto& slot = vals[r.grid_index];
    for (const auto& [k, v] : r.metrics.items())
      if (v.is_number() || v.is_boolean()) slot[k].push_back(v.is_boolean() ? (v.get<bool>() ? 1.0 : 0.0) : v.get<double>());
  }
  for (std::size_t g = 0; g < cfg.grid_size(); ++g) {
    const auto pt = cfg.point(g);
    for (const auto& [metric, xs] : vals[g]) {
      const Stats s = stats_of(xs);
      os << g;
      for (const auto& [k, v] : pt) os << ',' << detail::fmt_double(v);
      os << ',' << metric << ',' << s.count << ',' << errors[g] << ',' << detail::fmt_double(s.mean) << ','
         << detail::fmt_double(s.std) << ',' << detail::fmt_double(s.min) << ',' << detail::fmt_double(s.max) << '\n';
    }
  }
  return os.str();
}

enum class Normalizer { One, Packing, Thickness };

inline Normalizer parse_normalizer(const std::string& s) {
  if (s == "one" || s == "1") return Normalizer::One;
  if (s == "packing") return Normalizer::Packing;
  if (s == "thickness") return Normalizer::Thickness;
  throw std::invalid_argument("unknown normalizer: " + s + " (one|packing|thickness)");
}

inline double normalizer_value(Normalizer nz, double n, double p) {
  switch (nz) {
    case Normalizer::One: return 1.0;
    case Normalizer::Packing: {
      const double l = log_base_inv(p, n);
      return n * n * p / (l * l);
    }
    case Normalizer::Thickness: return n * p / log_base_inv(p, n);
  }
  return 1.0;
}

struct ScalingRow {
  std::map<std::string, double> point;
  std::size_t count = 0;
  double mean_ratio = 0;
  double std_ratio = 0;
  std::optional<double> half_width;  // 1.96 sd / sqrt(count); none for a single record
};

// metric / normalizer(n, p) per grid point over ok records.
inline std::vector<ScalingRow> summarize_scaling(const std::vector<TrialRecord>& recs, const std::string& metric,
                                                 Normalizer nz) {
  std::set<std::string> modes;
  for (const auto& r : recs) modes.insert(r.mode);
  if (modes.size() > 1) throw std::invalid_argument("summarize_scaling: records mix modes");
  std::map<std::map<std::string, double>, std::vector<double>> groups;
  for (const auto& r : recs) {
    if (r.status != "ok" || !r.metrics.contains(metric)) continue;
    const auto& v = r.metrics[metric];
    if (!v.is_number()) continue;
    double norm = 1.0;
    if (nz != Normalizer::One) {
      if (!r.point.count("n") || !r.point.count("p"))
        throw std::invalid_argument("summarize_scaling: normalizer needs n and p in the grid");
      norm = normalizer_value(nz, r.point.at("n"), r.point.at("p"));
    }
    groups[r.point].push_back(v.get<double>() / norm);
  }
  std::vector<ScalingRow> rows;
  for (const auto& [pt, xs] : groups) {
    const Stats s = stats_of(xs);
    ScalingRow row;
    row.point = pt;
    row.count = s.count;
    row.mean_ratio = s.mean;
    row.std_ratio = s.std;
    if (s.count > 1) row.half_width = 1.96 * s.std / std::sqrt(static_cast<double>(s.count));
    rows.push_back(row);
  }
  return rows;
}

inline std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::set<std::string> keys;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.point) keys.insert(k);
  std::ostringstream os;
  for (const auto& k : keys) os << k << ',';
  os << "count,mean_ratio,std_ratio,half_width\n";
  for (const auto& r : rows) {
    for (const auto& k : keys) os << (r.point.count(k) ? detail::fmt_double(r.point.at(k)) : "NA") << ',';
    os << r.count << ',' << detail::fmt_double(r.mean_ratio) << ',' << detail::fmt_double(r.std_ratio) << ','
       << (r.half_width ? detail::fmt_double(*r.half_width) : "NA") << '\n';
  }
  return os.str();
}

inline TrialRecord record_from_json(const json& j) {
  TrialRecord r;
  r.mode = j.at("mode").get<std::string>();
  r.point = j.at("point").get<std::map<std::string, double>>();
  r.grid_index = j.at("grid_index").get<std::size_t>();
  r.replicate = j.at("replicate").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.status = j.at("status").get<std::string>();
  r.metrics = j.at("metrics");
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  r.wall_time_ms = j.value("wall_time_ms", 0.0);
  return r;
}

inline std::vector<TrialRecord> read_records(std::istream& is) {
  std::vector<TrialRecord> out;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(record_from_json(json::parse(line)));
  return out;
}

// ---- driver --------------------------------------------------------------

struct RunOptions {
  unsigned jobs = 1;
  bool write_files = true;
};

// Runs every trial. Records reach records.jsonl in trial order, flushed as
// each contiguous prefix completes, so an interrupted batch keeps its head.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {}) {
  namespace fs = std::filesystem;
  const std::size_t reps = cfg.replicates();
  const std::size_t total = cfg.grid_size() * reps;
  if (total == 0) throw ConfigError("no trials");
  std::ofstream jsonl;
  if (opt.write_files) {
    fs::create_directories(cfg.out);
    std::ofstream(fs::path(cfg.out) / "config-echo.json") << config_echo(cfg).dump(2) << '\n';
    jsonl.open(fs::path(cfg.out) / "records.jsonl", std::ios::trunc);
    if (!jsonl) throw std::runtime_error("cannot write records.jsonl in " + cfg.out);
  }

  std::vector<std::optional<TrialRecord>> slots(total);
  std::mutex sink;
  std::size_t flushed = 0;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= total) return;
      TrialRecord rec = run_trial(cfg, t / reps, t % reps);
      std::lock_guard<std::mutex> lock(sink);
      slots[t] = std::move(rec);
      while (flushed < total && slots[flushed]) {
        TrialRecord& r = *slots[flushed];
        if (opt.write_files) {
          jsonl << r.to_json().dump() << '\n';
          jsonl.flush();
          if (!r.artifacts.empty()) {
            const fs::path dir = fs::path(cfg.out) / "trials" /
                                 (std::to_string(r.grid_index) + "_" + std::to_string(r.replicate));
            fs::create_directories(dir);
            for (const auto& [name, content] : r.artifacts) std::ofstream(dir / name) << content;
          }
        }
        ++flushed;
      }
    }
  };
  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<TrialRecord> out;
  out.reserve(total);
  for (auto& s : slots) out.push_back(std::move(*s));
  if (opt.write_files) std::ofstream(fs::path(cfg.out) / "summary.csv") << summary_csv(cfg, out);
  return out;
}

}  // namespace pdim
