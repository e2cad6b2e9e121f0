// Command-line front end. Every subcommand either loads a JSON experiment
// config (--config) or builds a one-point config from flags, then runs it
// through the experiment driver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdim/pdim.hpp"

namespace {

using pdim::json;

struct Common {
  std::string config;
  std::string out;
  unsigned jobs = 1;
  bool artifacts = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON experiment config");
  sub->add_option("--out", c.out, "output directory (overrides the config)");
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--artifacts", c.artifacts, "write per-trial detail files");
}

struct FlagGrid {
  std::vector<std::pair<std::string, CLI::Option*>> opts;
  std::map<std::string, double> values;

  void add(CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    opts.push_back({key, sub->add_option(flag, values[key], help)});
  }
  bool any() const {
    for (const auto& [k, o] : opts)
      if (o->count() > 0) return true;
    return false;
  }
  json grid() const {
    json g = json::object();
    for (const auto& [k, o] : opts)
      if (o->count() > 0) g[k] = values.at(k);
    return g;
  }
};

int run_config(json j, const Common& c, const std::string& mode) {
  if (!c.out.empty()) j["out"] = c.out;
  if (c.artifacts) j["artifacts"] = true;
  pdim::ExperimentConfig cfg;
  try {
    cfg = pdim::parse_config(j);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }
  if (cfg.mode != mode) {
    std::fprintf(stderr, "config error: config mode '%s' does not match subcommand '%s'\n", cfg.mode.c_str(),
                 mode.c_str());
    return 2;
  }
  pdim::RunOptions opt;
  opt.jobs = c.jobs;
  const auto recs = pdim::run_experiment(cfg, opt);
  std::size_t errors = 0;
  for (const auto& r : recs) errors += r.status == "ok" ? 0 : 1;
  std::printf("%zu trials, %zu errors -> %s\n", recs.size(), errors, cfg.out.c_str());
  for (const auto& r : recs)
    if (r.status != "ok") std::fprintf(stderr, "trial %zu/%zu: %s\n", r.grid_index, r.replicate, r.error.c_str());
  return errors == 0 ? 0 : 1;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clique-partition nibble, greedy hypergraph colouring and product representations"};
  app.require_subcommand(1);

  // partition / audit / prague share the graph and schedule flags.
  struct Sub {
    CLI::App* app;
    Common common;
    FlagGrid grid;
    std::vector<std::uint64_t> seeds;
  };
  std::map<std::string, Sub> subs;
  auto make = [&](const std::string& name, const std::string& help) -> Sub& {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    add_common(s.app, s.common);
    s.app->add_option("--seed,--seeds", s.seeds, "seed list, used verbatim")->delimiter(',');
    return s;
  };
  auto nibble_flags = [](Sub& s) {
    s.grid.add(s.app, "--n", "n", "vertices");
    s.grid.add(s.app, "--p", "p", "edge probability");
    s.grid.add(s.app, "--ca", "ca", "clique-size constant");
    s.grid.add(s.app, "--tau", "tau", "round-count exponent");
    s.grid.add(s.app, "--beps", "beps", "eps = n^-beps");
    s.grid.add(s.app, "--max-k", "max_k", "cap on the clique size k");
  };

  Sub& part = make("partition", "clique-partition G(n,p) with the nibble and colour the result");
  nibble_flags(part);

  Sub& aud = make("audit", "sample the pseudo-randomness statistics of G_i");
  nibble_flags(aud);
  std::vector<int> rounds{0};
  std::size_t samples = 20;
  double tol_mult = 1.0;
  aud.app->add_option("--rounds", rounds, "rounds to audit")->delimiter(',');
  aud.app->add_option("--samples", samples, "sampled sets per (|S|, j)");
  aud.app->add_option("--tolerance-multiplier", tol_mult, "scales the eps bands");

  Sub& pr = make("prague", "certified product representation of G(n,p) or of an edge-list graph");
  nibble_flags(pr);
  pr.grid.add(pr.app, "--fallback-alpha", "fallback_alpha", "trivial partition when density <= n^-alpha");
  std::string graph_file;
  pr.app->add_option("--graph", graph_file, "edge-list graph instead of G(n,p)");

  Sub& col = make("color", "random greedy colouring of a random edge sequence");
  std::string hyper_file;
  col.app->add_option("--hypergraph", hyper_file, "hypergraph file (n r m, then m edges)");
  col.grid.add(col.app, "--complete-r", "r", "uniformity of the complete hypergraph");
  col.grid.add(col.app, "--n", "n", "vertices of the complete hypergraph");
  col.grid.add(col.app, "--m", "m", "m in q = floor(r m / n)");
  col.grid.add(col.app, "--q", "q", "palette size (default floor(r m / n))");
  col.grid.add(col.app, "--delta", "delta", "colour with m' = (1 + delta) m");
  col.grid.add(col.app, "--gamma", "gamma", "stop after floor((1 - gamma) m) edges");
  col.grid.add(col.app, "--sigma", "sigma", "regularity exponent for the error envelope");
  col.grid.add(col.app, "--vc-samples", "vc_samples", "sampled (v, c) pairs per checkpoint");
  col.grid.add(col.app, "--edge-samples", "edge_samples", "sampled edges per checkpoint (0: all)");
  std::vector<double> checkpoints;
  col.app->add_option("--checkpoints", checkpoints, "times t in [0, 1 - gamma]")->delimiter(',');

  Sub& lb = make("lowerbound", "clique cover lower-bound formulas");
  lb.grid.add(lb.app, "--n", "n", "vertices");
  lb.grid.add(lb.app, "--p", "p", "edge probability");
  lb.grid.add(lb.app, "--eps", "eps", "slack eps in (0,1)");

  auto* summ = app.add_subcommand("summarize", "metric / normalizer table from records.jsonl");
  std::string records, metric, normalizer = "one", summ_out;
  summ->add_option("--records", records, "records.jsonl")->required();
  summ->add_option("--metric", metric, "metric name")->required();
  summ->add_option("--normalizer", normalizer, "one | packing | thickness");
  summ->add_option("--out", summ_out, "CSV file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (summ->parsed()) {
      std::ifstream in(records);
      if (!in) throw std::runtime_error("cannot open " + records);
      const auto rows = pdim::summarize_scaling(pdim::read_records(in), metric, pdim::parse_normalizer(normalizer));
      const std::string csv = pdim::scaling_csv(rows);
      if (summ_out.empty())
        std::cout << csv;
      else
        std::ofstream(summ_out) << csv;
      return 0;
    }

    if (pr.app->parsed() && !graph_file.empty()) {
      std::ifstream in(graph_file);
      if (!in) throw std::runtime_error("cannot open " + graph_file);
      const pdim::Graph g = pdim::read_edge_list(in);
      pdim::NibbleParams prm;
      const auto& v = pr.grid.values;
      for (const auto& [k, o] : pr.grid.opts) {
        if (o->count() == 0) continue;
        if (k == "ca") prm.ca = v.at(k);
        else if (k == "tau") prm.tau = static_cast<int>(v.at(k));
        else if (k == "beps") prm.beps = v.at(k);
        else if (k == "max_k") prm.max_clique_cap = static_cast<int>(v.at(k));
        else if (k == "fallback_alpha") prm.fallback_alpha = v.at(k);
        else throw std::runtime_error("--" + k + " does not apply with --graph");
      }
      prm.validate();
      pdim::Rng rng(pr.seeds.empty() ? 1 : pr.seeds.front(), "prague");
      const auto res = pdim::prague_upper(g, prm, rng);
      const std::string out = pr.common.out.empty() ? "results" : pr.common.out;
      std::filesystem::create_directories(out);
      std::ofstream(std::filesystem::path(out) / "representation.json") << pdim::to_json(res.rep).dump() << '\n';
      std::ofstream(std::filesystem::path(out) / "embedding.json")
          << pdim::to_json(pdim::verify_embedding(g, res.rep)).dump(2) << '\n';
      std::printf("d = %zu (verified) -> %s\n", res.d, out.c_str());
      return 0;
    }

    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      if (!s.common.config.empty()) {
        if (s.grid.any() || !s.seeds.empty() || (name == "color" && (!hyper_file.empty() || !checkpoints.empty())))
          throw std::runtime_error("parameter flags cannot be combined with --config");
        return run_config(load_json(s.common.config), s.common, name);
      }
      json j = {{"mode", name}, {"grid", s.grid.grid()}};
      j["seeds"] = s.seeds.empty() ? std::vector<std::uint64_t>{1} : s.seeds;
      j["out"] = "results";
      if (s.seeds.size() <= 1) j["artifacts"] = true;
      if (name == "color") {
        if (!hyper_file.empty()) j["hypergraph"] = hyper_file;
        if (!checkpoints.empty()) j["checkpoints"] = checkpoints;
      }
      if (name == "audit") {
        j["audit"] = {{"rounds", rounds}, {"tolerance_multiplier", tol_mult}};
        j["audit"]["samples"] = samples;
      }
      return run_config(j, s.common, name);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
