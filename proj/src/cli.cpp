#include "hypwalk/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>

#include "hypwalk/config.hpp"
#include "hypwalk/environment.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/experiments.hpp"
#include "hypwalk/flows.hpp"
#include "hypwalk/graph_io.hpp"
#include "hypwalk/report.hpp"

namespace hypwalk {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<double> tol;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "INI file with [graph], [weights], [experiment]")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "master seed");
  sub->add_option("--replicas", o.replicas, "number of environments");
  sub->add_option("--threads", o.threads, "OpenMP threads (0: runtime default)");
  sub->add_option("--out", o.out, "output path");
  sub->add_option("--format", o.format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  sub->add_option("--tol", o.tol, "quadrature tolerance");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.seed) c.exp.seed = *o.seed;
  if (o.replicas) {
    c.exp.n_environments = *o.replicas;
    c.replicas_set = true;
  }
  if (o.threads) c.exp.threads = *o.threads;
  if (o.out) c.out = *o.out;
  if (o.format) c.format = *o.format;
  if (o.tol) c.exp.quad_tol = *o.tol;
  require(c.exp.threads >= 0, "threads must be >= 0");
  return c;
}

struct Model {
  std::optional<LatticeGraph> lattice;
  std::optional<GraphFile> file;
  WeightSystem ws;
  std::optional<LatticeWeights> lw;

  const ArcGraphModel& model() const { return lattice ? lattice->model() : file->model; }
  EdgeId root() const { return lattice ? lattice->root_edge() : file->root_edge; }
};

Model load_model(const ExperimentConfig& cfg) {
  Model m;
  const auto& g = cfg.graph;
  if (g.kind == GraphSpec::Kind::file) {
    require(!g.file.empty(), "graph.file must name a graph file when graph.kind = file");
    m.file = read_graph_file(g.file);
    m.ws = m.file->weights;
    return m;
  }
  m.lattice = g.kind == GraphSpec::Kind::torus ? LatticeGraph::torus({g.d, g.n, g.root_direction})
                                               : LatticeGraph::box({g.d, g.n, g.root_direction});
  m.lw = cfg.weights.lattice(g.d);
  m.ws = lattice_weight_system(*m.lattice, *m.lw);
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw PreconditionError("cannot write " + path);
  return os;
}

std::string stem(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

int cmd_describe(const RunConfig& c, std::ostream& out) {
  const auto m = load_model(c.exp);
  const auto& am = m.model();
  ordered_json j;
  j["vertices"] = am.graph.vertex_count();
  j["edges"] = am.edge_count();
  j["arcs"] = am.arc_count();
  j["root_edge"] = m.root();
  if (m.lattice) {
    const auto& g = *m.lattice;
    j["kind"] = g.kind() == LatticeKind::torus ? "torus" : "box";
    j["d"] = g.dimension();
    j["N"] = g.size();
    const auto& w = *m.lw;
    j["alpha"] = w.alpha;
    j["dirichlet"] = w.dirichlet();
    j["kappa"] = kappa(w);
    j["kappa_displayed"] = kappa_displayed(w);
    j["kappa_tilde"] = kappa_tilde(w);
    const auto cut = min_cut_lattice(LatticeCapacities::from_alpha(w), g.size());
    j["min_cut_alpha"] = cut.cut;
    j["single_vertex_cut_alpha"] = cut.single_vertex;
  } else {
    j["kind"] = "file";
    double worst = 0.0;
    for (double v : div_vertex(am.graph, m.ws.alpha)) worst = std::max(worst, std::abs(v));
    j["max_abs_div_alpha"] = worst;
  }
  for (const auto& [k, v] : j.items()) out << k << ": " << v.dump() << '\n';
  if (!c.out.empty()) open_out(c.out) << j.dump(2) << '\n';
  return kExitPass;
}

int cmd_phi(const RunConfig& c, std::ostream& out) {
  const auto p = c.exp.weights.phi_params();
  ordered_json j;
  j["n"] = p.n();
  j["l"] = p.l();
  if (c.method == "mc" || p.n() > 4) {
    const auto e = phi_mc(p, c.exp.n_samples, c.exp.seed);
    j["value"] = e.mean;
    j["method"] = "monte-carlo";
    j["std_error"] = e.std_error;
    j["samples"] = e.n_samples;
  } else {
    const auto v = phi_quadrature(p, c.exp.quad_tol);
    j["value"] = v.value;
    j["log_value"] = v.log_value;
    j["method"] = "quadrature";
    j["tolerance"] = c.exp.quad_tol;
    j["error_estimate"] = v.error;
    j["nodes_per_axis"] = v.nodes_per_axis;
  }
  out.precision(17);
  for (const auto& [k, v] : j.items()) out << k << ": " << v.dump() << '\n';
  if (!c.out.empty()) open_out(c.out) << j.dump(2) << '\n';
  return kExitPass;
}

int cmd_sample_env(const RunConfig& c, std::ostream& out) {
  const auto m = load_model(c.exp);
  const auto env = sample_environment(m.model(), m.ws, c.exp.seed);
  ordered_json prov;
  prov["graph"] = c.exp.to_json()["graph"];
  prov["weights"] = c.exp.to_json()["weights"];
  prov["seed"] = c.exp.seed;
  if (c.out.empty()) {
    write_environment(out, m.model(), env, prov.dump());
  } else {
    auto os = open_out(c.out);
    write_environment(os, m.model(), env, prov.dump());
    out << "wrote " << c.out << '\n';
  }
  return kExitPass;
}

int cmd_flow_build(const RunConfig& c, std::ostream& out) {
  const auto& g = c.exp.graph;
  require(g.kind == GraphSpec::Kind::torus, "flow-build: needs graph.kind = torus");
  const auto torus = LatticeGraph::torus({g.d, g.n, g.root_direction});
  const auto w = c.exp.weights.lattice(g.d);
  LatticeCapacities caps;
  if (c.capacity == "alpha") {
    caps = LatticeCapacities::from_alpha(w);
  } else if (c.capacity == "boosted") {
    caps = alpha_boosted(w, c.exp.directions.empty() ? kappa_argmax(w) : c.exp.directions.front());
  } else {
    caps = LatticeCapacities::uniform(g.d, c.capacity_value);
  }
  const double m = c.strength ? *c.strength : min_cut_lattice(caps, g.n).cut;
  const auto vf = build_vertex_flow(torus, caps.on(torus), m);
  ordered_json prov;
  prov["capacity"] = c.capacity;
  prov["per_direction"] = caps.per_direction;
  prov["boost_direction"] = caps.boost_direction;
  prov["boost"] = caps.boost;
  prov["N"] = g.n;
  prov["d"] = g.d;
  prov["strength"] = m;
  out << "strength: " << m << "\nenergy: " << vf.energy << "\nsweeps: " << vf.sweeps << '\n';
  if (c.out.empty()) {
    write_vertex_flow(out, torus, vf, prov.dump());
  } else {
    auto os = open_out(c.out);
    write_vertex_flow(os, torus, vf, prov.dump());
    out << "wrote " << c.out << '\n';
  }
  if (c.lift) {
    require(!c.out.empty(), "flow-build: lift = true needs --out");
    const auto af = lift_to_arc_flow(torus, vf, torus.root_edge());
    const auto path = stem(c.out) + ".arcs.json";
    auto os = open_out(path);
    write_arc_flow(os, torus, af, prov.dump());
    out << "wrote " << path << '\n';
  }
  return kExitPass;
}

int cmd_experiment(const std::string& name, const RunConfig& c, std::ostream& out) {
  ExperimentConfig cfg = c.exp;
  if (name == "trap-times" && !c.replicas_set) cfg.n_environments = 10000;
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  if (name == "duality") rep = run_duality_sweep(cfg);
  else if (name == "reversal") rep = run_reversal_suite(cfg);
  else if (name == "green-moment") rep = run_green_moment(cfg);
  else if (name == "invariant-measure") rep = run_invariant_measure(cfg);
  else rep = run_trap_times(cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const bool json = c.format != "csv", csv = c.format != "json";
  require(!csv || !c.out.empty(), "--format csv or both needs --out");
  if (json) {
    if (c.out.empty()) {
      write_report(out, rep);
    } else {
      auto os = open_out(c.out);
      write_report(os, rep);
      open_out(c.out + ".sidecar.json") << sidecar_json(wall, cfg.threads).dump(2) << '\n';
    }
  }
  if (csv)
    for (const auto& p : write_csv_files(stem(c.out), rep)) out << "wrote " << p << '\n';
  for (const auto& f : rep.flags) out << (f.pass ? "PASS " : "FAIL ") << f.name << '\n';
  return rep.all_pass() ? kExitPass : kExitFail;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random walks in hypergeometric random environments: sampling and numerical checks", "hypwalk"};
  app.set_version_flag("--version", HYPWALK_VERSION);
  app.require_subcommand(1, 1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"describe", "graph sizes, kappa, kappa-tilde and min-cut"},
      {"phi", "evaluate Phi(alpha, beta, Z)"},
      {"sample-env", "draw one environment and dump it"},
      {"duality", "duality residuals over random balanced cases"},
      {"reversal", "weak time reversal and hitting identity suite"},
      {"green-moment", "moments of the killed Green function on boxes"},
      {"invariant-measure", "moments of f_N on tori with the flow bound"},
      {"trap-times", "annealed trap times of an edge pair"},
      {"flow-build", "vertex flow on a torus, optionally lifted to arcs"},
  };
  Overrides o;
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const auto c = resolve(o);
    if (name == "describe") return cmd_describe(c, out);
    if (name == "phi") return cmd_phi(c, out);
    if (name == "sample-env") return cmd_sample_env(c, out);
    if (name == "flow-build") return cmd_flow_build(c, out);
    return cmd_experiment(name, c, out);
  } catch (const PreconditionError& e) {
    err << "hypwalk: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "hypwalk: error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace hypwalk
