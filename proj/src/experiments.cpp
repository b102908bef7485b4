#include "hypwalk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypwalk/chain.hpp"
#include "hypwalk/environment.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/flows.hpp"
#include "hypwalk/graph_io.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

const char* kind_name(GraphSpec::Kind k) {
  switch (k) {
    case GraphSpec::Kind::torus: return "torus";
    case GraphSpec::Kind::box: return "box";
    case GraphSpec::Kind::file: return "file";
  }
  return "?";
}

void check_common(const ExperimentConfig& cfg) {
  require(cfg.n_environments >= 2, "n_environments must be >= 2");
  require(cfg.graph.d >= 1, "graph dimension must be >= 1");
  require(cfg.quad_tol > 0.0, "quadrature tolerance must be positive");
}

void check_n_grid(const ExperimentConfig& cfg) {
  require(!cfg.n_values.empty(), "the N grid must be nonempty");
  for (int n : cfg.n_values) require(n >= 2, "every N in the grid must be >= 2");
  for (std::size_t i = 1; i < cfg.n_values.size(); ++i)
    require(cfg.n_values[i] > cfg.n_values[i - 1], "the N grid must be strictly increasing");
}

ordered_json kappa_metadata(const LatticeWeights& w) {
  ordered_json j;
  j["kappa"] = kappa(w);
  j["kappa_displayed"] = kappa_displayed(w);
  j["kappa_tilde"] = kappa_tilde(w);
  j["kappa_direction"] = kappa_argmax(w);
  return j;
}

Flag kappa_order_flag(const LatticeWeights& w) {
  const double k = kappa(w), kt = kappa_tilde(w);
  return {"kappa_tilde_le_kappa", kt <= k, "kappa_tilde <= kappa", {{"kappa", k}, {"kappa_tilde", kt}}};
}

Flag trend_flag(const std::string& name, bool want_increase, const std::vector<const GridEstimate*>& by_n,
                double threshold) {
  std::vector<Estimate> e;
  ordered_json labels = ordered_json::array();
  for (const auto* g : by_n) {
    e.push_back(g->estimate);
    labels.push_back(g->label);
  }
  const bool inc = significant_increase(e, threshold);
  Flag f;
  f.name = name;
  f.pass = want_increase ? inc : !inc;
  f.rule = want_increase ? "the last three estimates increase and z(last, third to last) > " + num(threshold)
                         : "no increase with z > " + num(threshold) + " across the three largest N";
  f.evidence["estimates"] = labels;
  f.evidence["increase_detected"] = inc;
  if (e.size() >= 2) f.evidence["z_last_vs_first_of_window"] = z_score(e.back(), e[e.size() >= 3 ? e.size() - 3 : 0]);
  return f;
}

GridEstimate make_grid(std::string label, ordered_json params, std::vector<double> samples,
                       std::vector<std::uint64_t> streams, bool keep = true) {
  GridEstimate g;
  g.label = std::move(label);
  g.params = std::move(params);
  g.estimate = make_estimate(samples);
  if (keep) {
    g.samples = std::move(samples);
    g.streams = std::move(streams);
  }
  return g;
}

const char* kBoundednessNote =
    "Boundedness in N is tested as: no strictly increasing run over the three largest N whose end-to-end "
    "z-score exceeds the threshold. A finite grid cannot show a supremum over all N.";

}  // namespace

LatticeWeights WeightSpec::lattice(int d) const {
  require(d >= 1, "lattice weights: d must be >= 1");
  const auto k = static_cast<std::size_t>(2 * d);
  LatticeWeights w;
  w.d = d;
  if (alpha.size() == 1) {
    w.alpha.assign(k, alpha[0]);
  } else {
    require(alpha.size() == k, "lattice weights: alpha needs 1 or 2d values");
    w.alpha = alpha;
  }
  w.z.assign(k * k, 1.0);
  if (z == "ones") {
  } else if (z == "backtrack") {
    for (int i = 0; i < 2 * d; ++i)
      w.z[static_cast<std::size_t>(i) * k + static_cast<std::size_t>(opposite_direction(i, d))] = z_backtrack;
  } else if (z == "random") {
    require(z_lo > 0.0 && z_hi >= z_lo, "lattice weights: need 0 < z_lo <= z_hi");
    Engine eng(z_seed);
    for (auto& v : w.z) v = z_lo + (z_hi - z_lo) * uniform01(eng);
  } else if (z == "matrix") {
    require(z_matrix.size() == k, "lattice weights: z matrix needs 2d rows");
    for (std::size_t i = 0; i < k; ++i) {
      require(z_matrix[i].size() == k, "lattice weights: z matrix needs 2d columns");
      for (std::size_t j = 0; j < k; ++j) w.z[i * k + j] = z_matrix[i][j];
    }
  } else {
    throw PreconditionError("lattice weights: unknown z kind '" + z + "'");
  }
  w.validate();
  return w;
}

HypergeomParams WeightSpec::phi_params() const {
  HypergeomParams p;
  p.alpha = alpha;
  p.beta = beta;
  const auto n = alpha.size(), l = beta.size();
  require(n >= 1 && l >= 1, "phi: alpha and beta must be nonempty");
  if (z == "ones") {
    p.z = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n));
  } else if (z == "matrix") {
    require(z_matrix.size() == l, "phi: Z needs one row per beta entry");
    p.z.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < l; ++i) {
      require(z_matrix[i].size() == n, "phi: Z needs one column per alpha entry");
      for (std::size_t j = 0; j < n; ++j) p.z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z_matrix[i][j];
    }
  } else {
    throw PreconditionError("phi: z must be 'ones' or 'matrix'");
  }
  p.validate();
  return p;
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["graph"] = {{"kind", kind_name(graph.kind)}, {"d", graph.d}, {"n", graph.n},
                {"root_direction", graph.root_direction}, {"file", graph.file}};
  j["weights"] = {{"alpha", weights.alpha}, {"beta", weights.beta}, {"z", weights.z},
                  {"z_backtrack", weights.z_backtrack}, {"z_lo", weights.z_lo}, {"z_hi", weights.z_hi},
                  {"z_seed", weights.z_seed}, {"z_matrix", weights.z_matrix}};
  j["experiment"] = {{"s", s_values},
                     {"p", p_values},
                     {"n_values", n_values},
                     {"directions", directions},
                     {"replicas", n_environments},
                     {"samples", n_samples},
                     {"cycles", n_cycles},
                     {"cycle_steps", cycle_steps},
                     {"cases", n_cases},
                     {"trap_cap", trap_cap},
                     {"seed", seed},
                     {"tol", quad_tol},
                     {"z_threshold", z_threshold},
                     {"reversal_z", reversal_z},
                     {"identity_tol", identity_tol},
                     {"duality_tol", duality_tol}};
  return j;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(flags.begin(), flags.end(), [](const Flag& f) { return f.pass; });
}

const GridEstimate& ExperimentReport::estimate(const std::string& label) const {
  for (const auto& g : estimates)
    if (g.label == label) return g;
  throw PreconditionError("report has no estimate '" + label + "'");
}

const Flag& ExperimentReport::flag(const std::string& name) const {
  for (const auto& f : flags)
    if (f.name == name) return f;
  throw PreconditionError("report has no flag '" + name + "'");
}

bool significant_increase(const std::vector<Estimate>& by_n, double threshold) {
  if (by_n.size() < 2) return false;
  const std::size_t first = by_n.size() >= 3 ? by_n.size() - 3 : 0;
  for (std::size_t i = first + 1; i < by_n.size(); ++i)
    if (!(by_n[i].mean > by_n[i - 1].mean)) return false;
  return z_score(by_n.back(), by_n[first]) > threshold;
}

double hill_tail_index(std::vector<double> v, std::size_t k) {
  require(k >= 1 && k < v.size(), "hill_tail_index: need 1 <= k < n");
  std::sort(v.begin(), v.end(), std::greater<>());
  require(v[k] > 0.0, "hill_tail_index: threshold order statistic must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::log(v[i] / v[k]);
  return s > 0.0 ? static_cast<double>(k) / s : std::numeric_limits<double>::infinity();
}

bool exchangeable_directions(const LatticeWeights& w) {
  const int d = w.d;
  for (double a : w.alpha)
    if (a != w.alpha[0]) return false;
  const double same = w.z_at(0, 0), back = w.z_at(0, opposite_direction(0, d));
  const double turn = d > 1 ? w.z_at(0, 1) : 0.0;
  for (int i = 0; i < 2 * d; ++i) {
    for (int j = 0; j < 2 * d; ++j) {
      const double want = j == i ? same : j == opposite_direction(i, d) ? back : turn;
      if (w.z_at(i, j) != want) return false;
    }
  }
  return true;
}

ExperimentReport run_green_moment(const ExperimentConfig& cfg) {
  check_common(cfg);
  check_n_grid(cfg);
  const int d = cfg.graph.d;
  require(d >= 3, "green-moment: needs d >= 3");
  const auto w = cfg.weights.lattice(d);
  const double kt = kappa_tilde(w);
  require(!cfg.s_values.empty(), "green-moment: the s grid must be nonempty");
  for (double s : cfg.s_values)
    if (!(s >= 0.0 && s < kt))
      throw PreconditionError("green-moment: s = " + num(s) + " is outside the moment window [0, kappa_tilde) = [0, " +
                              num(kt) + ")");

  ExperimentReport rep;
  rep.experiment = "green-moment";
  rep.config = cfg.to_json();
  rep.metadata = kappa_metadata(w);
  rep.metadata["dirichlet"] = w.dirichlet();
  rep.notes.push_back(kBoundednessNote);
  rep.notes.push_back("G counts visits to e0 at times >= 0 before the walk crosses the special edge of the box.");

  std::size_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<std::size_t>> by_s(cfg.s_values.size());
  ordered_json sizes = ordered_json::array();
  for (int n : cfg.n_values) {
    const auto box = LatticeGraph::box({d, n, cfg.graph.root_direction});
    const auto& m = box.model();
    const auto ws = lattice_weight_system(box, w);
    const EnvironmentSampler sampler(m, ws);
    const std::size_t r = cfg.n_environments;
    std::vector<double> green(r), escape(r);
    std::vector<std::uint64_t> streams(r);
    for_each_replica(r, cfg.mode, [&](std::size_t i) {
      streams[i] = derive_seed(cfg.seed, static_cast<std::uint64_t>(n), i);
      const auto env = sampler.sample(streams[i]);
      const auto g = green_function_killed(m, env, box.root_edge(), *box.special_edge());
      green[i] = g.green;
      escape[i] = g.escape;
    }, cfg.threads);
    for (std::size_t i = 0; i < r; ++i) {
      const double excess = green[i] * escape[i] - 1.0;
      worst = std::max(worst, excess);
      if (excess > 1e-8) ++violations;
    }
    sizes.push_back({{"N", n}, {"edges", m.edge_count()}, {"arcs", m.arc_count()}});
    for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
      const double s = cfg.s_values[k];
      std::vector<double> v(r);
      for (std::size_t i = 0; i < r; ++i) v[i] = s == 0.0 ? 1.0 : std::pow(green[i], s);
      by_s[k].push_back(rep.estimates.size());
      rep.estimates.push_back(make_grid("N=" + std::to_string(n) + ",s=" + num(s), {{"N", n}, {"s", s}},
                                        std::move(v), streams));
    }
  }
  rep.metadata["boxes"] = sizes;
  rep.flags.push_back({"green_le_inverse_escape", violations == 0, "G * P[escape] <= 1 + 1e-8 in every environment",
                       {{"violations", violations}, {"max_excess", worst}}});
  for (std::size_t k = 0; k < cfg.s_values.size(); ++k) {
    std::vector<const GridEstimate*> g;
    for (auto idx : by_s[k]) g.push_back(&rep.estimates[idx]);
    rep.flags.push_back(trend_flag("bounded_in_N[s=" + num(cfg.s_values[k]) + "]", false, g, cfg.z_threshold));
  }
  rep.flags.push_back(kappa_order_flag(w));
  return rep;
}

ExperimentReport run_invariant_measure(const ExperimentConfig& cfg) {
  check_common(cfg);
  check_n_grid(cfg);
  const int d = cfg.graph.d;
  require(d >= 3, "invariant-measure: needs d >= 3");
  const auto w = cfg.weights.lattice(d);
  require(!cfg.p_values.empty(), "invariant-measure: the p grid must be nonempty");
  for (double p : cfg.p_values) require(p >= 1.0 && std::isfinite(p), "invariant-measure: every p must be >= 1");
  for (int n : cfg.n_values) {
    const double arcs = std::pow(static_cast<double>(n), d) * 4.0 * d * d;
    if (arcs > static_cast<double>(kPowerLimit))
      throw PreconditionError("invariant-measure: torus N = " + std::to_string(n) +
                              " is too large for the stationary solve");
  }
  const double kap = kappa(w);
  const int boost_dir = cfg.directions.empty() ? kappa_argmax(w) : cfg.directions.front();
  require(boost_dir >= 0 && boost_dir < 2 * d, "invariant-measure: direction out of range");
  const auto caps = alpha_boosted(w, boost_dir);

  ExperimentReport rep;
  rep.experiment = "invariant-measure";
  rep.config = cfg.to_json();
  rep.metadata = kappa_metadata(w);
  rep.metadata["boost_direction"] = boost_dir;
  rep.notes.push_back(kBoundednessNote);
  rep.notes.push_back("f_N = |E| pi(e0) on the N-torus. Grid points with p >= kappa (relative 1e-12) are divergence "
                      "probes: "
                      "their flag asks for a significant increase instead of boundedness.");
  rep.notes.push_back("The dominating flow uses capacities alpha + kappa on one edge at the origin, strength equal "
                      "to the box min-cut, lifted to arcs and rescaled to strength p / |E|.");

  const std::size_t np = cfg.p_values.size();
  std::vector<std::vector<std::size_t>> by_p(np);
  ordered_json flows = ordered_json::array();
  double identity_err = 0.0, dom_worst = -std::numeric_limits<double>::infinity();
  std::size_t dom_violations = 0, dom_checked = 0;
  std::vector<std::size_t> f1_index;
  for (int n : cfg.n_values) {
    const auto torus = LatticeGraph::torus({d, n, cfg.graph.root_direction});
    const auto& m = torus.model();
    const auto rev = reverse(m);
    const auto ws = lattice_weight_system(torus, w);
    const EnvironmentSampler sampler(m, ws);
    const EdgeId e0 = torus.root_edge();
    const double ne = static_cast<double>(m.edge_count());

    const double cut = min_cut_lattice(caps, n).cut;
    std::optional<ArcFlow> base;
    ordered_json fj{{"N", n}, {"min_cut", cut}};
    try {
      const auto vf = build_vertex_flow(torus, caps.on(torus), cut);
      base = lift_to_arc_flow(torus, vf, e0);
      double arc_energy = 0.0;
      for (double t : base->theta) arc_energy += t * t;
      fj["vertex_energy"] = vf.energy;
      fj["arc_energy"] = arc_energy;
      fj["sweeps"] = vf.sweeps;
    } catch (const NumericalError& e) {
      fj["error"] = e.what();
    }
    flows.push_back(fj);

    const std::size_t r = cfg.n_environments;
    std::vector<double> f(r), err(r, 0.0);
    std::vector<std::vector<double>> slack(np, std::vector<double>(r, 0.0));
    std::vector<std::uint64_t> streams(r);
    for_each_replica(r, cfg.mode, [&](std::size_t i) {
      streams[i] = derive_seed(cfg.seed, static_cast<std::uint64_t>(n), i);
      const auto env = sampler.sample(streams[i]);
      const auto pi = stationary(m, env);
      f[i] = ne * pi.pi[static_cast<std::size_t>(e0)];
      if (!base) return;
      for (std::size_t k = 0; k < np; ++k) {
        const auto flow = scaled(*base, cfg.p_values[k] / base->strength / ne);
        const auto id = flow_identity_check(m, rev, env, pi, flow.theta, std::pair{e0, flow.strength});
        err[i] = std::max(err[i], id.max_rel_error);
        const double lhs = cfg.p_values[k] * std::log(f[i]);
        slack[k][i] = (lhs - id.log_ratio) / std::max(1.0, std::abs(id.log_ratio));
      }
    }, cfg.threads);
    if (base) {
      for (std::size_t i = 0; i < r; ++i) {
        identity_err = std::max(identity_err, err[i]);
        for (std::size_t k = 0; k < np; ++k) {
          ++dom_checked;
          dom_worst = std::max(dom_worst, slack[k][i]);
          if (slack[k][i] > 1e-10) ++dom_violations;
        }
      }
    }
    for (std::size_t k = 0; k < np; ++k) {
      const double p = cfg.p_values[k];
      std::vector<double> v(r);
      for (std::size_t i = 0; i < r; ++i) v[i] = p == 1.0 ? f[i] : std::pow(f[i], p);
      if (p == 1.0) f1_index.push_back(rep.estimates.size());
      by_p[k].push_back(rep.estimates.size());
      rep.estimates.push_back(make_grid("N=" + std::to_string(n) + ",p=" + num(p), {{"N", n}, {"p", p}},
                                        std::move(v), streams));
    }
  }
  rep.metadata["flows"] = flows;
  for (std::size_t k = 0; k < np; ++k) {
    std::vector<const GridEstimate*> g;
    for (auto idx : by_p[k]) g.push_back(&rep.estimates[idx]);
    const double p = cfg.p_values[k];
    if (p < kap * (1.0 - 1e-12))
      rep.flags.push_back(trend_flag("bounded_in_N[p=" + num(p) + "]", false, g, cfg.z_threshold));
    else
      rep.flags.push_back(trend_flag("increasing_trend[p=" + num(p) + "]", true, g, cfg.z_threshold));
  }
  if (exchangeable_directions(w) && !f1_index.empty()) {
    double worst = 0.0;
    ordered_json zs = ordered_json::array();
    for (auto idx : f1_index) {
      const double z = z_score(rep.estimates[idx].estimate, 1.0);
      zs.push_back(z);
      worst = std::max(worst, std::abs(z));
    }
    rep.flags.push_back({"mean_one", worst <= cfg.z_threshold, "|z(E[f_N], 1)| <= " + num(cfg.z_threshold),
                         {{"z", zs}}});
  }
  const bool have_flows = dom_checked > 0;
  rep.flags.push_back({"flow_identities", have_flows && identity_err <= cfg.identity_tol,
                       "three-way log identity within relative " + num(cfg.identity_tol),
                       {{"max_rel_error", identity_err}, {"checked", have_flows}}});
  rep.flags.push_back({"flow_domination", have_flows && dom_violations == 0,
                       "p log f_N <= log(omega-check^Theta-check / omega^Theta) in every environment",
                       {{"violations", dom_violations}, {"checked", dom_checked}, {"max_rel_slack", have_flows ? dom_worst : 0.0}}});
  rep.flags.push_back(kappa_order_flag(w));
  return rep;
}

ExperimentReport run_reversal_suite(const ExperimentConfig& cfg) {
  check_common(cfg);
  require(cfg.n_samples >= 2, "reversal: need at least 2 samples");
  std::optional<LatticeGraph> lattice;
  std::optional<GraphFile> file;
  const ArcGraphModel* m = nullptr;
  WeightSystem ws;
  EdgeId e0 = 0;
  if (cfg.graph.kind == GraphSpec::Kind::file) {
    file = read_graph_file(cfg.graph.file);
    m = &file->model;
    ws = file->weights;
    e0 = file->root_edge;
  } else {
    lattice = cfg.graph.kind == GraphSpec::Kind::torus
                  ? LatticeGraph::torus({cfg.graph.d, cfg.graph.n, cfg.graph.root_direction})
                  : LatticeGraph::box({cfg.graph.d, cfg.graph.n, cfg.graph.root_direction});
    m = &lattice->model();
    ws = lattice_weight_system(*lattice, cfg.weights.lattice(cfg.graph.d));
    e0 = lattice->root_edge();
  }
  validate_weights(*m, ws);
  double scale = 1.0;
  for (double a : ws.alpha) scale = std::max(scale, a);
  for (double v : div_vertex(m->graph, ws.alpha))
    if (std::abs(v) > 1e-12 * scale * static_cast<double>(m->edge_count()))
      throw PreconditionError("div(alpha) must vanish for the weak time reversal");

  ExperimentReport rep;
  rep.experiment = "reversal";
  rep.config = cfg.to_json();
  rep.metadata["edges"] = m->edge_count();
  rep.metadata["arcs"] = m->arc_count();
  rep.metadata["root_edge"] = e0;

  std::vector<Cycle> cycles;
  Engine eng(derive_seed(cfg.seed, 2));
  for (std::size_t c = 0; c < cfg.n_cycles; ++c) {
    const auto start = static_cast<EdgeId>(eng() % m->edge_count());
    cycles.push_back(random_cycle(m->arcs, start, cfg.cycle_steps, eng));
  }
  const auto wr = check_weak_reversal(*m, ws, cycles, cfg.n_samples, derive_seed(cfg.seed, 0), false, cfg.quad_tol,
                                      cfg.mode, cfg.threads);
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    const auto& cc = wr.cycles[c];
    ordered_json params{{"cycle", cycles[c]}, {"z", cc.z}};
    GridEstimate a{"cycle[" + std::to_string(c) + "]:reversed_environment", params, cc.reversed_env, {}, {}};
    GridEstimate b{"cycle[" + std::to_string(c) + "]:reversed_law", params, cc.reversed_law, {}, {}};
    rep.estimates.push_back(std::move(a));
    rep.estimates.push_back(std::move(b));
  }
  rep.flags.push_back({"weak_reversal", wr.max_abs_z <= cfg.reversal_z, "|z| <= " + num(cfg.reversal_z) + " for every cycle",
                       {{"max_abs_z", wr.max_abs_z}, {"cycles", cycles.size()}}});

  const auto rev = reverse(*m);
  const EnvironmentSampler sampler(*m, ws);
  const std::size_t r = cfg.n_environments;
  std::vector<double> res(r);
  std::vector<std::uint64_t> streams(r);
  for_each_replica(r, cfg.mode, [&](std::size_t i) {
    streams[i] = derive_seed(cfg.seed, 3, i);
    const auto env = sampler.sample(streams[i]);
    double worst = 0.0;
    for (const auto& h : hitting_prob_check(*m, rev, env, e0)) worst = std::max(worst, std::abs(h.lhs - h.rhs));
    res[i] = worst;
  }, cfg.threads);
  const double worst = *std::max_element(res.begin(), res.end());
  rep.estimates.push_back(make_grid("hitting_abs_residual", {{"root_edge", e0}}, std::move(res), std::move(streams)));
  rep.flags.push_back({"hitting_identity", worst <= cfg.identity_tol,
                       "|lhs - rhs| <= " + num(cfg.identity_tol) + " in every environment",
                       {{"max_abs_residual", worst}, {"environments", r}}});
  return rep;
}

ExperimentReport run_duality_sweep(const ExperimentConfig& cfg) {
  require(cfg.n_cases >= 1, "duality: need at least one case");
  require(cfg.quad_tol > 0.0, "quadrature tolerance must be positive");
  std::vector<HypergeomParams> cases;
  if (!cfg.weights.beta.empty()) {
    auto p = cfg.weights.phi_params();
    require(p.balanced(), "duality: needs sum(alpha) = sum(beta)");
    cases.push_back(std::move(p));
  }
  const std::size_t first_random = cases.size();
  for (std::size_t c = 0; c < cfg.n_cases; ++c) {
    Engine eng(derive_seed(cfg.seed, c));
    const auto n = static_cast<std::size_t>(1 + eng() % 3), l = static_cast<std::size_t>(1 + eng() % 3);
    auto draw = [&] { return 0.2 + 4.8 * uniform01(eng); };
    HypergeomParams p;
    for (;;) {
      p.alpha.resize(n);
      p.beta.resize(l);
      for (auto& a : p.alpha) a = draw();
      for (auto& b : p.beta) b = draw();
      double sa = 0.0, sb = 0.0;
      for (double a : p.alpha) sa += a;
      for (double b : p.beta) sb += b;
      for (auto& b : p.beta) b *= sa / sb;
      if (std::all_of(p.beta.begin(), p.beta.end(), [](double b) { return b >= 0.2 && b <= 5.0; })) break;
    }
    p.z.resize(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < p.z.rows(); ++i)
      for (Eigen::Index j = 0; j < p.z.cols(); ++j) p.z(i, j) = draw();
    cases.push_back(std::move(p));
  }

  const std::size_t nc = cases.size();
  std::vector<double> rel(nc), lhs(nc), rhs(nc);
  std::vector<std::uint64_t> streams(nc);
  for_each_replica(nc, cfg.mode, [&](std::size_t i) {
    streams[i] = i < first_random ? 0 : derive_seed(cfg.seed, i - first_random);
    const auto& p = cases[i];
    const auto q = p.dual();
    const double a = phi_quadrature(p, cfg.quad_tol).log_value - log_beta_multivariate(p.alpha);
    const double b = phi_quadrature(q, cfg.quad_tol).log_value - log_beta_multivariate(q.alpha);
    lhs[i] = a;
    rhs[i] = b;
    rel[i] = -std::expm1(-std::abs(a - b));
  }, cfg.threads);

  ExperimentReport rep;
  rep.experiment = "duality";
  rep.config = cfg.to_json();
  const auto worst = static_cast<std::size_t>(std::max_element(rel.begin(), rel.end()) - rel.begin());
  const auto& wp = cases[worst];
  rep.metadata["cases"] = nc;
  rep.metadata["max_rel_residual"] = rel[worst];
  rep.metadata["worst_case"] = {{"index", worst},
                                {"alpha", wp.alpha},
                                {"beta", wp.beta},
                                {"log_lhs", lhs[worst]},
                                {"log_rhs", rhs[worst]}};
  rep.notes.push_back("Residual is |B(alpha)^-1 Phi(alpha, beta, Z) - B(beta)^-1 Phi(beta, alpha, Z^t)| divided by "
                      "the larger side, both sides by quadrature.");
  rep.estimates.push_back(make_grid("relative_residual", {{"tol", cfg.quad_tol}}, std::move(rel), std::move(streams)));
  rep.flags.push_back({"duality", rep.metadata["max_rel_residual"].get<double>() < cfg.duality_tol,
                       "max relative residual < " + num(cfg.duality_tol),
                       {{"max_rel_residual", rep.metadata["max_rel_residual"]}}});
  return rep;
}

ExperimentReport run_trap_times(const ExperimentConfig& cfg) {
  check_common(cfg);
  const int d = cfg.graph.d;
  const auto w = cfg.weights.lattice(d);
  std::vector<int> dirs = cfg.directions;
  if (dirs.empty()) dirs.push_back(kappa_argmax(w));
  for (int i : dirs) require(i >= 0 && i < 2 * d, "trap-times: direction out of range");
  require(cfg.trap_cap >= 1, "trap-times: cap must be >= 1");
  const int n = std::max(cfg.graph.n, 3);
  const auto torus = LatticeGraph::torus({d, n, cfg.graph.root_direction});
  const auto& m = torus.model();
  const auto ws = lattice_weight_system(torus, w);
  const EnvironmentSampler sampler(m, ws);

  ExperimentReport rep;
  rep.experiment = "trap-times";
  rep.config = cfg.to_json();
  rep.metadata = kappa_metadata(w);
  rep.metadata["torus_side"] = n;
  rep.notes.push_back("T is the number of visits to the edge (0, e_i) before the walk started there leaves the "
                      "pair {(0, e_i), (e_i, 0)}; its annealed tail index is the weight of the edges leaving {0, e_i}.");

  const std::size_t r = cfg.n_environments;
  ordered_json per_dir = ordered_json::array();
  for (int dir : dirs) {
    const EdgeId e = torus.edge_from(torus.origin(), dir);
    const auto back = torus.opposite(e);
    std::vector<double> t(r), mean(r), var(r);
    std::vector<std::uint64_t> streams(r);
    for_each_replica(r, cfg.mode, [&](std::size_t i) {
      streams[i] = derive_seed(cfg.seed, static_cast<std::uint64_t>(dir), i);
      const auto env = sampler.sample(streams[i]);
      const auto law = trap_law(m, env, e, back);
      mean[i] = law.mean();
      var[i] = law.p_return / (law.q_leave * law.q_leave);
      Engine eng(derive_seed(streams[i], 1));
      t[i] = static_cast<double>(trap_time_sample(m, env, e, back, eng, cfg.trap_cap));
    }, cfg.threads);

    const double k_dir = kappa_direction(w, dir < d ? dir : dir - d);
    double zs = 0.0, vs = 0.0;
    std::size_t excluded = 0;
    for (std::size_t i = 0; i < r; ++i) {
      if (mean[i] * 100.0 > static_cast<double>(cfg.trap_cap)) {
        ++excluded;
        continue;
      }
      zs += t[i] - mean[i];
      vs += var[i];
    }
    const double z_geo = vs > 0.0 ? zs / std::sqrt(vs) : 0.0;
    ordered_json running = ordered_json::array();
    for (std::size_t den : {8u, 4u, 2u, 1u}) {
      const std::size_t k = std::max<std::size_t>(1, r / den);
      running.push_back({{"n", k}, {"mean", make_estimate(std::span<const double>(t.data(), k)).mean}});
    }
    const std::size_t half = r / 2;
    const auto h1 = make_estimate(std::span<const double>(t.data(), half));
    const auto h2 = make_estimate(std::span<const double>(t.data() + half, r - half));
    const double z_halves = z_score(h2, h1);
    const std::size_t k_hill = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(r))));
    const double hill = hill_tail_index(t, k_hill);
    const double hill_se = hill / std::sqrt(static_cast<double>(k_hill));

    const std::string tag = "[dir=" + std::to_string(dir) + "]";
    rep.estimates.push_back(make_grid("T" + tag, {{"direction", dir}}, t, streams));
    per_dir.push_back({{"direction", dir},
                       {"edge", e},
                       {"kappa_pair", k_dir},
                       {"hill_index", hill},
                       {"hill_k", k_hill},
                       {"hill_se", hill_se},
                       {"running_mean", running},
                       {"z_halves", z_halves},
                       {"z_geometric", z_geo},
                       {"excluded_from_geometric", excluded}});
    rep.flags.push_back({"geometric_law" + tag, std::abs(z_geo) <= cfg.reversal_z,
                         "sum (T - 1/q) / sqrt(sum p/q^2) within +-" + num(cfg.reversal_z),
                         {{"z", z_geo}, {"excluded", excluded}}});
    bool ok;
    std::string rule;
    if (k_dir > 1.0) {
      ok = hill + 2.0 * hill_se > 1.0 && (k_dir <= 2.0 || std::abs(z_halves) <= cfg.z_threshold);
      rule = "finite mean expected: Hill index + 2 se > 1, and stable halves when the pair weight exceeds 2";
    } else {
      ok = hill < 1.0 + 2.0 * hill_se;
      rule = "infinite mean expected: Hill index < 1 + 2 se";
    }
    rep.flags.push_back({"tail_consistent" + tag, ok, rule, {{"hill_index", hill}, {"kappa_pair", k_dir}}});
  }
  rep.metadata["directions"] = per_dir;
  rep.flags.push_back(kappa_order_flag(w));
  return rep;
}

}  // namespace hypwalk
