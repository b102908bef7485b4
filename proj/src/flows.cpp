#include "hypwalk/flows.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <ostream>

#include "hypwalk/error.hpp"
#include "hypwalk/maxflow.hpp"

namespace hypwalk {

double kappa_direction(const LatticeWeights& w, int i) {
  w.validate();
  require(i >= 0 && i < w.d, "kappa_direction: i must be a positive direction index");
  const auto du = static_cast<std::size_t>(w.d);
  std::vector<std::vector<int>> s{std::vector<int>(du, 0), std::vector<int>(du, 0)};
  s[1][static_cast<std::size_t>(i)] = 1;
  double total = 0.0;
  for (const auto& x : s) {
    for (int dir = 0; dir < 2 * w.d; ++dir) {
      auto y = x;
      y[static_cast<std::size_t>(dir % w.d)] += dir < w.d ? 1 : -1;
      if (std::find(s.begin(), s.end(), y) == s.end()) total += w.alpha[static_cast<std::size_t>(dir)];
    }
  }
  return total;
}

double kappa(const LatticeWeights& w) { return kappa_direction(w, kappa_argmax(w)); }

int kappa_argmax(const LatticeWeights& w) {
  int best = 0;
  double bv = kappa_direction(w, 0);
  for (int i = 1; i < w.d; ++i) {
    const double v = kappa_direction(w, i);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  return best;
}

double kappa_displayed(const LatticeWeights& w) {
  w.validate();
  double pos = 0.0;
  for (int j = 0; j < w.d; ++j) pos += w.alpha[static_cast<std::size_t>(j)];
  double best = -INFINITY;
  for (int i = 0; i < w.d; ++i)
    best = std::max(best, 2.0 * pos - (w.alpha[static_cast<std::size_t>(i)] - w.alpha[static_cast<std::size_t>(i + w.d)]));
  return best;
}

double kappa_tilde(const LatticeWeights& w) {
  w.validate();
  return *std::min_element(w.alpha.begin(), w.alpha.end());
}

std::vector<double> LatticeCapacities::on(const LatticeGraph& g) const {
  require(g.dimension() == d, "capacities dimension does not match the graph");
  require(per_direction.size() == static_cast<std::size_t>(2 * d), "capacities need 2d entries");
  std::vector<double> c(g.graph().edge_count(), 1.0);
  for (std::size_t e = 0; e < c.size(); ++e) {
    const int dir = g.direction(static_cast<EdgeId>(e));
    if (dir >= 0) c[e] = per_direction[static_cast<std::size_t>(dir)];
  }
  if (boost_direction >= 0) c[static_cast<std::size_t>(g.edge_from(g.origin(), boost_direction))] += boost;
  return c;
}

LatticeCapacities LatticeCapacities::uniform(int d, double c) {
  require(c > 0.0, "capacities must be positive");
  return {d, std::vector<double>(static_cast<std::size_t>(2 * d), c), -1, 0.0};
}

LatticeCapacities LatticeCapacities::from_alpha(const LatticeWeights& w) {
  w.validate();
  return {w.d, w.alpha, -1, 0.0};
}

LatticeCapacities alpha_boosted(const LatticeWeights& w, int direction) {
  w.validate();
  require(direction >= 0 && direction < 2 * w.d, "alpha_boosted: direction out of range");
  return {w.d, w.alpha, direction, kappa(w)};
}

MinCutResult min_cut_lattice(const LatticeCapacities& c, int n) {
  const auto box = LatticeGraph::box({c.d, n, 0});
  const auto cap = c.on(box);
  const auto r = max_flow_min_cut(box.graph(), cap, box.origin(), *box.boundary_vertex());
  MinCutResult out{r.value, 0.0, r.cut.size()};
  for (EdgeId e : box.graph().out_edges(box.origin())) out.single_vertex += cap[static_cast<std::size_t>(e)];
  return out;
}

namespace {

// Edge pairs {x -> x + e_i, x + e_i -> x} for i < d, indexed x * d + i.
struct Pairs {
  std::vector<EdgeId> fwd, bwd;
};

Pairs edge_pairs(const LatticeGraph& g) {
  const int d = g.dimension();
  Pairs p;
  for (std::size_t x = 0; x < g.lattice_vertex_count(); ++x) {
    for (int i = 0; i < d; ++i) {
      const EdgeId e = g.edge_from(static_cast<VertexId>(x), i);
      p.fwd.push_back(e);
      p.bwd.push_back(*g.opposite(e));
    }
  }
  return p;
}

struct SignedStep {
  std::size_t pair;
  double sign;
};

// Plaquettes in the (i, j) planes and one winding line per row, as signed pair sequences.
std::vector<std::vector<SignedStep>> descent_cycles(const LatticeGraph& g) {
  const int d = g.dimension(), n = g.size();
  const auto nv = g.lattice_vertex_count();
  const auto ud = static_cast<std::size_t>(d);
  auto shift = [&](VertexId v, int i) { return g.graph().head(g.edge_from(v, i)); };
  std::vector<std::vector<SignedStep>> cyc;
  for (std::size_t x = 0; x < nv; ++x) {
    const auto v = static_cast<VertexId>(x);
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const auto vi = static_cast<std::size_t>(shift(v, i)), vj = static_cast<std::size_t>(shift(v, j));
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        cyc.push_back({{x * ud + ui, 1.0}, {vi * ud + uj, 1.0}, {vj * ud + ui, -1.0}, {x * ud + uj, -1.0}});
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    for (std::size_t x = 0; x < nv; ++x) {
      if (g.coords(static_cast<VertexId>(x))[static_cast<std::size_t>(i)] != 0) continue;
      std::vector<SignedStep> loop;
      VertexId v = static_cast<VertexId>(x);
      for (int s = 0; s < n; ++s) {
        loop.push_back({static_cast<std::size_t>(v) * ud + static_cast<std::size_t>(i), 1.0});
        v = shift(v, i);
      }
      cyc.push_back(std::move(loop));
    }
  }
  return cyc;
}

}  // namespace

VertexFlow build_vertex_flow(const LatticeGraph& g, std::span<const double> cap, double m, int max_sweeps) {
  require(g.kind() == LatticeKind::torus, "build_vertex_flow: needs a torus");
  const std::size_t ne = g.graph().edge_count(), nv = g.lattice_vertex_count();
  require(cap.size() == ne, "build_vertex_flow: one capacity per edge required");
  require(m >= 0.0, "build_vertex_flow: strength must be nonnegative");
  for (double c : cap) require(c > 0.0 && std::isfinite(c), "build_vertex_flow: capacities must be positive");
  VertexFlow vf;
  vf.theta.assign(ne, 0.0);
  vf.strength = m;
  vf.source = g.origin();
  if (m == 0.0) return vf;

  const double demand = m / static_cast<double>(nv);
  std::vector<NetworkEdge> net;
  net.reserve(ne + nv);
  for (std::size_t e = 0; e < ne; ++e) {
    const auto& ed = g.graph().edge(static_cast<EdgeId>(e));
    net.push_back({ed.tail, ed.head, cap[e]});
  }
  const auto sink = static_cast<VertexId>(nv);
  for (std::size_t x = 0; x < nv; ++x)
    if (static_cast<VertexId>(x) != g.origin()) net.push_back({static_cast<VertexId>(x), sink, demand});
  const auto mf = max_flow(nv + 1, net, g.origin(), sink);
  const double need = demand * static_cast<double>(nv - 1);
  if (mf.value < need - 1e-9 * std::max(1.0, m))
    throw NumericalError("build_vertex_flow: transshipment infeasible (max flow " + std::to_string(mf.value) +
                         " < " + std::to_string(need) + ")");
  for (std::size_t e = 0; e < ne; ++e) vf.theta[e] = mf.flow[e];

  // Energy is minimised over net pair flows f = theta(fwd) - theta(bwd) with
  // -c(bwd) <= f <= c(fwd); the optimum puts |f| on one edge of each pair.
  const auto pairs = edge_pairs(g);
  const std::size_t np = pairs.fwd.size();
  std::vector<double> f(np), lo(np), hi(np);
  for (std::size_t p = 0; p < np; ++p) {
    const auto a = static_cast<std::size_t>(pairs.fwd[p]), b = static_cast<std::size_t>(pairs.bwd[p]);
    f[p] = vf.theta[a] - vf.theta[b];
    lo[p] = -cap[b];
    hi[p] = cap[a];
  }
  const auto cycles = descent_cycles(g);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double biggest = 0.0;
    for (const auto& c : cycles) {
      double sum = 0.0, smin = -INFINITY, smax = INFINITY;
      for (const auto& [p, sg] : c) {
        sum += sg * f[p];
        const double a = sg > 0 ? lo[p] - f[p] : f[p] - hi[p];
        const double b = sg > 0 ? hi[p] - f[p] : f[p] - lo[p];
        smin = std::max(smin, a);
        smax = std::min(smax, b);
      }
      const double step =
          std::clamp(-sum / static_cast<double>(c.size()), std::min(smin, 0.0), std::max(smax, 0.0));
      if (step == 0.0) continue;
      for (const auto& [p, sg] : c) f[p] = std::clamp(f[p] + sg * step, lo[p], hi[p]);
      biggest = std::max(biggest, std::abs(step));
    }
    vf.sweeps = sweep + 1;
    if (biggest <= 1e-12 * m) break;
  }
  auto& th = vf.theta;
  for (std::size_t p = 0; p < np; ++p) {
    th[static_cast<std::size_t>(pairs.fwd[p])] = std::max(f[p], 0.0);
    th[static_cast<std::size_t>(pairs.bwd[p])] = std::max(-f[p], 0.0);
  }
  // Clamping only acts at rounding level; the divergence must survive it.
  const auto div = div_vertex(g.graph(), th);
  for (std::size_t x = 0; x < nv; ++x) {
    const double want = (static_cast<VertexId>(x) == g.origin() ? m : 0.0) - demand;
    if (std::abs(div[x] - want) > 1e-9 * std::max(1.0, m))
      throw NumericalError("build_vertex_flow: divergence drifted during descent");
  }
  vf.energy = 0.0;
  for (double v : th) vf.energy += v * v;
  return vf;
}

ArcFlow lift_to_arc_flow(const LatticeGraph& g, const VertexFlow& vf, EdgeId e0) {
  require(g.kind() == LatticeKind::torus, "lift_to_arc_flow: needs a torus");
  const auto& gr = g.graph();
  const auto& h = g.arcs();
  require(vf.theta.size() == gr.edge_count(), "lift_to_arc_flow: theta does not match the torus");
  require(e0 >= 0 && static_cast<std::size_t>(e0) < gr.edge_count(), "lift_to_arc_flow: e0 out of range");
  require(gr.head(e0) == vf.source, "lift_to_arc_flow: e0 must enter the source vertex");
  const double m = vf.strength;
  const double ne = static_cast<double>(gr.edge_count());
  const double nv = static_cast<double>(g.lattice_vertex_count());
  std::vector<double> out_sum(gr.vertex_count(), 0.0);
  for (std::size_t e = 0; e < vf.theta.size(); ++e) out_sum[static_cast<std::size_t>(gr.tail(static_cast<EdgeId>(e)))] += vf.theta[e];
  for (double s : out_sum)
    if (!(s + m / nv > 0.0)) throw PreconditionError("lift_to_arc_flow: zero denominator (theta = 0 with m = 0)");
  ArcFlow af;
  af.theta.resize(h.arc_count());
  af.strength = m / ne;
  af.source = e0;
  for (std::size_t k = 0; k < h.arc_count(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    const double first = vf.theta[static_cast<std::size_t>(a.from)] + (a.from == e0 ? m : 0.0);
    const double second = vf.theta[static_cast<std::size_t>(a.to)] + m / ne;
    af.theta[k] = first * second / (out_sum[static_cast<std::size_t>(gr.head(a.from))] + m / nv);
  }
  return af;
}

ArcFlow scaled(const ArcFlow& f, double factor) {
  require(factor >= 0.0, "scaled: factor must be nonnegative");
  ArcFlow out = f;
  for (auto& v : out.theta) v *= factor;
  out.strength *= factor;
  return out;
}

FlowIdentity flow_identity_check(const ArcGraphModel& m, const ReversedModel& r, const Environment& env,
                                 const StationaryLaw& pi, std::span<const double> theta,
                                 std::optional<std::pair<EdgeId, double>> total) {
  require(theta.size() == m.arc_count(), "flow_identity_check: Theta must be defined on every arc");
  const auto check = reverse_environment(m, r, env, pi);
  FlowIdentity out;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (theta[k] == 0.0) continue;
    out.log_ratio += theta[k] * (std::log(check.omega[static_cast<std::size_t>(r.arc_map[k])]) - std::log(env.omega[k]));
  }
  const auto div = div_arc(m.arcs, theta);
  for (std::size_t e = 0; e < div.size(); ++e)
    if (div[e] != 0.0) out.log_pi_div += div[e] * std::log(pi.pi[e]);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); };
  out.max_rel_error = rel(out.log_ratio, out.log_pi_div);
  if (total) {
    const auto [e0, gamma] = *total;
    const double l0 = std::log(pi.pi[static_cast<std::size_t>(e0)]);
    double s = 0.0;
    for (double p : pi.pi) s += l0 - std::log(p);
    out.log_total = gamma * s;
    out.max_rel_error = std::max({out.max_rel_error, rel(out.log_ratio, *out.log_total), rel(out.log_pi_div, *out.log_total)});
  }
  return out;
}

void write_vertex_flow(std::ostream& os, const LatticeGraph& g, const VertexFlow& f, const std::string& provenance_json) {
  nlohmann::ordered_json j;
  j["format"] = "hypwalk-vertex-flow";
  j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
  j["strength"] = f.strength;
  j["source"] = f.source;
  j["energy"] = f.energy;
  auto& rows = j["edges"] = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < f.theta.size(); ++e) {
    const auto& ed = g.graph().edge(static_cast<EdgeId>(e));
    rows.push_back({{"edge", e}, {"tail", ed.tail}, {"head", ed.head}, {"value", f.theta[e]}});
  }
  os << j.dump(1) << '\n';
}

void write_arc_flow(std::ostream& os, const LatticeGraph& g, const ArcFlow& f, const std::string& provenance_json) {
  nlohmann::ordered_json j;
  j["format"] = "hypwalk-arc-flow";
  j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
  j["strength"] = f.strength;
  j["source_edge"] = f.source;
  auto& rows = j["arcs"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < f.theta.size(); ++k) {
    const auto& a = g.arcs().arc(static_cast<ArcId>(k));
    rows.push_back({{"arc", k}, {"from", a.from}, {"to", a.to}, {"value", f.theta[k]}});
  }
  os << j.dump(1) << '\n';
}

}  // namespace hypwalk
