#include "hypwalk/chain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "hypwalk/error.hpp"
#include "hypwalk/hypergeom.hpp"
#include "hypwalk/linsolve.hpp"

namespace hypwalk {

namespace {

std::vector<double> gth(const ArcGraphModel& m, std::span<const double> omega) {
  const std::size_t n = m.edge_count();
  const auto& h = m.arcs;
  std::vector<double> p(n * n, 0.0);
  for (std::size_t k = 0; k < h.arc_count(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    p[static_cast<std::size_t>(a.from) * n + static_cast<std::size_t>(a.to)] += omega[k];
  }
  std::vector<double> s(n, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) {
    double sk = 0.0;
    for (std::size_t j = 0; j < k; ++j) sk += p[k * n + j];
    if (!(sk > 0.0)) throw NumericalError("stationary: chain is not irreducible");
    s[k] = sk;
    for (std::size_t i = 0; i < k; ++i) {
      const double f = p[i * n + k] / sk;
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) p[i * n + j] += f * p[k * n + j];
    }
  }
  std::vector<double> pi(n, 0.0);
  pi[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    double v = 0.0;
    for (std::size_t i = 0; i < k; ++i) v += pi[i] * p[i * n + k];
    pi[k] = v / s[k];
    total += pi[k];
  }
  for (auto& v : pi) v /= total;
  return pi;
}

std::vector<double> lu_stationary(const ArcGraphModel& m, std::span<const double> omega) {
  const auto n = static_cast<Eigen::Index>(m.edge_count());
  const auto& h = m.arcs;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(h.arc_count() + 2 * static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < h.arc_count(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    if (a.to != n - 1) t.emplace_back(a.to, a.from, omega[k]);
  }
  for (Eigen::Index e = 0; e < n - 1; ++e) t.emplace_back(e, e, -1.0);
  for (Eigen::Index e = 0; e < n; ++e) t.emplace_back(n - 1, e, 1.0);
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  LinearSolver solver(a);
  Eigen::VectorXd x = solver.solve(b);
  return {x.data(), x.data() + n};
}

std::vector<double> power_stationary(const ArcGraphModel& m, std::span<const double> omega) {
  const std::size_t n = m.edge_count();
  const auto& h = m.arcs;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n)), next(n);
  for (int it = 0; it < 1000000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k < h.arc_count(); ++k) {
      const auto& a = h.arc(static_cast<ArcId>(k));
      next[static_cast<std::size_t>(a.to)] += pi[static_cast<std::size_t>(a.from)] * omega[k];
    }
    double diff = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      const double v = 0.5 * (pi[e] + next[e]);
      diff = std::max(diff, std::abs(next[e] - pi[e]));
      pi[e] = v;
    }
    if (diff <= 1e-14) break;
  }
  return pi;
}

// Start at e0, absorb on the first return; column a collects returns through
// in-arc a of e0. State reduction without subtractions as in gth().
std::vector<double> last_exit_gth(const ArcGraphModel& m, std::span<const double> omega, EdgeId e0) {
  const std::size_t n = m.edge_count();
  const auto& h = m.arcs;
  const auto in = h.in_arcs(e0);
  const std::size_t na = in.size();
  const auto s0 = static_cast<std::size_t>(e0);
  std::vector<double> p(n * n, 0.0), b(n * na, 0.0);
  for (std::size_t k = 0; k < h.arc_count(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    const auto from = static_cast<std::size_t>(a.from);
    if (a.to == e0) {
      const auto at = static_cast<std::size_t>(std::find(in.begin(), in.end(), static_cast<ArcId>(k)) - in.begin());
      b[from * na + at] += omega[k];
    } else {
      p[from * n + static_cast<std::size_t>(a.to)] += omega[k];
    }
  }
  std::vector<char> gone(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == s0) continue;
    double sk = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != k && !gone[j]) sk += p[k * n + j];
    for (std::size_t a = 0; a < na; ++a) sk += b[k * na + a];
    if (!(sk > 0.0)) throw NumericalError("hitting_prob_check: e0 is not reachable");
    gone[k] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (gone[i] || p[i * n + k] == 0.0) continue;
      const double f = p[i * n + k] / sk;
      p[i * n + k] = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (!gone[j] && j != i) p[i * n + j] += f * p[k * n + j];
      for (std::size_t a = 0; a < na; ++a) b[i * na + a] += f * b[k * na + a];
    }
  }
  std::vector<double> out(b.begin() + static_cast<std::ptrdiff_t>(s0 * na),
                          b.begin() + static_cast<std::ptrdiff_t>((s0 + 1) * na));
  double total = 0.0;
  for (double v : out) total += v;
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

double stationarity_residual(const ArcGraphModel& m, std::span<const double> omega, std::span<const double> pi) {
  const auto& h = m.arcs;
  std::vector<double> y(m.edge_count(), 0.0);
  for (std::size_t k = 0; k < h.arc_count(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    y[static_cast<std::size_t>(a.to)] += pi[static_cast<std::size_t>(a.from)] * omega[k];
  }
  double r = 0.0;
  for (std::size_t e = 0; e < y.size(); ++e) r = std::max(r, std::abs(y[e] - pi[e]));
  return r;
}

StationaryLaw stationary(const ArcGraphModel& m, const Environment& env) {
  require(env.omega.size() == m.arc_count(), "stationary: environment does not match the model");
  StationaryLaw law;
  if (m.edge_count() <= kGthLimit)
    law.pi = gth(m, env.omega);
  else if (m.arc_count() <= kPowerLimit)
    law.pi = lu_stationary(m, env.omega);
  else
    law.pi = power_stationary(m, env.omega);
  double total = 0.0;
  for (double v : law.pi) {
    if (!(v > 0.0)) throw NumericalError("stationary: nonpositive stationary mass");
    total += v;
  }
  for (auto& v : law.pi) v /= total;
  law.residual = stationarity_residual(m, env.omega, law.pi);
  if (law.residual > 1e-12)
    throw NumericalError("stationary: residual " + std::to_string(law.residual) + " exceeds 1e-12");
  return law;
}

Environment reverse_environment(const ArcGraphModel& m, const ReversedModel& r, const Environment& env,
                                const StationaryLaw& pi) {
  require(env.omega.size() == m.arc_count() && r.arc_map.size() == m.arc_count(),
          "reverse_environment: environment does not match the model");
  require(pi.pi.size() == m.edge_count(), "reverse_environment: stationary law does not match the model");
  Environment out{{}, std::vector<double>(m.arc_count())};
  for (std::size_t k = 0; k < m.arc_count(); ++k) {
    const auto& a = m.arcs.arc(static_cast<ArcId>(k));
    out.omega[static_cast<std::size_t>(r.arc_map[k])] =
        pi.pi[static_cast<std::size_t>(a.from)] * env.omega[k] / pi.pi[static_cast<std::size_t>(a.to)];
  }
  return out;
}

std::vector<ArcId> cycle_arcs(const ArcGraph& h, const Cycle& c) {
  require(c.size() >= 2, "cycle needs at least one arc");
  require(c.front() == c.back(), "cycle must be closed (first edge = last edge)");
  std::vector<ArcId> out;
  out.reserve(c.size() - 1);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    auto k = h.find(c[i], c[i + 1]);
    if (!k) throw PreconditionError("cycle step is not an arc: " + std::to_string(c[i]) + " -> " + std::to_string(c[i + 1]));
    out.push_back(*k);
  }
  return out;
}

Cycle reversed_cycle(const Cycle& c) { return Cycle(c.rbegin(), c.rend()); }

Cycle random_cycle(const ArcGraph& h, EdgeId start, std::size_t steps, Engine& eng) {
  require(start >= 0 && static_cast<std::size_t>(start) < h.node_count(), "random_cycle: start out of range");
  Cycle c{start};
  EdgeId e = start;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto deg = static_cast<std::uint64_t>(h.out_end(e) - h.out_begin(e));
    e = h.arc(h.out_begin(e) + static_cast<ArcId>(eng() % deg)).to;
    c.push_back(e);
  }
  if (steps > 0 && e == start) return c;
  std::vector<EdgeId> prev(h.node_count(), -1);
  std::deque<EdgeId> queue{e};
  prev[static_cast<std::size_t>(e)] = e;
  bool found = false;
  while (!queue.empty() && !found) {
    const EdgeId f = queue.front();
    queue.pop_front();
    for (ArcId k = h.out_begin(f); k < h.out_end(f); ++k) {
      const EdgeId g = h.arc(k).to;
      if (g == start) {
        std::vector<EdgeId> tail{start};
        for (EdgeId x = f; x != e; x = prev[static_cast<std::size_t>(x)]) tail.push_back(x);
        c.insert(c.end(), tail.rbegin(), tail.rend());
        found = true;
        break;
      }
      if (prev[static_cast<std::size_t>(g)] < 0) {
        prev[static_cast<std::size_t>(g)] = f;
        queue.push_back(g);
      }
    }
  }
  if (!found) throw PreconditionError("random_cycle: start is not reachable (arc graph not strongly connected)");
  return c;
}

double log_cycle_weight(const ArcGraph& h, std::span<const double> omega, const Cycle& c) {
  require(omega.size() == h.arc_count(), "cycle_weight: omega does not match the arc graph");
  double s = 0.0;
  for (ArcId k : cycle_arcs(h, c)) s += std::log(omega[static_cast<std::size_t>(k)]);
  return s;
}

double cycle_weight(const ArcGraph& h, std::span<const double> omega, const Cycle& c) {
  return std::exp(log_cycle_weight(h, omega, c));
}

std::vector<double> cycle_arc_counts(const ArcGraph& h, std::span<const Cycle> cycles) {
  std::vector<double> xi(h.arc_count(), 0.0);
  for (const auto& c : cycles)
    for (ArcId k : cycle_arcs(h, c)) xi[static_cast<std::size_t>(k)] += 1.0;
  return xi;
}

double log_cycle_moment_exact(const ArcGraphModel& m, const WeightSystem& ws, std::span<const Cycle> cycles,
                              double tol) {
  validate_weights(m, ws);
  if (cycles.empty()) return 0.0;
  return log_moment_exact(m, ws, cycle_arc_counts(m.arcs, cycles), tol);
}

WeakReversalReport check_weak_reversal(const ArcGraphModel& m, const WeightSystem& ws, std::span<const Cycle> cycles,
                                       std::size_t n_samples, std::uint64_t seed, bool with_exact, double tol,
                                       ExecutionMode mode, int threads) {
  validate_weights(m, ws);
  require(n_samples >= 2, "check_weak_reversal: need at least 2 samples");
  const auto div = div_vertex(m.graph, ws.alpha);
  double scale = 1.0;
  for (double a : ws.alpha) scale = std::max(scale, a);
  for (double v : div)
    if (std::abs(v) > 1e-12 * scale * static_cast<double>(m.edge_count()))
      throw PreconditionError("div(alpha) must vanish for the weak time reversal");
  const auto rev = reverse(m);
  const auto ws_rev = reverse_weights(rev, ws);
  const EnvironmentSampler fwd(m, ws), bwd(rev.model, ws_rev);
  std::vector<std::vector<ArcId>> rev_arcs;
  for (const auto& c : cycles) {
    cycle_arcs(m.arcs, c);
    rev_arcs.push_back(cycle_arcs(rev.model.arcs, reversed_cycle(c)));
  }
  const std::size_t nc = cycles.size();
  std::vector<std::vector<double>> a(nc, std::vector<double>(n_samples)), b(nc, std::vector<double>(n_samples));
  for_each_replica(n_samples, mode, [&](std::size_t i) {
    const auto env = fwd.sample(derive_seed(seed, 0, i));
    const auto check = reverse_environment(m, rev, env, stationary(m, env));
    const auto env_r = bwd.sample(derive_seed(seed, 1, i));
    for (std::size_t c = 0; c < nc; ++c) {
      double la = 0.0, lb = 0.0;
      for (ArcId k : rev_arcs[c]) {
        la += std::log(check.omega[static_cast<std::size_t>(k)]);
        lb += std::log(env_r.omega[static_cast<std::size_t>(k)]);
      }
      a[c][i] = std::exp(la);
      b[c][i] = std::exp(lb);
    }
  }, threads);
  WeakReversalReport rep;
  for (std::size_t c = 0; c < nc; ++c) {
    CycleComparison cc{make_estimate(a[c]), make_estimate(b[c]), 0.0, std::nullopt};
    cc.z = z_score(cc.reversed_env, cc.reversed_law);
    if (with_exact) {
      try {
        cc.exact = std::exp(log_cycle_moment_exact(m, ws, std::span<const Cycle>(&cycles[c], 1), tol));
      } catch (const PreconditionError&) {
        cc.exact = std::nullopt;
      }
    }
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(cc.z));
    rep.cycles.push_back(cc);
  }
  return rep;
}

std::vector<HittingCheck> hitting_prob_check(const ArcGraphModel& m, const ReversedModel& r, const Environment& env,
                                             EdgeId e0) {
  const auto& h = m.arcs;
  const auto n = m.edge_count();
  require(e0 >= 0 && static_cast<std::size_t>(e0) < n, "hitting_prob_check: e0 out of range");
  require(env.omega.size() == h.arc_count(), "hitting_prob_check: environment does not match the model");
  const auto check = reverse_environment(m, r, env, stationary(m, env));
  std::vector<HittingCheck> out;
  if (n <= kGthLimit) {
    const auto in = h.in_arcs(e0);
    const auto lhs = last_exit_gth(m, env.omega, e0);
    for (std::size_t a = 0; a < in.size(); ++a)
      out.push_back({h.arc(in[a]).from, lhs[a],
                     check.omega[static_cast<std::size_t>(r.arc_map[static_cast<std::size_t>(in[a])])]});
    return out;
  }

  std::vector<Eigen::Index> idx(n, -1);
  Eigen::Index cnt = 0;
  for (std::size_t f = 0; f < n; ++f)
    if (static_cast<EdgeId>(f) != e0) idx[f] = cnt++;
  std::optional<LinearSolver> solver;
  SparseMatrix a(cnt, cnt);
  if (cnt > 0) {
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t f = 0; f < n; ++f) {
      if (idx[f] < 0) continue;
      t.emplace_back(idx[f], idx[f], 1.0);
      for (ArcId k = h.out_begin(static_cast<EdgeId>(f)); k < h.out_end(static_cast<EdgeId>(f)); ++k) {
        const auto to = static_cast<std::size_t>(h.arc(k).to);
        if (idx[to] >= 0) t.emplace_back(idx[f], idx[to], -env.omega[static_cast<std::size_t>(k)]);
      }
    }
    a.setFromTriplets(t.begin(), t.end());
    solver.emplace(a);
  }
  for (ArcId k : h.in_arcs(e0)) {
    const EdgeId e = h.arc(k).from;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(cnt);
    if (e != e0) {
      Eigen::VectorXd b = Eigen::VectorXd::Zero(cnt);
      b(idx[static_cast<std::size_t>(e)]) = env.omega[static_cast<std::size_t>(k)];
      g = solver->solve(b);
    }
    double lhs = 0.0;
    for (ArcId j = h.out_begin(e0); j < h.out_end(e0); ++j) {
      const EdgeId to = h.arc(j).to;
      const double w = env.omega[static_cast<std::size_t>(j)];
      lhs += to == e0 ? (e == e0 ? w : 0.0) : w * g(idx[static_cast<std::size_t>(to)]);
    }
    out.push_back({e, lhs, check.omega[static_cast<std::size_t>(r.arc_map[static_cast<std::size_t>(k)])]});
  }
  return out;
}

GreenResult green_function_killed(const ArcGraphModel& m, const Environment& env, EdgeId e0, EdgeId kill) {
  const auto& h = m.arcs;
  const auto n = m.edge_count();
  require(e0 >= 0 && static_cast<std::size_t>(e0) < n && kill >= 0 && static_cast<std::size_t>(kill) < n,
          "green_function_killed: edge out of range");
  require(e0 != kill, "green_function_killed: e0 must differ from the killing edge");
  require(env.omega.size() == h.arc_count(), "green_function_killed: environment does not match the model");

  auto build = [&](bool e0_absorbing, std::vector<Eigen::Index>& idx) {
    idx.assign(n, -1);
    Eigen::Index cnt = 0;
    for (std::size_t f = 0; f < n; ++f) {
      const auto fe = static_cast<EdgeId>(f);
      if (fe == kill || (e0_absorbing && fe == e0)) continue;
      idx[f] = cnt++;
    }
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(h.arc_count() + static_cast<std::size_t>(cnt));
    for (std::size_t f = 0; f < n; ++f) {
      if (idx[f] < 0) continue;
      t.emplace_back(idx[f], idx[f], 1.0);
      for (ArcId k = h.out_begin(static_cast<EdgeId>(f)); k < h.out_end(static_cast<EdgeId>(f)); ++k) {
        const auto to = static_cast<std::size_t>(h.arc(k).to);
        if (idx[to] >= 0) t.emplace_back(idx[f], idx[to], -env.omega[static_cast<std::size_t>(k)]);
      }
    }
    SparseMatrix a(cnt, cnt);
    a.setFromTriplets(t.begin(), t.end());
    return a;
  };

  GreenResult res;
  {
    std::vector<Eigen::Index> idx;
    const SparseMatrix a = build(false, idx);
    LinearSolver solver(a);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
    b(idx[static_cast<std::size_t>(e0)]) = 1.0;
    res.green = solver.solve(b)(idx[static_cast<std::size_t>(e0)]);
  }
  {
    std::vector<Eigen::Index> idx;
    const SparseMatrix a = build(true, idx);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
    for (std::size_t f = 0; f < n; ++f) {
      if (idx[f] < 0) continue;
      for (ArcId k = h.out_begin(static_cast<EdgeId>(f)); k < h.out_end(static_cast<EdgeId>(f)); ++k)
        if (h.arc(k).to == kill) b(idx[f]) += env.omega[static_cast<std::size_t>(k)];
    }
    Eigen::VectorXd hv = Eigen::VectorXd::Zero(a.rows());
    if (a.rows() > 0) {
      LinearSolver solver(a);
      hv = solver.solve(b);
    }
    double esc = 0.0;
    for (ArcId k = h.out_begin(e0); k < h.out_end(e0); ++k) {
      const EdgeId to = h.arc(k).to;
      const double w = env.omega[static_cast<std::size_t>(k)];
      if (to == kill)
        esc += w;
      else if (to != e0)
        esc += w * hv(idx[static_cast<std::size_t>(to)]);
    }
    res.escape = esc;
  }
  return res;
}

TrapLaw trap_law(const ArcGraphModel& m, const Environment& env, EdgeId e, std::optional<EdgeId> rev) {
  const auto& h = m.arcs;
  if (!rev) return {};
  const auto k1 = h.find(e, *rev);
  const auto k2 = h.find(*rev, e);
  if (!k1 || !k2) return {};
  auto others = [&](EdgeId from, ArcId skip) {
    double s = 0.0;
    for (ArcId k = h.out_begin(from); k < h.out_end(from); ++k)
      if (k != skip) s += env.omega[static_cast<std::size_t>(k)];
    return s;
  };
  const double w1 = env.omega[static_cast<std::size_t>(*k1)], w2 = env.omega[static_cast<std::size_t>(*k2)];
  const double eps1 = others(e, *k1), eps2 = others(*rev, *k2);
  return {w1 * w2, eps1 + eps2 - eps1 * eps2};
}

std::uint64_t trap_time_sample(const ArcGraphModel& m, const Environment& env, EdgeId e, std::optional<EdgeId> rev,
                               Engine& eng, std::uint64_t cap) {
  const auto& h = m.arcs;
  auto step = [&](EdgeId from) {
    const double u = uniform01(eng);
    double acc = 0.0;
    const ArcId last = h.out_end(from) - 1;
    for (ArcId k = h.out_begin(from); k < last; ++k) {
      acc += env.omega[static_cast<std::size_t>(k)];
      if (u < acc) return h.arc(k).to;
    }
    return h.arc(last).to;
  };
  std::uint64_t visits = 1;
  while (visits < cap) {
    if (!rev || step(e) != *rev) return visits;
    if (step(*rev) != e) return visits;
    ++visits;
  }
  return cap;
}

}  // namespace hypwalk
