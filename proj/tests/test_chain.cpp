#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hypwalk/chain.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/experiments.hpp"
#include "hypwalk/lattice.hpp"
#include "oracles.hpp"

using namespace hypwalk;

namespace {

Eigen::MatrixXd dense(const ArcGraphModel& m, const std::vector<double>& omega) {
  const auto n = static_cast<Eigen::Index>(m.edge_count());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < m.arc_count(); ++k) p(m.arcs.arcs()[k].from, m.arcs.arcs()[k].to) += omega[k];
  return p;
}

// P_{e0}[last edge before returning to e0 is e] for every e, by first-step
// analysis on the dense matrix with e0 made absorbing.
std::vector<double> last_exit_dense(const Eigen::MatrixXd& p, int e0) {
  const auto n = p.rows();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  Eigen::MatrixXd q = p;
  q.col(e0).setZero();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - q;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  for (Eigen::Index e = 0; e < n; ++e) {
    if (p(e, e0) == 0.0) continue;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(e) = p(e, e0);
    const Eigen::VectorXd h = lu.solve(b);  // h(f) = P_f[enter e0 first from e]
    double v = e == e0 ? p(e0, e0) : 0.0;
    for (Eigen::Index g = 0; g < n; ++g)
      if (g != e0) v += p(e0, g) * h(g);
    out[static_cast<std::size_t>(e)] = v;
  }
  return out;
}

// Self-loops a, b at one vertex, omega(a, b) = p, omega(b, a) = q.
struct TwoState {
  ArcGraphModel m{DirectedGraph(1, {{0, 0}, {0, 0}})};
  Environment env;
  TwoState(double p, double q) { env.omega = {1 - p, p, q, 1 - q}; }
};

}  // namespace

TEST_SUITE("chain") {
  TEST_CASE("two-state chain has pi = (q, p) / (p + q)") {
    TwoState t(0.3, 0.05);
    const auto law = stationary(t.m, t.env);
    CHECK(law.pi[0] == doctest::Approx(0.05 / 0.35).epsilon(1e-14));
    CHECK(law.pi[1] == doctest::Approx(0.3 / 0.35).epsilon(1e-14));
    CHECK(law.residual <= 1e-15);
  }

  TEST_CASE("stationary law matches a dense oracle on GTH and sparse LU sizes") {
    for (int n : {3, 5}) {
      const auto t = LatticeGraph::torus({3, n, 0});
      const auto ws = fixture::random_weights(t.model(), 7 + static_cast<std::uint64_t>(n), 0.3, 2.0);
      const auto env = sample_environment(t.model(), ws, 1);
      const auto law = stationary(t.model(), env);
      const auto ref = oracle::dense_stationary(dense(t.model(), env.omega));
      double worst = 0.0;
      for (std::size_t e = 0; e < law.pi.size(); ++e)
        worst = std::max(worst, std::abs(law.pi[e] - ref(static_cast<Eigen::Index>(e))) / ref(static_cast<Eigen::Index>(e)));
      CHECK(worst < 1e-9);
      CHECK(stationarity_residual(t.model(), env.omega, law.pi) < 1e-13);
    }
  }

  TEST_CASE("GTH stays entrywise accurate for alpha = 0.1") {
    const auto t = LatticeGraph::torus({2, 4, 0});
    const auto ws = fixture::constant_weights(t.model(), 0.1, 1.0);
    const auto env = sample_environment(t.model(), ws, 3);
    const auto law = stationary(t.model(), env);
    double lo = 1.0;
    for (double v : law.pi) lo = std::min(lo, v);
    CHECK(lo > 0.0);
    // pi^T omega = pi^T entrywise in relative terms
    std::vector<double> next(law.pi.size(), 0.0);
    for (std::size_t k = 0; k < env.omega.size(); ++k)
      next[static_cast<std::size_t>(t.arcs().arcs()[k].to)] += law.pi[static_cast<std::size_t>(t.arcs().arcs()[k].from)] * env.omega[k];
    for (std::size_t e = 0; e < next.size(); ++e) CHECK(next[e] == doctest::Approx(law.pi[e]).epsilon(1e-11));
  }

  TEST_CASE("reversed environment is stochastic, shares pi, and reverses back") {
    const auto m = fixture::four_vertex();
    const auto ws = fixture::random_weights(m, 4);
    const auto env = sample_environment(m, ws, 5);
    const auto r = reverse(m);
    const auto law = stationary(m, env);
    const auto rev = reverse_environment(m, r, env, law);
    CHECK_NOTHROW(check_environment(r.model, {{}, rev.omega}));
    CHECK(stationarity_residual(r.model, rev.omega, law.pi) < 1e-14);
    const auto rr = reverse(r.model);
    const auto back = reverse_environment(r.model, rr, rev, law);
    for (std::size_t k = 0; k < env.omega.size(); ++k) CHECK(back.omega[k] == doctest::Approx(env.omega[k]).epsilon(1e-13));
  }

  TEST_CASE("cycle weights are invariant under quenched reversal") {
    const auto t = LatticeGraph::torus({2, 3, 0});
    const auto ws = fixture::random_weights(t.model(), 8);
    const auto env = sample_environment(t.model(), ws, 2);
    const auto r = reverse(t.model());
    const auto rev = reverse_environment(t.model(), r, env, stationary(t.model(), env));
    Engine eng(3);
    for (int rep = 0; rep < 20; ++rep) {
      const auto c = random_cycle(t.arcs(), static_cast<EdgeId>(rep), 7, eng);
      CHECK(c.front() == c.back());
      CHECK(cycle_arcs(t.arcs(), c).size() == c.size() - 1);
      CHECK(log_cycle_weight(r.model.arcs, rev.omega, reversed_cycle(c)) ==
            doctest::Approx(log_cycle_weight(t.arcs(), env.omega, c)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(cycle_arcs(t.arcs(), {0, 1, 0}), PreconditionError);
  }

  TEST_CASE("Dirichlet cycle moment is a ratio of multivariate Betas") {
    const auto m = fixture::two_vertex();
    auto ws = fixture::constant_weights(m, 1.0, 1.0);
    ws.alpha = {0.7, 1.4, 2.0, 0.5};
    const std::vector<Cycle> cs{{0, 2, 1, 2, 0}, {3, 0, 3}};
    // arcs entering 0: 2, entering 1: 1, entering 2: 2, entering 3: 1
    const double expect = oracle::log_beta({0.7 + 2, 1.4 + 1}) - oracle::log_beta({0.7, 1.4}) +
                          oracle::log_beta({2.0 + 2, 0.5 + 1}) - oracle::log_beta({2.0, 0.5});
    CHECK(log_cycle_moment_exact(m, ws, cs, 1e-10) == doctest::Approx(expect).epsilon(1e-12));
  }

  TEST_CASE("cycle moment formula matches Monte Carlo on the 2-vertex graph") {
    const auto m = fixture::two_vertex();
    const auto ws = fixture::random_weights(m, 31, 0.8, 2.0, 0.3, 3.0);
    const std::vector<Cycle> cs{{0, 3, 1, 2, 0}, {2, 1, 3, 0, 2}};
    const auto counts = cycle_arc_counts(m.arcs, cs);
    const auto mc = moments_mc(m, ws, counts, 50000, 6);
    const double exact = std::exp(log_cycle_moment_exact(m, ws, cs, 1e-10));
    CHECK(std::abs(mc.mean - exact) < 3.0 * mc.std_error);
  }

  TEST_CASE("hitting identity on a hand-solvable 2-vertex multigraph") {
    const auto m = fixture::two_vertex();
    Environment env;
    // arcs: 0->2, 0->3, 1->2, 1->3, 2->0, 2->1, 3->0, 3->1
    env.omega = {0.3, 0.7, 0.6, 0.4, 0.2, 0.8, 0.9, 0.1};
    const auto r = reverse(m);
    for (const auto& c : hitting_prob_check(m, r, env, 0)) CHECK(c.lhs == doctest::Approx(c.rhs).epsilon(1e-12));
    // from 0: to 2 (0.3) then back to 0 directly (0.2), or to 3 (0.7) and back (0.9); otherwise via 1
    const auto checks = hitting_prob_check(m, r, env, 0);
    REQUIRE(checks.size() == 2);
    const auto dense_ref = last_exit_dense(dense(m, env.omega), 0);
    for (const auto& c : checks) CHECK(c.lhs == doctest::Approx(dense_ref[static_cast<std::size_t>(c.e)]).epsilon(1e-12));
  }

  TEST_CASE("hitting identity on random 4-vertex environments") {
    const auto m = fixture::four_vertex();
    const auto ws = fixture::random_weights(m, 14);
    const auto r = reverse(m);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto env = sample_environment(m, ws, s);
      const auto dense_ref = last_exit_dense(dense(m, env.omega), 3);
      for (const auto& c : hitting_prob_check(m, r, env, 3)) {
        CHECK(std::abs(c.lhs - c.rhs) <= 1e-10);
        CHECK(std::abs(c.lhs - dense_ref[static_cast<std::size_t>(c.e)]) <= 1e-12);
      }
    }
  }

  TEST_CASE("hitting identity with tiny weights and on the sparse path") {
    const auto small = LatticeGraph::torus({2, 3, 0});
    WeightSpec w;
    w.alpha = {0.3};
    w.z = "random";
    const auto ws = lattice_weight_system(small, w.lattice(2));
    const auto r = reverse(small.model());
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto env = sample_environment(small.model(), ws, s);
      for (const auto& c : hitting_prob_check(small.model(), r, env, small.root_edge()))
        CHECK(std::abs(c.lhs - c.rhs) <= 1e-12);
    }
    const auto big = LatticeGraph::torus({3, 5, 0});
    REQUIRE(big.graph().edge_count() > kGthLimit);
    const auto wb = lattice_weight_system(big, LatticeWeights::symmetric(3, 1.0));
    const auto rb = reverse(big.model());
    const auto env = sample_environment(big.model(), wb, 3);
    double total = 0.0;
    for (const auto& c : hitting_prob_check(big.model(), rb, env, big.root_edge())) {
      CHECK(std::abs(c.lhs - c.rhs) <= 1e-10);
      total += c.lhs;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("Green function of a geometric gadget is 1 / (1 - p)") {
    // a: 0 -> 0 (self-loop), b: 0 -> 1, c: 1 -> 0; arcs a->a, a->b, b->c, c->a, c->b
    ArcGraphModel m(DirectedGraph(2, {{0, 0}, {0, 1}, {1, 0}}));
    Environment env;
    const double p = 0.85;
    env.omega = {p, 1 - p, 1.0, 0.5, 0.5};
    const auto g = green_function_killed(m, env, 0, 1);
    CHECK(g.green == doctest::Approx(1.0 / (1.0 - p)).epsilon(1e-13));
    CHECK(g.escape == doctest::Approx(1.0 - p).epsilon(1e-13));
    CHECK_THROWS_AS(green_function_killed(m, env, 1, 1), PreconditionError);
  }

  TEST_CASE("G times escape probability is 1 on box environments") {
    const auto b = LatticeGraph::box({3, 3, 0});
    LatticeWeights w = LatticeWeights::symmetric(3, 1.0);
    const auto ws = lattice_weight_system(b, w);
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto env = sample_environment(b.model(), ws, s);
      const auto g = green_function_killed(b.model(), env, b.root_edge(), *b.special_edge());
      CHECK(g.green >= 1.0);
      CHECK(g.green * g.escape <= 1.0 + 1e-10);
      CHECK(g.green * g.escape == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("trap time is geometric with the pair return probability") {
    const auto t = LatticeGraph::torus({2, 3, 0});
    const auto ws = fixture::constant_weights(t.model(), 0.5, 1.0);
    const auto env = sample_environment(t.model(), ws, 9);
    const EdgeId e = t.root_edge();
    const auto rev = t.opposite(e);
    const auto law = trap_law(t.model(), env, e, rev);
    CHECK(law.p_return + law.q_leave == doctest::Approx(1.0).epsilon(1e-14));
    Engine eng(4);
    std::vector<double> x(10000);
    std::size_t ones = 0;
    for (auto& v : x) {
      v = static_cast<double>(trap_time_sample(t.model(), env, e, rev, eng, 100000000));
      ones += v == 1.0;
    }
    const auto est = make_estimate(x);
    CHECK(std::abs(est.mean - law.mean()) < 3.0 * est.std_error);
    const double q = law.q_leave, n = static_cast<double>(x.size());
    CHECK(std::abs(static_cast<double>(ones) / n - q) < 3.0 * std::sqrt(q * (1 - q) / n));
    Engine e2(4);
    CHECK(trap_time_sample(t.model(), env, e, rev, e2, 1) == 1);
  }

  TEST_CASE("weak reversal z-scores for a Dirichlet law on the d=2 N=2 torus") {
    const auto t = LatticeGraph::torus({2, 2, 0});
    const auto ws = lattice_weight_system(t, LatticeWeights::symmetric(2, 1.0));
    Engine eng(12);
    std::vector<Cycle> cs;
    for (int i = 0; i < 4; ++i) cs.push_back(random_cycle(t.arcs(), static_cast<EdgeId>(i), 4, eng));
    const auto s = check_weak_reversal(t.model(), ws, cs, 4000, 3);
    const auto p = check_weak_reversal(t.model(), ws, cs, 4000, 3, true, 1e-10, ExecutionMode::parallel, 2);
    CHECK(s.max_abs_z < 4.0);
    REQUIRE(s.cycles.size() == p.cycles.size());
    for (std::size_t i = 0; i < s.cycles.size(); ++i) {
      CHECK(s.cycles[i].z == p.cycles[i].z);
      REQUIRE(s.cycles[i].exact);
      CHECK(std::abs(z_score(s.cycles[i].reversed_law, *s.cycles[i].exact)) < 4.0);
    }
  }

  TEST_CASE("weak reversal requires div(alpha) = 0") {
    const auto m = fixture::four_vertex();
    const auto ws = fixture::random_weights(m, 1);
    const std::vector<Cycle> cs{{0, 1, 2, 3, 0}};
    CHECK_THROWS_WITH_AS(check_weak_reversal(m, ws, cs, 10, 1), "div(alpha) must vanish for the weak time reversal",
                         PreconditionError);
  }
}
