#include <doctest.h>

#include <cmath>
#include <random>

#include "hypwalk/chain.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/experiments.hpp"
#include "hypwalk/flows.hpp"
#include "hypwalk/report.hpp"

using namespace hypwalk;

namespace {

std::string dump(const ExperimentReport& r) { return report_to_json(r).dump(2); }

ExperimentConfig small(ExecutionMode mode = ExecutionMode::serial) {
  ExperimentConfig c;
  c.mode = mode;
  c.threads = 2;
  c.n_environments = 12;
  c.n_samples = 2000;
  c.n_cycles = 3;
  c.n_cases = 8;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("significant increase needs a strict rise and z above the threshold") {
    const std::vector<Estimate> up{{1.0, 0.01, 100}, {1.2, 0.01, 100}, {1.5, 0.01, 100}};
    CHECK(significant_increase(up, 3.0));
    const std::vector<Estimate> noisy{{1.0, 0.5, 100}, {1.2, 0.5, 100}, {1.5, 0.5, 100}};
    CHECK_FALSE(significant_increase(noisy, 3.0));
    const std::vector<Estimate> bump{{1.0, 0.01, 100}, {1.5, 0.01, 100}, {1.4, 0.01, 100}};
    CHECK_FALSE(significant_increase(bump, 3.0));
    const std::vector<Estimate> two{{1.0, 0.01, 100}, {2.0, 0.01, 100}};
    CHECK(significant_increase(two, 3.0));
    CHECK_FALSE(significant_increase({up[0]}, 3.0));
  }

  TEST_CASE("Hill estimator recovers a Pareto index") {
    std::mt19937_64 eng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(200000);
    for (auto& v : x) v = std::pow(1.0 - u(eng), -1.0 / 2.5);
    CHECK(hill_tail_index(x, 2000) == doctest::Approx(2.5).epsilon(0.08));
  }

  TEST_CASE("exchangeable directions") {
    CHECK(exchangeable_directions(LatticeWeights::symmetric(3, 0.1)));
    WeightSpec back;
    back.z = "backtrack";
    back.z_backtrack = 3.0;
    CHECK(exchangeable_directions(back.lattice(3)));
    WeightSpec rnd;
    rnd.z = "random";
    CHECK_FALSE(exchangeable_directions(rnd.lattice(3)));
    WeightSpec aniso;
    aniso.alpha = {1, 2, 1, 2};
    CHECK_FALSE(exchangeable_directions(aniso.lattice(2)));
  }

  TEST_CASE("weight spec builds lattice weights") {
    WeightSpec w;
    w.alpha = {0.5};
    const auto lw = w.lattice(2);
    CHECK(lw.alpha == std::vector<double>(4, 0.5));
    CHECK(lw.dirichlet());
    WeightSpec b;
    b.z = "backtrack";
    b.z_backtrack = 2.0;
    const auto lb = b.lattice(2);
    CHECK(lb.z_at(0, 2) == 2.0);
    CHECK(lb.z_at(0, 0) == 1.0);
    CHECK_FALSE(lb.dirichlet());
    WeightSpec bad;
    bad.alpha = {1, 2, 3};
    CHECK_THROWS_AS(bad.lattice(2), PreconditionError);
  }

  TEST_CASE("uniform omega gives f_N = 1 exactly") {
    const auto t = LatticeGraph::torus({3, 3, 0});
    Environment env{{}, std::vector<double>(t.arcs().arc_count(), 1.0 / 6.0)};
    const auto law = stationary(t.model(), env);
    CHECK(static_cast<double>(t.graph().edge_count()) * law.pi[static_cast<std::size_t>(t.root_edge())] ==
          doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("duality sweep passes and is identical in serial and parallel") {
    auto c = small();
    const auto a = run_duality_sweep(c);
    c.mode = ExecutionMode::parallel;
    const auto b = run_duality_sweep(c);
    CHECK(a.all_pass());
    CHECK(a.flag("duality").pass);
    CHECK(dump(a) == dump(b));
  }

  TEST_CASE("duality with n = l = 1 is exact") {
    HypergeomParams p{{1.7}, {1.7}, Eigen::MatrixXd::Constant(1, 1, 2.5)};
    CHECK(duality_residual(p, 1e-10) == 0.0);
  }

  TEST_CASE("green moment at s = 0 is 1 and G <= 1 / P[escape]") {
    auto c = small();
    c.n_values = {2, 3};
    c.s_values = {0.0, 0.5};
    c.n_environments = 6;
    const auto r = run_green_moment(c);
    CHECK(r.estimate("N=2,s=0").estimate.mean == 1.0);
    CHECK(r.estimate("N=3,s=0").estimate.std_error == 0.0);
    CHECK(r.flag("green_le_inverse_escape").pass);
    CHECK(r.flag("kappa_tilde_le_kappa").pass);
    CHECK(r.metadata["kappa"] == 10.0);
  }

  TEST_CASE("green moment rejects s outside the window and d < 3") {
    auto c = small();
    c.s_values = {1.0};
    CHECK_THROWS_WITH_AS(run_green_moment(c),
                         "green-moment: s = 1 is outside the moment window [0, kappa_tilde) = [0, 1)",
                         PreconditionError);
    c.s_values = {0.5};
    c.graph.d = 2;
    CHECK_THROWS_AS(run_green_moment(c), PreconditionError);
  }

  TEST_CASE("invariant measure on small tori: flags and determinism across modes") {
    auto c = small();
    c.n_values = {2, 3};
    c.p_values = {1.0, 2.0};
    c.n_environments = 16;
    const auto a = run_invariant_measure(c);
    c.mode = ExecutionMode::parallel;
    const auto b = run_invariant_measure(c);
    CHECK(dump(a) == dump(b));
    CHECK(a.flag("flow_identities").pass);
    CHECK(a.flag("flow_domination").pass);
    CHECK(a.flag("mean_one").pass);
    CHECK(a.estimate("N=3,p=2").estimate.n_samples == 16);
  }

  TEST_CASE("invariant measure requires p >= 1") {
    auto c = small();
    c.p_values = {0.5};
    CHECK_THROWS_AS(run_invariant_measure(c), PreconditionError);
  }

  TEST_CASE("reversal suite on the d=2 N=2 torus") {
    auto c = small();
    c.graph.d = 2;
    c.graph.n = 2;
    c.weights.alpha = {0.5, 1.0, 2.0, 0.7};
    c.weights.z = "random";
    const auto r = run_reversal_suite(c);
    CHECK(r.flag("weak_reversal").pass);
    CHECK(r.flag("hitting_identity").pass);
    c.graph.kind = GraphSpec::Kind::box;
    CHECK_THROWS_WITH_AS(run_reversal_suite(c), "div(alpha) must vanish for the weak time reversal", PreconditionError);
  }

  TEST_CASE("trap times: geometric law and tail flags") {
    auto c = small();
    c.graph.n = 3;
    c.n_environments = 400;
    const auto r = run_trap_times(c);
    CHECK(r.all_pass());
    c.weights.alpha = {0.1};
    c.trap_cap = 100000;
    const auto heavy = run_trap_times(c);
    CHECK(heavy.flag("kappa_tilde_le_kappa").pass);
  }

  TEST_CASE("config json omits execution settings") {
    auto c = small();
    const auto j = c.to_json();
    CHECK(j.contains("graph"));
    CHECK(j.at("experiment").contains("seed"));
    CHECK(j.dump().find("threads") == std::string::npos);
  }
}
