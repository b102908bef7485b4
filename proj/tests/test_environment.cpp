#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "hypwalk/environment.hpp"
#include "hypwalk/error.hpp"
#include "hypwalk/lattice.hpp"
#include "hypwalk/rng.hpp"

using namespace hypwalk;

namespace {

HypergeomParams params2(std::vector<double> a, std::vector<double> b, std::vector<std::vector<double>> z) {
  HypergeomParams p{std::move(a), std::move(b), Eigen::MatrixXd(z.size(), 2)};
  for (std::size_t j = 0; j < z.size(); ++j)
    for (std::size_t i = 0; i < 2; ++i) p.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = z[j][i];
  return p;
}

// KS statistic of n=2 sampler output (first coordinate) against the CDF of the
// normalized density, integrated piecewise between sorted samples.
double ks_statistic(const HypergeomParams& p, std::vector<double> x) {
  auto dens = [&](double t) {
    double v = std::pow(t, p.alpha[0] - 1.0) * std::pow(1.0 - t, p.alpha[1] - 1.0);
    for (std::size_t j = 0; j < p.l(); ++j) v *= std::pow(p.z(static_cast<Eigen::Index>(j), 0) * t + p.z(static_cast<Eigen::Index>(j), 1) * (1.0 - t), -p.beta[j]);
    return v;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double total = ts.integrate(dens, 0.0, 1.0, 1e-13);
  std::sort(x.begin(), x.end());
  double f = 0.0, prev = 0.0, d = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > prev) f += ts.integrate(dens, prev, x[k], 1e-12) / total;
    prev = x[k];
    d = std::max({d, std::abs(f - static_cast<double>(k) / n), std::abs(f - static_cast<double>(k + 1) / n)});
  }
  return d;
}

}  // namespace

TEST_SUITE("environment") {
  TEST_CASE("derive_seed separates streams") {
    std::set<std::uint64_t> s;
    for (std::uint64_t i = 0; i < 100; ++i)
      for (std::uint64_t j = 0; j < 10; ++j) s.insert(derive_seed(7, i, j));
    CHECK(s.size() == 1000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
  }

  TEST_CASE("Dirichlet draws lie on the simplex with the right mean") {
    Engine eng(11);
    const std::vector<double> a{0.1, 0.5, 2.0};
    std::vector<double> u(3), mean(3, 0.0);
    const int n = 40000;
    for (int r = 0; r < n; ++r) {
      sample_dirichlet(eng, a, u);
      CHECK(u[0] + u[1] + u[2] == doctest::Approx(1.0).epsilon(1e-14));
      for (int i = 0; i < 3; ++i) {
        CHECK(u[static_cast<std::size_t>(i)] > 0.0);
        mean[static_cast<std::size_t>(i)] += u[static_cast<std::size_t>(i)] / n;
      }
    }
    for (int i = 0; i < 3; ++i) {
      const double m = a[static_cast<std::size_t>(i)] / 2.6;
      const double sd = std::sqrt(m * (1 - m) / 3.6 / n);
      CHECK(std::abs(mean[static_cast<std::size_t>(i)] - m) < 4 * sd);
    }
  }

  TEST_CASE("constant-row Z accepts every proposal and reproduces Dirichlet draws") {
    const auto p = params2({0.7, 1.9}, {1.3, 1.3}, {{2.0, 2.0}, {0.5, 0.5}});
    CHECK(acceptance_rate(p, 1000, 3) == doctest::Approx(1.0));
    Engine a(5), b(5);
    std::vector<double> u(2), v(2);
    for (int r = 0; r < 100; ++r) {
      sample_simplex(p, a, u);
      sample_dirichlet(b, p.alpha, v);
      CHECK(u == v);
    }
  }

  TEST_CASE("n=2 rejection sampler passes a KS test against the quadrature CDF") {
    const auto p = params2({1.5, 0.8}, {1.2, 1.1}, {{1.0, 3.0}, {2.0, 0.5}});
    Engine eng(99);
    std::vector<double> x(20000), u(2);
    for (auto& v : x) {
      sample_simplex(p, eng, u);
      v = u[0];
    }
    CHECK(ks_statistic(p, x) < 1.628 / std::sqrt(20000.0));
  }

  TEST_CASE("hopeless acceptance raises SamplerError") {
    const auto p = params2({1.0, 1.0}, {30.0}, {{1.0, 1e6}});
    Engine eng(1);
    std::vector<double> u(2);
    CHECK_THROWS_AS(sample_simplex(p, eng, u), SamplerError);
    CHECK(acceptance_rate(p, 10000, 2) < 1e-4);
  }

  TEST_CASE("environment rows are stochastic and reproducible") {
    const auto t = LatticeGraph::torus({2, 3, 0});
    LatticeWeights w{2, {0.3, 1.0, 2.0, 0.6}, {}};
    for (int i = 0; i < 16; ++i) w.z.push_back(0.5 + 0.1 * i);
    const auto ws = lattice_weight_system(t, w);
    const auto a = sample_environment(t.model(), ws, 42);
    const auto b = sample_environment(t.model(), ws, 42);
    const auto c = sample_environment(t.model(), ws, 43);
    CHECK_NOTHROW(check_environment(t.model(), a));
    CHECK(a.omega == b.omega);
    CHECK(a.omega != c.omega);
    EnvironmentSampler s(t.model(), ws);
    CHECK(s.sample(42).u == a.u);
    const auto ux = s.sample_vertex(3, 42);
    const auto out = t.graph().out_edges(3);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(ux[i] == a.u[static_cast<std::size_t>(out[i])]);
    CHECK(sample_u_vertex(t.model(), ws, 3, 42) == ux);
  }

  TEST_CASE("environment dump roundtrips bit for bit") {
    const auto m = fixture::four_vertex();
    const auto ws = fixture::random_weights(m, 3);
    const auto env = sample_environment(m, ws, 8);
    std::stringstream ss;
    write_environment(ss, m, env, R"({"seed":8})");
    const auto d = read_environment(ss, m, ws);
    CHECK(d.env.u == env.u);
    CHECK(d.env.omega == env.omega);
    CHECK(d.provenance_json == R"({"seed":8})");
    std::stringstream bad("{\"format\": \"other\"}");
    CHECK_THROWS_AS(read_environment(bad, m, ws), PreconditionError);
  }

  TEST_CASE("Dirichlet case: E[omega(e,e')] = alpha(e') / sum") {
    const auto m = fixture::two_vertex();
    auto ws = fixture::constant_weights(m, 1.0, 1.0);
    ws.alpha = {0.5, 1.5, 2.0, 0.4};
    const std::size_t n = 40000;
    for (ArcId k = 0; k < static_cast<ArcId>(m.arc_count()); ++k) {
      std::vector<double> xi(m.arc_count(), 0.0);
      xi[static_cast<std::size_t>(k)] = 1.0;
      const auto e = moments_mc(m, ws, xi, n, 5);
      const auto to = static_cast<std::size_t>(m.arcs.arc(k).to);
      const double sum = to < 2 ? 2.0 : 2.4;
      CHECK(std::abs(e.mean - ws.alpha[to] / sum) < 3.5 * e.std_error);
    }
  }

  TEST_CASE("single-arc moment matches the quadrature marginal for Z=[[1,2],[2,1]]") {
    const auto m = fixture::two_vertex();
    auto ws = fixture::constant_weights(m, 1.0, 1.0);
    // vertex 1: in-edges 0,1 (rows), out-edges 2,3 (columns)
    ws.z[static_cast<std::size_t>(*m.arcs.find(0, 3))] = 2.0;
    ws.z[static_cast<std::size_t>(*m.arcs.find(1, 2))] = 2.0;
    for (ArcId k : {*m.arcs.find(0, 2), *m.arcs.find(0, 3), *m.arcs.find(1, 3)}) {
      std::vector<double> xi(m.arc_count(), 0.0);
      xi[static_cast<std::size_t>(k)] = 1.0;
      const auto e = moments_mc(m, ws, xi, 100000, 17);
      const double exact = marginal_moment(m, ws, k, 1.0, 1e-10);
      CHECK(std::abs(e.mean - exact) < 3.0 * e.std_error);
      CHECK(std::exp(log_moment_exact(m, ws, xi, 1e-10)) == doctest::Approx(exact).epsilon(1e-9));
    }
  }

  TEST_CASE("small integer xi: Monte Carlo and importance agree with the moment formula") {
    const auto m = fixture::two_vertex();
    const auto ws = fixture::random_weights(m, 12, 0.8, 2.5, 0.3, 3.0);
    std::mt19937_64 eng(4);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int rep = 0; rep < 4; ++rep) {
      std::vector<double> xi(m.arc_count());
      for (auto& v : xi) v = pick(eng);
      const double exact = std::exp(log_moment_exact(m, ws, xi, 1e-10));
      const auto mc = moments_mc(m, ws, xi, 60000, 100 + static_cast<std::uint64_t>(rep));
      const auto is = moments_importance(m, ws, xi, 60000, 200 + static_cast<std::uint64_t>(rep));
      CHECK(std::abs(mc.mean - exact) < 3.5 * mc.std_error);
      CHECK(std::abs(is.mean - exact) < 4.0 * is.std_error);
    }
  }

  TEST_CASE("change of measure: tilt by theta with weight u-tilde^-theta") {
    const auto m = fixture::two_vertex();
    const auto ws = fixture::random_weights(m, 21, 1.0, 2.0);
    const std::vector<double> theta{0.4, 0.0, 0.7, 0.2};
    auto tilted = ws;
    for (std::size_t e = 0; e < theta.size(); ++e) tilted.alpha[e] += theta[e];
    const double log_ratio = log_F_product(m, tilted, {}, 1e-10) - log_F_product(m, ws, {}, 1e-10);
    const ArcId k = *m.arcs.find(1, 2);
    const std::size_t n = 80000;
    std::vector<double> lhs(n), rhs(n);
    EnvironmentSampler st(m, tilted), s0(m, ws);
    for (std::size_t r = 0; r < n; ++r) {
      const auto a = st.sample(derive_seed(31, r));
      lhs[r] = rn_weight(m, ws, a, theta) * a.omega[static_cast<std::size_t>(k)] * std::exp(log_ratio);
      rhs[r] = s0.sample(derive_seed(32, r)).omega[static_cast<std::size_t>(k)];
    }
    CHECK(std::abs(z_score(make_estimate(lhs), make_estimate(rhs))) < 3.0);
  }

  TEST_CASE("zero tilt gives moment 1 exactly and bad tilts are rejected") {
    const auto m = fixture::four_vertex();
    const auto ws = fixture::random_weights(m, 2);
    std::vector<double> xi(m.arc_count(), 0.0);
    CHECK(moments_mc(m, ws, xi, 10, 1).mean == 1.0);
    CHECK(log_moment_exact(m, ws, xi, 1e-8) == 0.0);
    auto bad = ws;
    bad.xi.assign(m.arc_count(), -5.0);
    CHECK_THROWS_AS(validate_weights(m, bad), PreconditionError);
    auto neg = ws;
    neg.alpha[0] = 0.0;
    CHECK_THROWS_AS(validate_weights(m, neg), PreconditionError);
  }
}
