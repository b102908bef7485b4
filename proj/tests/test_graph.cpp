#include <doctest.h>

#include <random>

#include "hypwalk/error.hpp"
#include "hypwalk/graph.hpp"
#include "hypwalk/lattice.hpp"
#include "hypwalk/maxflow.hpp"
#include "oracles.hpp"

using namespace hypwalk;

namespace {

std::size_t brute_force_arcs(const DirectedGraph& g) {
  std::size_t n = 0;
  for (const auto& a : g.edges())
    for (const auto& b : g.edges()) n += a.head == b.tail;
  return n;
}

DirectedGraph three_cycle() { return DirectedGraph(3, {{0, 1}, {1, 2}, {2, 0}}); }

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("torus d=3 N=2 has 48 edges and 288 arcs") {
    const auto t = LatticeGraph::torus({3, 2, 0});
    CHECK(t.graph().vertex_count() == 8);
    CHECK(t.graph().edge_count() == 48);
    CHECK(t.arcs().arc_count() == 288);
    for (EdgeId e = 0; e < 48; ++e) CHECK(t.arcs().out_end(e) - t.arcs().out_begin(e) == 6);
  }

  TEST_CASE("torus d=2 N=2 keeps parallel edges distinct") {
    const auto t = LatticeGraph::torus({2, 2, 0});
    const auto& g = t.graph();
    CHECK(g.edge_count() == 16);
    const EdgeId plus = t.edge_from(0, 0), minus = t.edge_from(0, 2);
    CHECK(plus != minus);
    CHECK(g.head(plus) == g.head(minus));
    CHECK(t.arcs().arc_count() == brute_force_arcs(g));
  }

  TEST_CASE("torus d=3 N=4 arc count matches brute force enumeration") {
    const auto t = LatticeGraph::torus({3, 4, 0});
    CHECK(t.arcs().arc_count() == brute_force_arcs(t.graph()));
    CHECK(t.arcs().arc_count() == 2304);
  }

  TEST_CASE("arc ids are grouped by source edge and match find") {
    const auto t = LatticeGraph::torus({2, 3, 1});
    const auto& h = t.arcs();
    ArcId k = 0;
    for (EdgeId e = 0; e < static_cast<EdgeId>(t.graph().edge_count()); ++e) {
      CHECK(h.out_begin(e) == k);
      for (; k < h.out_end(e); ++k) {
        CHECK(h.arc(k).from == e);
        CHECK(t.graph().head(e) == t.graph().tail(h.arc(k).to));
        CHECK(h.find(e, h.arc(k).to) == k);
      }
    }
    std::size_t in_total = 0;
    for (EdgeId e = 0; e < static_cast<EdgeId>(t.graph().edge_count()); ++e) {
      for (ArcId a : h.in_arcs(e)) CHECK(h.arc(a).to == e);
      in_total += h.in_arcs(e).size();
    }
    CHECK(in_total == h.arc_count());
  }

  TEST_CASE("box layout: boundary vertex, special edge, root edge") {
    const auto b = LatticeGraph::box({2, 2, 0});
    const auto& g = b.graph();
    CHECK(g.vertex_count() == 26);
    CHECK(g.edge_count() == 25 * 4 + 1);
    CHECK(b.special_edge() == static_cast<EdgeId>(100));
    CHECK(g.tail(*b.special_edge()) == *b.boundary_vertex());
    CHECK(g.head(b.root_edge()) == b.origin());
    CHECK(b.coords(g.tail(b.root_edge())) == std::vector<int>{-1, 0});
    CHECK(b.direction(*b.special_edge()) == -1);
    CHECK(b.arcs().arc_count() == brute_force_arcs(g));
  }

  TEST_CASE("opposite edge and coordinates on the torus") {
    const auto t = LatticeGraph::torus({3, 3, 2});
    for (EdgeId e = 0; e < static_cast<EdgeId>(t.graph().edge_count()); ++e) {
      const auto o = t.opposite(e);
      REQUIRE(o);
      CHECK(t.graph().tail(*o) == t.graph().head(e));
      CHECK(t.graph().head(*o) == t.graph().tail(e));
      CHECK(t.opposite(*o) == e);
    }
    const std::vector<int> c{-1, 4, 2};
    CHECK(t.coords(*t.vertex_at(c)) == std::vector<int>{2, 1, 2});
    CHECK(t.graph().head(t.root_edge()) == t.origin());
  }

  TEST_CASE("not strongly connected is rejected") {
    CHECK_THROWS_AS(DirectedGraph(3, {{0, 1}, {1, 2}, {2, 1}}), PreconditionError);
    CHECK_THROWS_AS(DirectedGraph(2, {{0, 1}}), PreconditionError);
    CHECK_THROWS_AS(DirectedGraph(2, {{0, 5}, {5, 0}}), PreconditionError);
    CHECK_NOTHROW(DirectedGraph(1, {{0, 0}}));
  }

  TEST_CASE("vertex divergence on a 3-cycle matches hand computation") {
    const auto g = three_cycle();
    const std::vector<double> theta{0.3, 1.1, 2.5};
    const auto d = div_vertex(g, theta);
    CHECK(d[0] == doctest::Approx(0.3 - 2.5).epsilon(1e-15));
    CHECK(d[1] == doctest::Approx(1.1 - 0.3).epsilon(1e-15));
    CHECK(d[2] == doctest::Approx(2.5 - 1.1).epsilon(1e-15));
  }

  TEST_CASE("arc divergence sums to zero and matches direct sums") {
    const auto t = LatticeGraph::torus({2, 2, 0});
    const auto& h = t.arcs();
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> th(h.arc_count());
    for (auto& v : th) v = u(eng);
    const auto d = div_arc(h, th);
    double total = 0.0;
    for (EdgeId e = 0; e < static_cast<EdgeId>(d.size()); ++e) {
      double out = 0.0, in = 0.0;
      for (std::size_t k = 0; k < h.arc_count(); ++k) {
        if (h.arcs()[k].from == e) out += th[k];
        if (h.arcs()[k].to == e) in += th[k];
      }
      CHECK(d[static_cast<std::size_t>(e)] == doctest::Approx(out - in).epsilon(1e-13));
      total += d[static_cast<std::size_t>(e)];
    }
    CHECK(std::abs(total) < 1e-12);
  }

  TEST_CASE("reversal is an involution and maps arcs exhaustively on d=2 N=2") {
    const auto t = LatticeGraph::torus({2, 2, 0});
    const auto r = reverse(t.model());
    const auto& h = t.arcs();
    const auto& hr = r.model.arcs;
    CHECK(hr.arc_count() == h.arc_count());
    std::vector<int> hit(hr.arc_count(), 0);
    for (ArcId k = 0; k < static_cast<ArcId>(h.arc_count()); ++k) {
      const auto j = r.arc_map[static_cast<std::size_t>(k)];
      CHECK(hr.arc(j).from == h.arc(k).to);
      CHECK(hr.arc(j).to == h.arc(k).from);
      ++hit[static_cast<std::size_t>(j)];
    }
    for (int c : hit) CHECK(c == 1);
    const auto rr = reverse(r.model);
    CHECK(rr.model.graph == t.graph());
    for (ArcId k = 0; k < static_cast<ArcId>(h.arc_count()); ++k)
      CHECK(rr.arc_map[static_cast<std::size_t>(r.arc_map[static_cast<std::size_t>(k)])] == k);
  }

  TEST_CASE("divergence changes sign under reversal") {
    const auto t = LatticeGraph::torus({2, 2, 1});
    const auto r = reverse(t.model());
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> th(t.arcs().arc_count()), thr(th.size());
    for (std::size_t k = 0; k < th.size(); ++k) thr[static_cast<std::size_t>(r.arc_map[k])] = th[k] = u(eng);
    const auto a = div_arc(t.arcs(), th), b = div_arc(r.model.arcs, thr);
    for (std::size_t e = 0; e < a.size(); ++e) CHECK(a[e] == doctest::Approx(-b[e]).epsilon(1e-13));
  }
}

TEST_SUITE("maxflow") {
  TEST_CASE("unit capacities on the d=3 box give cut 6 against Edmonds-Karp") {
    const auto b = LatticeGraph::box({3, 2, 0});
    const auto& g = b.graph();
    std::vector<double> cap(g.edge_count(), 1.0);
    const auto r = max_flow_min_cut(g, cap, b.origin(), *b.boundary_vertex());
    CHECK(r.value == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(r.cut_value == doctest::Approx(6.0).epsilon(1e-12));
    oracle::Net net(static_cast<int>(g.vertex_count()));
    for (const auto& e : g.edges()) net.add(e.tail, e.head, 1.0);
    CHECK(oracle::edmonds_karp(net, b.origin(), *b.boundary_vertex()) == doctest::Approx(6.0));
  }

  TEST_CASE("bottleneck path gadget") {
    const std::vector<NetworkEdge> e{{0, 1, 2.0}, {1, 2, 0.5}, {2, 3, 4.0}, {0, 2, 0.0}};
    const auto r = max_flow(4, e, 0, 3);
    CHECK(r.value == doctest::Approx(0.5));
    CHECK(r.cut == std::vector<std::size_t>{1, 3});
    CHECK(r.cut_value == doctest::Approx(0.5));
    CHECK(r.source_side[1]);
    CHECK_FALSE(r.source_side[2]);
  }

  TEST_CASE("random networks agree with Edmonds-Karp and are monotone in capacity") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::uniform_int_distribution<int> pick(0, 7);
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<NetworkEdge> es;
      oracle::Net net(8);
      for (int k = 0; k < 24; ++k) {
        const int a = pick(eng), b = pick(eng);
        if (a == b) continue;
        const double c = u(eng);
        es.push_back({a, b, c});
        net.add(a, b, c);
      }
      const auto r = max_flow(8, es, 0, 7);
      CHECK(r.value == doctest::Approx(oracle::edmonds_karp(net, 0, 7)).epsilon(1e-10));
      auto more = es;
      for (auto& e : more) e.capacity *= 1.5;
      CHECK(max_flow(8, more, 0, 7).value >= r.value - 1e-12);
    }
  }

  TEST_CASE("bad inputs") {
    const std::vector<NetworkEdge> e{{0, 1, -1.0}};
    CHECK_THROWS_AS(max_flow(2, e, 0, 1), PreconditionError);
    CHECK_THROWS_AS(max_flow(2, {}, 0, 0), PreconditionError);
  }
}
