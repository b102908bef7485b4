#include "hypwalk/lattice.hpp"

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// Lexicographic index of c in {lo..lo+side-1}^d.
std::size_t lex_index(std::span<const int> c, int lo, int side) {
  std::size_t idx = 0;
  for (int v : c) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(v - lo);
  return idx;
}

std::vector<int> lex_coords(std::size_t idx, int d, int lo, int side) {
  std::vector<int> c(static_cast<std::size_t>(d));
  for (int k = d - 1; k >= 0; --k) {
    c[static_cast<std::size_t>(k)] = static_cast<int>(idx % static_cast<std::size_t>(side)) + lo;
    idx /= static_cast<std::size_t>(side);
  }
  return c;
}

void step(std::vector<int>& c, int dir, int d) {
  if (dir < d)
    ++c[static_cast<std::size_t>(dir)];
  else
    --c[static_cast<std::size_t>(dir - d)];
}

}  // namespace

LatticeGraph::LatticeGraph(ArcGraphModel m, LatticeKind kind, int d, int n)
    : model_(std::move(m)), kind_(kind), d_(d), n_(n) {}

LatticeGraph LatticeGraph::torus(const TorusSpec& s) {
  require(s.d >= 1, "torus dimension must be >= 1");
  require(s.n >= 2, "torus side length N must be >= 2");
  require(s.root_direction >= 0 && s.root_direction < 2 * s.d, "root direction out of range");
  const auto nv = ipow(s.n, s.d);
  const auto deg = static_cast<std::size_t>(2 * s.d);
  std::vector<Edge> edges;
  edges.reserve(nv * deg);
  for (std::size_t v = 0; v < nv; ++v) {
    auto c = lex_coords(v, s.d, 0, s.n);
    for (int dir = 0; dir < 2 * s.d; ++dir) {
      auto w = c;
      step(w, dir, s.d);
      for (auto& x : w) x = (x + s.n) % s.n;
      edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(lex_index(w, 0, s.n))});
    }
  }
  LatticeGraph g(ArcGraphModel(DirectedGraph(nv, std::move(edges))), LatticeKind::torus, s.d, s.n);
  g.n_lattice_ = nv;
  g.root_dir_ = s.root_direction;
  g.dir_.resize(nv * deg);
  for (std::size_t e = 0; e < g.dir_.size(); ++e) g.dir_[e] = static_cast<int>(e % deg);
  g.origin_ = 0;
  std::vector<int> x0(static_cast<std::size_t>(s.d), 0);
  step(x0, opposite_direction(s.root_direction, s.d), s.d);
  for (auto& x : x0) x = (x + s.n) % s.n;
  g.root_edge_ = g.edge_from(static_cast<VertexId>(lex_index(x0, 0, s.n)), s.root_direction);
  return g;
}

LatticeGraph LatticeGraph::box(const BoxGraphSpec& s) {
  require(s.d >= 1, "box dimension must be >= 1");
  require(s.radius >= 2, "box radius N must be >= 2");
  require(s.root_direction >= 0 && s.root_direction < 2 * s.d, "root direction out of range");
  const int side = 2 * s.radius + 1;
  const auto nb = ipow(side, s.d);
  const auto deg = static_cast<std::size_t>(2 * s.d);
  const auto boundary = static_cast<VertexId>(nb);
  std::vector<Edge> edges;
  edges.reserve(nb * deg + 1);
  for (std::size_t v = 0; v < nb; ++v) {
    auto c = lex_coords(v, s.d, -s.radius, side);
    for (int dir = 0; dir < 2 * s.d; ++dir) {
      auto w = c;
      step(w, dir, s.d);
      bool inside = true;
      for (int x : w) inside = inside && x >= -s.radius && x <= s.radius;
      VertexId head = inside ? static_cast<VertexId>(lex_index(w, -s.radius, side)) : boundary;
      edges.push_back({static_cast<VertexId>(v), head});
    }
  }
  std::vector<int> x0(static_cast<std::size_t>(s.d), 0);
  step(x0, opposite_direction(s.root_direction, s.d), s.d);
  const auto x0_index = static_cast<VertexId>(lex_index(x0, -s.radius, side));
  edges.push_back({boundary, x0_index});
  LatticeGraph g(ArcGraphModel(DirectedGraph(nb + 1, std::move(edges))), LatticeKind::box, s.d,
                 s.radius);
  g.n_lattice_ = nb;
  g.root_dir_ = s.root_direction;
  g.dir_.resize(nb * deg + 1);
  for (std::size_t e = 0; e + 1 < g.dir_.size(); ++e) g.dir_[e] = static_cast<int>(e % deg);
  g.dir_.back() = -1;
  std::vector<int> zero(static_cast<std::size_t>(s.d), 0);
  g.origin_ = static_cast<VertexId>(lex_index(zero, -s.radius, side));
  g.boundary_ = boundary;
  g.special_ = static_cast<EdgeId>(nb * deg);
  g.root_edge_ = g.edge_from(x0_index, s.root_direction);
  return g;
}

EdgeId LatticeGraph::edge_from(VertexId x, int dir) const {
  require(x >= 0 && static_cast<std::size_t>(x) < n_lattice_, "edge_from: not a lattice vertex");
  require(dir >= 0 && dir < 2 * d_, "edge_from: direction out of range");
  return static_cast<EdgeId>(static_cast<std::size_t>(x) * static_cast<std::size_t>(2 * d_) +
                             static_cast<std::size_t>(dir));
}

std::optional<EdgeId> LatticeGraph::opposite(EdgeId e) const {
  const int dir = direction(e);
  if (dir < 0) return std::nullopt;
  const VertexId h = graph().head(e);
  if (boundary_ && h == *boundary_) return std::nullopt;
  return edge_from(h, opposite_direction(dir, d_));
}

std::vector<int> LatticeGraph::coords(VertexId x) const {
  require(x >= 0 && static_cast<std::size_t>(x) < n_lattice_, "coords: not a lattice vertex");
  if (kind_ == LatticeKind::torus) return lex_coords(static_cast<std::size_t>(x), d_, 0, n_);
  return lex_coords(static_cast<std::size_t>(x), d_, -n_, 2 * n_ + 1);
}

std::optional<VertexId> LatticeGraph::vertex_at(std::span<const int> c) const {
  require(c.size() == static_cast<std::size_t>(d_), "vertex_at: wrong dimension");
  if (kind_ == LatticeKind::torus) {
    std::vector<int> w(c.begin(), c.end());
    for (auto& x : w) x = ((x % n_) + n_) % n_;
    return static_cast<VertexId>(lex_index(w, 0, n_));
  }
  for (int x : c)
    if (x < -n_ || x > n_) return std::nullopt;
  return static_cast<VertexId>(lex_index(c, -n_, 2 * n_ + 1));
}

}  // namespace hypwalk
