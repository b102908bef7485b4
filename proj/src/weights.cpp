#include "hypwalk/weights.hpp"

#include <cmath>
#include <string>

#include "hypwalk/error.hpp"

namespace hypwalk {

std::vector<double> xi_leaving(const ArcGraph& h, std::span<const double> xi) {
  std::vector<double> out(h.node_count(), 0.0);
  if (xi.empty()) return out;
  require(xi.size() == h.arc_count(), "xi must be defined on every arc");
  for (std::size_t k = 0; k < xi.size(); ++k) out[static_cast<std::size_t>(h.arc(static_cast<ArcId>(k)).from)] += xi[k];
  return out;
}

std::vector<double> xi_entering(const ArcGraph& h, std::span<const double> xi) {
  std::vector<double> in(h.node_count(), 0.0);
  if (xi.empty()) return in;
  require(xi.size() == h.arc_count(), "xi must be defined on every arc");
  for (std::size_t k = 0; k < xi.size(); ++k) in[static_cast<std::size_t>(h.arc(static_cast<ArcId>(k)).to)] += xi[k];
  return in;
}

void validate_weights(const ArcGraphModel& m, const WeightSystem& ws) {
  require(ws.alpha.size() == m.edge_count(), "alpha must have one entry per edge");
  require(ws.z.size() == m.arc_count(), "Z must have one entry per arc");
  require(ws.xi.empty() || ws.xi.size() == m.arc_count(), "xi must be empty or one entry per arc");
  for (double a : ws.alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("alpha must be strictly positive and finite");
  for (double z : ws.z)
    if (!(z > 0.0) || !std::isfinite(z)) throw PreconditionError("Z must be strictly positive and finite");
  for (double x : ws.xi)
    if (!std::isfinite(x)) throw PreconditionError("xi must be finite");
  if (ws.xi.empty()) return;
  auto lv = xi_leaving(m.arcs, ws.xi);
  auto en = xi_entering(m.arcs, ws.xi);
  for (std::size_t e = 0; e < ws.alpha.size(); ++e) {
    if (!(ws.alpha[e] + lv[e] > 0.0) || !(ws.alpha[e] + en[e] > 0.0))
      throw PreconditionError("tilt makes a parameter nonpositive at edge " + std::to_string(e));
  }
}

WeightSystem reverse_weights(const ReversedModel& r, const WeightSystem& ws) {
  WeightSystem out;
  out.alpha = ws.alpha;
  out.z.assign(ws.z.size(), 0.0);
  for (std::size_t k = 0; k < ws.z.size(); ++k) out.z[static_cast<std::size_t>(r.arc_map[k])] = ws.z[k];
  if (!ws.xi.empty()) {
    out.xi.assign(ws.xi.size(), 0.0);
    for (std::size_t k = 0; k < ws.xi.size(); ++k) out.xi[static_cast<std::size_t>(r.arc_map[k])] = ws.xi[k];
  }
  return out;
}

bool LatticeWeights::dirichlet() const {
  const int deg = 2 * d;
  for (int i = 0; i < deg; ++i)
    for (int j = 1; j < deg; ++j)
      if (z_at(i, j) != z_at(i, 0)) return false;
  return true;
}

void LatticeWeights::validate() const {
  require(d >= 1, "lattice dimension must be >= 1");
  const auto deg = static_cast<std::size_t>(2 * d);
  require(alpha.size() == deg, "lattice alpha needs 2d entries");
  require(z.size() == deg * deg, "lattice Z needs (2d)^2 entries");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("alpha must be strictly positive and finite");
  for (double v : z)
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("Z must be strictly positive and finite");
}

LatticeWeights LatticeWeights::symmetric(int d, double a) {
  const auto deg = static_cast<std::size_t>(2 * d);
  return {d, std::vector<double>(deg, a), std::vector<double>(deg * deg, 1.0)};
}

WeightSystem lattice_weight_system(const LatticeGraph& g, const LatticeWeights& w, double special_alpha) {
  w.validate();
  require(w.d == g.dimension(), "lattice weights dimension does not match the graph");
  require(special_alpha > 0.0, "special edge weight must be positive");
  const auto& h = g.arcs();
  WeightSystem ws;
  ws.alpha.resize(g.graph().edge_count());
  for (std::size_t e = 0; e < ws.alpha.size(); ++e) {
    const int dir = g.direction(static_cast<EdgeId>(e));
    ws.alpha[e] = dir < 0 ? special_alpha : w.alpha[static_cast<std::size_t>(dir)];
  }
  ws.z.resize(h.arc_count());
  for (std::size_t k = 0; k < ws.z.size(); ++k) {
    const auto& a = h.arc(static_cast<ArcId>(k));
    const int i = g.direction(a.from), j = g.direction(a.to);
    ws.z[k] = (i < 0 || j < 0) ? 1.0 : w.z_at(i, j);
  }
  return ws;
}

}  // namespace hypwalk
